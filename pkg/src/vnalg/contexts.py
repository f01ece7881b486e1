"""Abelian subalgebras as atom sets, finite poset fragments, Gelfand spectra.

A context is represented by its atoms: pairwise-orthogonal projections that
sum to the identity and span the subalgebra.  The full poset of contexts is
uncountable for noncommutative algebras, so everything here works with
finite, seed-generated, downward-closed fragments.
"""

from __future__ import annotations

import numpy as np

from .algebra import (DEFAULT_TOL, Element, FdAlgebra, _scale, distance,
                      jacobi_eigh, multiply)
from .errors import (DomainError, InconsistencyError, ResourceLimitError,
                     StructureMismatchError)

#: Eigenvalues closer than this share a joint spectral projection.
CLUSTER_TOL = 1e-8

DEFAULT_ATOM_CAP = 8
DEFAULT_NODE_CAP = 500

# Bell numbers B_0..B_10; down-closure sizes beyond the atom cap never occur.
_BELL = (1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975)


def bell_number(n: int) -> int:
    """Number of partitions of an n-element set (Bell triangle)."""
    if n < len(_BELL):
        return _BELL[n]
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return row[0]


def set_partitions(n: int):
    """Yield all partitions of range(n) as lists of sorted index lists."""
    parts: list[list[int]] = []

    def rec(i):
        if i == n:
            yield [list(p) for p in parts]
            return
        for p in parts:
            p.append(i)
            yield from rec(i + 1)
            p.pop()
        parts.append([i])
        yield from rec(i + 1)
        parts.pop()

    yield from rec(0)


def _atom_sort_key(p: Element):
    flat = np.round(p.vec(), 6)
    return (int(round(p.trace().real)),
            tuple(zip(flat.real.tolist(), flat.imag.tolist())))


class Context:
    """A unital abelian subalgebra, stored as its atoms in canonical order."""

    __slots__ = ("parent", "atoms", "_stack")

    def __init__(self, parent: FdAlgebra, atoms, *, tol: float = DEFAULT_TOL,
                 validate: bool = True):
        atom_list = sorted(atoms, key=_atom_sort_key)
        if validate:
            if not atom_list:
                raise DomainError("a context needs at least one atom")
            total = parent.zero()
            for p in atom_list:
                if p.parent != parent:
                    raise StructureMismatchError("atom from a different algebra")
                if not p.is_projection(tol):
                    raise DomainError("atoms must be orthogonal projections")
                total = total + p
            if distance(total, parent.identity()) > tol * _scale(float(len(atom_list))):
                raise DomainError("atoms must sum to the identity")
            for i, p in enumerate(atom_list):
                for q in atom_list[i + 1:]:
                    if multiply(p, q).norm() > tol * _scale(p.norm(), q.norm()):
                        raise DomainError("atoms must be pairwise orthogonal")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "atoms", tuple(atom_list))
        object.__setattr__(self, "_stack", None)

    def __setattr__(self, name, value):
        raise AttributeError("Context is immutable")

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def is_trivial(self) -> bool:
        return len(self.atoms) == 1

    def atom_stack(self) -> np.ndarray:
        """Atoms as rows of one flattened matrix (cached)."""
        if self._stack is None:
            s = np.stack([p.vec() for p in self.atoms])
            s.setflags(write=False)
            object.__setattr__(self, "_stack", s)
        return self._stack

    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(p.trace().real)) for p in self.atoms)

    def __repr__(self):
        return f"Context({self.parent!r}, ranks={list(self.ranks())})"

    def equal(self, other: "Context", tol: float = DEFAULT_TOL) -> bool:
        return atom_matching(self, other, tol) is not None

    def __eq__(self, other):
        if not isinstance(other, Context) or self.parent != other.parent:
            return False
        return self.equal(other)

    __hash__ = None

    def coefficients(self, a: Element, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Expansion coefficients of a member a = Σ λ_p p.

        Raises :class:`DomainError` when a is not in the span of the atoms.
        """
        a._require_same_parent(self.parent.identity())
        lam = np.array([multiply(p, a).trace() / p.trace().real for p in self.atoms])
        recon = self.parent.zero()
        for l, p in zip(lam, self.atoms):
            recon = recon + complex(l) * p
        if distance(recon, a) > tol * _scale(a.norm()):
            raise DomainError("element lies outside the context")
        return lam

    def contains_element(self, a: Element, tol: float = DEFAULT_TOL) -> bool:
        try:
            self.coefficients(a, tol)
            return True
        except DomainError:
            return False


def atom_matching(c1: Context, c2: Context, tol: float = DEFAULT_TOL):
    """Index map m with c1.atoms[i] ≈ c2.atoms[m[i]], or None if no match.

    Greedy matching by minimal Frobenius distance, then verified against the
    tolerance; atoms are canonical coordinates so this decides context
    equality.
    """
    if c1.parent != c2.parent or c1.num_atoms != c2.num_atoms:
        return None
    if sorted(c1.ranks()) != sorted(c2.ranks()):
        return None
    s1, s2 = c1.atom_stack(), c2.atom_stack()
    dists = np.linalg.norm(s1[:, None, :] - s2[None, :, :], axis=2)
    match = [-1] * c1.num_atoms
    used = [False] * c2.num_atoms
    for i in range(c1.num_atoms):
        order = np.argsort(dists[i])
        j = next((int(k) for k in order if not used[int(k)]), None)
        if j is None or dists[i, j] > tol * _scale(float(np.linalg.norm(s1[i]))):
            return None
        match[i] = j
        used[j] = True
    return match


def locate_atom(ctx: Context, q: Element, tol: float = DEFAULT_TOL):
    """Index of the atom of ctx closest to q within tolerance, else None."""
    d = np.linalg.norm(ctx.atom_stack() - q.vec(), axis=1)
    k = int(np.argmin(d))
    if d[k] > tol * _scale(q.norm()):
        return None
    return k


def context_distance(c1: Context, c2: Context, tol: float = DEFAULT_TOL) -> float:
    """Max matched-atom distance, or inf when the atom sets do not match."""
    m = atom_matching(c1, c2, tol)
    if m is None:
        return float("inf")
    s1, s2 = c1.atom_stack(), c2.atom_stack()
    return max(float(np.linalg.norm(s1[i] - s2[j])) for i, j in enumerate(m))


def trivial_context(algebra: FdAlgebra) -> Context:
    return Context(algebra, [algebra.identity()], validate=False)


def diagonal_context(algebra: FdAlgebra) -> Context:
    """The maximal context of diagonal matrix units."""
    atoms = [algebra.matrix_unit(b, i, i)
             for b, n in enumerate(algebra.block_dims) for i in range(n)]
    return Context(algebra, atoms, validate=False)


# ---------------------------------------------------------------------------
# construction from commuting generators
# ---------------------------------------------------------------------------

def context_from_commuting(algebra: FdAlgebra, gens, *, tol: float = DEFAULT_TOL,
                           cluster_tol: float = CLUSTER_TOL) -> Context:
    """Smallest context containing the given commuting Hermitian elements.

    Atoms are the joint spectral projections, found by recursively splitting
    eigenspaces of successive generators; eigenvalues closer than
    ``cluster_tol`` share a projection.  Eigenspace pieces whose eigenvalue
    labels agree across different matrix blocks merge into one atom.
    """
    gens = list(gens)
    for i, g in enumerate(gens):
        if g.parent != algebra:
            raise StructureMismatchError("generator from a different algebra")
        if not g.is_hermitian(tol):
            raise DomainError(f"generator {i} is not Hermitian")
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            comm = multiply(gens[i], gens[j]) - multiply(gens[j], gens[i])
            if comm.norm() > tol * _scale(gens[i].norm(), gens[j].norm()):
                raise DomainError(
                    f"generators {i} and {j} do not commute: "
                    f"‖[g{i},g{j}]‖ = {comm.norm():.3e}")
    # per block: (eigenvalue label tuple, orthonormal column basis)
    pieces_per_block = []
    for b, n in enumerate(algebra.block_dims):
        pieces = [((), np.eye(n, dtype=complex))]
        for g in gens:
            gb = g.blocks[b]
            refined = []
            for label, basis in pieces:
                comp = basis.conj().T @ gb @ basis
                w, v = jacobi_eigh((comp + comp.conj().T) * 0.5)
                start = 0
                for stop in range(1, len(w) + 1):
                    if stop == len(w) or w[stop] - w[stop - 1] > cluster_tol:
                        cols = basis @ v[:, start:stop]
                        rep = float(np.mean(w[start:stop]))
                        refined.append((label + (rep,), cols))
                        start = stop
            pieces = refined
        pieces_per_block.append(pieces)
    # merge pieces across blocks when their full label tuples agree
    groups: list[tuple[tuple[float, ...], list] ] = []
    for b, pieces in enumerate(pieces_per_block):
        for label, basis in pieces:
            for glabel, slots in groups:
                if len(glabel) == len(label) and all(
                        abs(x - y) <= cluster_tol for x, y in zip(glabel, label)):
                    slots[b].append(basis)
                    break
            else:
                slots = [[] for _ in algebra.block_dims]
                slots[b].append(basis)
                groups.append((label, slots))
    atoms = []
    for _, slots in groups:
        mats = []
        for n, bases in zip(algebra.block_dims, slots):
            p = np.zeros((n, n), dtype=complex)
            for basis in bases:
                p += basis @ basis.conj().T
            mats.append(p)
        atoms.append(Element(algebra, mats))
    return Context(algebra, atoms, tol=tol, validate=True)


# ---------------------------------------------------------------------------
# order structure
# ---------------------------------------------------------------------------

def _dominated(p: Element, q: Element, tol: float) -> bool:
    """q ≤ p for projections, i.e. pq = q."""
    return distance(multiply(p, q), q) <= tol * _scale(p.norm(), q.norm())


def leq(v1: Context, v2: Context, tol: float = DEFAULT_TOL) -> bool:
    """Inclusion order: every atom of v1 is a sum of atoms of v2."""
    if v1.parent != v2.parent:
        raise StructureMismatchError("contexts of different algebras")
    if v1.num_atoms > v2.num_atoms:
        return False
    for p in v1.atoms:
        total = v1.parent.zero()
        for q in v2.atoms:
            if _dominated(p, q, tol):
                total = total + q
        if distance(total, p) > tol * _scale(p.norm()):
            return False
    return True


def meet(v1: Context, v2: Context, tol: float = DEFAULT_TOL) -> Context:
    """Greatest lower bound: the intersection of the two subalgebras.

    Computed from the intersection of the linear spans (an abelian
    *-subalgebra containing 1), whose minimal projections are recovered via
    :func:`context_from_commuting` on a Hermitian spanning set.
    """
    if v1.parent != v2.parent:
        raise StructureMismatchError("contexts of different algebras")
    algebra = v1.parent
    b1 = v1.atom_stack().T
    b2 = v2.atom_stack().T
    stacked = np.hstack([b1, -b2])
    _, svals, vh = np.linalg.svd(stacked)
    rank_tol = 100.0 * tol * (svals[0] if len(svals) else 1.0)
    null = [vh[i].conj() for i in range(vh.shape[0]) if i >= len(svals) or svals[i] <= rank_tol]
    gens = []
    for vec in null:
        member = b1 @ vec[:v1.num_atoms]
        elem = _element_from_vec(algebra, member)
        h, k = elem.hermitian_parts()
        for part in (h, k):
            if part.norm() > tol:
                gens.append(part)
    return context_from_commuting(algebra, gens, tol=tol)


def _element_from_vec(algebra: FdAlgebra, vec: np.ndarray) -> Element:
    mats, k = [], 0
    for n in algebra.block_dims:
        mats.append(vec[k:k + n * n].reshape(n, n))
        k += n * n
    return Element(algebra, mats)


def down_closure(v: Context, *, atom_cap: int = DEFAULT_ATOM_CAP,
                 tol: float = DEFAULT_TOL) -> list[Context]:
    """All subcontexts of v: one per partition of its atom set."""
    k = v.num_atoms
    if k > atom_cap:
        raise ResourceLimitError(
            f"context has {k} atoms; down-closure cap is {atom_cap} "
            f"(Bell({k}) = {bell_number(k)} subcontexts)")
    out = []
    for partition in set_partitions(k):
        atoms = []
        for cls in partition:
            s = v.atoms[cls[0]]
            for i in cls[1:]:
                s = s + v.atoms[i]
            atoms.append(s)
        out.append(Context(v.parent, atoms, tol=tol, validate=False))
    return out


class ContextPoset:
    """A finite fragment of the context poset with its order matrix."""

    __slots__ = ("parent", "nodes", "order")

    def __init__(self, parent: FdAlgebra, nodes, *, tol: float = DEFAULT_TOL):
        node_list = list(nodes)
        for v in node_list:
            if v.parent != parent:
                raise StructureMismatchError("node from a different algebra")
        k = len(node_list)
        order = np.zeros((k, k), dtype=bool)
        for i in range(k):
            for j in range(k):
                order[i, j] = i == j or leq(node_list[i], node_list[j], tol)
        order.setflags(write=False)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "nodes", tuple(node_list))
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("ContextPoset is immutable")

    def __len__(self):
        return len(self.nodes)

    def index_of(self, v: Context, tol: float = DEFAULT_TOL):
        for i, node in enumerate(self.nodes):
            if node.equal(v, tol):
                return i
        return None

    def pairs(self):
        """All ordered pairs (i, j) with node_i ≤ node_j."""
        k = len(self.nodes)
        return [(i, j) for j in range(k) for i in range(k) if self.order[i, j]]


def poset_fragment(seeds, *, algebra: FdAlgebra | None = None,
                   atom_cap: int = DEFAULT_ATOM_CAP,
                   node_cap: int = DEFAULT_NODE_CAP,
                   tol: float = DEFAULT_TOL) -> ContextPoset:
    """Fragment containing the seeds, closed under subcontexts and meets.

    Every subcontext of a context corresponds to a partition of its atoms,
    so closing each seed downward already yields meet-closure.  An empty seed
    list gives the empty poset (``algebra`` must then be passed).
    """
    seeds = list(seeds)
    if not seeds:
        if algebra is None:
            raise DomainError("empty seeds need an explicit algebra")
        return ContextPoset(algebra, [])
    parent = seeds[0].parent
    nodes: list[Context] = []
    for seed in seeds:
        if seed.parent != parent:
            raise StructureMismatchError("seeds from different algebras")
        for sub in down_closure(seed, atom_cap=atom_cap, tol=tol):
            if not any(sub.equal(v, tol) for v in nodes):
                nodes.append(sub)
                if len(nodes) > node_cap:
                    raise ResourceLimitError(f"fragment exceeds node cap {node_cap}")
    return ContextPoset(parent, nodes, tol=tol)


def empty_poset(algebra: FdAlgebra) -> ContextPoset:
    return ContextPoset(algebra, [])


def extend_fragment(poset: ContextPoset, extra, *, node_cap: int = DEFAULT_NODE_CAP,
                    tol: float = DEFAULT_TOL) -> ContextPoset:
    """New fragment with additional contexts appended (deduplicated)."""
    nodes = list(poset.nodes)
    for v in extra:
        if not any(v.equal(w, tol) for w in nodes):
            nodes.append(v)
            if len(nodes) > node_cap:
                raise ResourceLimitError(f"fragment exceeds node cap {node_cap}")
    return ContextPoset(poset.parent, nodes, tol=tol)


# ---------------------------------------------------------------------------
# Gelfand spectra and restriction maps
# ---------------------------------------------------------------------------

class Character:
    """The multiplicative functional picking one atom's coefficient."""

    __slots__ = ("context", "atom_index")

    def __init__(self, context: Context, atom_index: int):
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "atom_index", int(atom_index))

    def __setattr__(self, name, value):
        raise AttributeError("Character is immutable")

    def __call__(self, a: Element, tol: float = DEFAULT_TOL) -> complex:
        return complex(self.context.coefficients(a, tol)[self.atom_index])

    def __repr__(self):
        return f"Character(atom={self.atom_index})"


class GelfandSpectrum:
    """All characters of a context, indexed by its atoms."""

    __slots__ = ("context", "characters")

    def __init__(self, context: Context):
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "characters",
                           tuple(Character(context, i) for i in range(context.num_atoms)))

    def __setattr__(self, name, value):
        raise AttributeError("GelfandSpectrum is immutable")

    def __len__(self):
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, i):
        return self.characters[i]


def gelfand_spectrum(v: Context) -> GelfandSpectrum:
    return GelfandSpectrum(v)


def restriction(v_small: Context, v_big: Context, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    """Character restriction Σ(v_big) → Σ(v_small) as an atom-index map.

    Entry i names the atom of v_small dominating atom i of v_big; requires
    v_small ≤ v_big.
    """
    if not leq(v_small, v_big, tol):
        raise DomainError("restriction requires the first context below the second")
    out = []
    for p in v_big.atoms:
        hits = [j for j, q in enumerate(v_small.atoms) if _dominated(q, p, tol)]
        if len(hits) != 1:
            raise InconsistencyError("atom not dominated by exactly one coarser atom")
        out.append(hits[0])
    return tuple(out)


# ---------------------------------------------------------------------------
# induced maps of contexts
# ---------------------------------------------------------------------------

def conjugate_context(v: Context, u: Element, tol: float = DEFAULT_TOL) -> Context:
    """The context u v u* for a unitary u."""
    if u.parent != v.parent:
        raise StructureMismatchError("unitary from a different algebra")
    if not u.is_unitary(tol):
        raise DomainError("conjugation requires a unitary element")
    ustar = u.adjoint()
    atoms = [multiply(multiply(u, p), ustar) for p in v.atoms]
    return Context(v.parent, atoms, tol=tol, validate=False)


def image_context(f, v: Context, *, tol: float = DEFAULT_TOL,
                  validate: bool = True) -> Context:
    """The context f(v) with atoms f(p), zero images dropped.

    ``f`` must behave like a unital Jordan *-map (anything callable on
    elements with a ``codomain`` algebra); a non-projection image raises
    :class:`DomainError`.
    """
    atoms = []
    for p in v.atoms:
        q = f(p)
        if q.norm() <= tol:
            continue
        if validate and not q.is_projection(max(tol, 1e-7)):
            raise DomainError("image of an atom is not a projection; "
                              "the map is not a Jordan *-map")
        atoms.append(q)
    return Context(f.codomain, atoms, tol=tol, validate=validate)


class OrderMap:
    """A node map between finite context posets, checked order-preserving."""

    __slots__ = ("domain", "codomain", "index_map")

    def __init__(self, domain: ContextPoset, codomain: ContextPoset, index_map):
        idx = tuple(int(i) for i in index_map)
        if len(idx) != len(domain):
            raise StructureMismatchError("index map length != number of nodes")
        for i, j in enumerate(idx):
            if not 0 <= j < len(codomain):
                raise StructureMismatchError(f"node {i} maps outside the codomain poset")
        for i in range(len(domain)):
            for j in range(len(domain)):
                if domain.order[i, j] and not codomain.order[idx[i], idx[j]]:
                    raise InconsistencyError("map does not preserve the order")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "index_map", idx)

    def __setattr__(self, name, value):
        raise AttributeError("OrderMap is immutable")

    def __call__(self, i: int) -> int:
        return self.index_map[i]

    def image_node(self, i: int) -> Context:
        return self.codomain.nodes[self.index_map[i]]

    def is_order_isomorphism(self) -> bool:
        if len(self.domain) != len(self.codomain):
            return False
        if len(set(self.index_map)) != len(self.index_map):
            return False
        for i in range(len(self.domain)):
            for j in range(len(self.domain)):
                if bool(self.domain.order[i, j]) != bool(
                        self.codomain.order[self.index_map[i], self.index_map[j]]):
                    return False
        return True


def induced_order_map(f, poset: ContextPoset, *, codomain: ContextPoset | None = None,
                      tol: float = DEFAULT_TOL) -> OrderMap:
    """The map V ↦ f(V) on a fragment, for a unital Jordan *-map f.

    With ``codomain=None`` the image fragment is built from the images
    themselves; otherwise every image must already be a node of ``codomain``
    (a :class:`FragmentEscapeError` names the escaping nodes).
    """
    from .errors import FragmentEscapeError

    images = [image_context(f, v, tol=tol) for v in poset.nodes]
    if codomain is None:
        target_nodes: list[Context] = []
        idx = []
        for img in images:
            found = next((k for k, w in enumerate(target_nodes) if w.equal(img, tol)), None)
            if found is None:
                target_nodes.append(img)
                found = len(target_nodes) - 1
            idx.append(found)
        codomain = ContextPoset(f.codomain, target_nodes, tol=tol)
        return OrderMap(poset, codomain, idx)
    idx = []
    escaping = []
    for i, img in enumerate(images):
        k = codomain.index_of(img, tol)
        if k is None:
            escaping.append(i)
        else:
            idx.append(k)
    if escaping:
        raise FragmentEscapeError(
            f"images of nodes {escaping} are not in the codomain fragment", escaping)
    return OrderMap(poset, codomain, idx)
