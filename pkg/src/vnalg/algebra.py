"""Finite direct sums of full complex matrix blocks and their three products.

An algebra here is always M_{n_1} ⊕ … ⊕ M_{n_k} with the blockwise matrix
product, conjugate-transpose involution, and Frobenius-norm closeness.  All
values are immutable after construction and every operation is a pure
function, so objects may be shared freely between threads.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericError, StructureMismatchError

#: Default relative closeness tolerance (Frobenius norm).
DEFAULT_TOL = 1e-9

# Jacobi eigensolver: stop once the off-diagonal Frobenius mass drops below
# this factor times the Frobenius norm of the input.
_JACOBI_FACTOR = 1e-12
_MAX_SWEEPS = 64


def _scale(*norms: float) -> float:
    """Relative-tolerance scale: never below 1 so tiny inputs stay absolute."""
    return max(1.0, *norms) if norms else 1.0


class FdAlgebra:
    """A finite direct sum of full complex matrix blocks.

    ``block_dims`` lists the block sizes (n_1, …, n_k); the complex dimension
    of the algebra is Σ n_j².  Equality ignores the optional ``label``.
    """

    __slots__ = ("block_dims", "label", "_basis")

    def __init__(self, block_dims, label: str | None = None):
        dims = tuple(int(n) for n in block_dims)
        if not dims or any(n < 1 for n in dims):
            raise DomainError(f"block dims must be a nonempty list of positive ints, got {block_dims!r}")
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "_basis", None)

    def __setattr__(self, name, value):
        raise AttributeError("FdAlgebra is immutable")

    def __eq__(self, other):
        return isinstance(other, FdAlgebra) and self.block_dims == other.block_dims

    def __hash__(self):
        return hash(self.block_dims)

    def __repr__(self):
        name = f", label={self.label!r}" if self.label else ""
        return f"FdAlgebra({list(self.block_dims)}{name})"

    @property
    def dim(self) -> int:
        """Complex vector-space dimension Σ n_j²."""
        return sum(n * n for n in self.block_dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def has_I2_summand(self) -> bool:
        """True when some block is a 2×2 factor (type I_2 summand)."""
        return any(n == 2 for n in self.block_dims)

    @property
    def is_C_plus_C(self) -> bool:
        """True exactly for C ⊕ C, i.e. block dims (1, 1)."""
        return self.block_dims == (1, 1)

    # ----- constructors for elements -------------------------------------

    def element(self, blocks) -> "Element":
        return Element(self, blocks)

    def zero(self) -> "Element":
        return Element(self, [np.zeros((n, n), dtype=complex) for n in self.block_dims])

    def identity(self) -> "Element":
        return Element(self, [np.eye(n, dtype=complex) for n in self.block_dims])

    def matrix_unit(self, block: int, i: int, j: int) -> "Element":
        """The element whose only nonzero entry is a 1 at (i, j) of one block."""
        mats = [np.zeros((n, n), dtype=complex) for n in self.block_dims]
        mats[block][i, j] = 1.0
        return Element(self, mats)

    def block_identity(self, block: int) -> "Element":
        mats = [np.zeros((n, n), dtype=complex) for n in self.block_dims]
        np.fill_diagonal(mats[block], 1.0)
        return Element(self, mats)

    def diagonal(self, entries) -> "Element":
        """Diagonal element; ``entries`` is one flat sequence across blocks."""
        vals = list(entries)
        if len(vals) != sum(self.block_dims):
            raise DomainError("wrong number of diagonal entries")
        mats, k = [], 0
        for n in self.block_dims:
            mats.append(np.diag(np.asarray(vals[k:k + n], dtype=complex)))
            k += n
        return Element(self, mats)

    # ----- Hermitian basis and coordinates --------------------------------

    def hermitian_basis(self) -> "HermitianBasis":
        """The standard real basis of the self-adjoint part (cached)."""
        if self._basis is None:
            elems, labels = [], []
            for b, n in enumerate(self.block_dims):
                for i in range(n):
                    elems.append(self.matrix_unit(b, i, i))
                    labels.append(f"D[{b}]{i}")
                for i in range(n):
                    for j in range(i + 1, n):
                        m = [np.zeros((d, d), dtype=complex) for d in self.block_dims]
                        m[b][i, j] = 1.0
                        m[b][j, i] = 1.0
                        elems.append(Element(self, m))
                        labels.append(f"X[{b}]{i}{j}")
                        m = [np.zeros((d, d), dtype=complex) for d in self.block_dims]
                        m[b][i, j] = -1.0j
                        m[b][j, i] = 1.0j
                        elems.append(Element(self, m))
                        labels.append(f"Y[{b}]{i}{j}")
            object.__setattr__(self, "_basis", HermitianBasis(self, tuple(elems), tuple(labels)))
        return self._basis

    def complex_coordinates(self, x: "Element") -> np.ndarray:
        """Coordinates of any element in the standard Hermitian basis.

        The standard basis spans the algebra over C; for Hermitian ``x`` the
        coordinates are real.  Closed form: diagonal entries, then for each
        i < j the pair (Re-part, minus-Im-part) read off the (i, j) entries.
        """
        if x.parent != self:
            raise StructureMismatchError("element belongs to a different algebra")
        coords = []
        for b, n in enumerate(self.block_dims):
            m = x.blocks[b]
            coords.extend(m[i, i] for i in range(n))
            for i in range(n):
                for j in range(i + 1, n):
                    coords.append((m[i, j] + m[j, i]) / 2.0)
                    coords.append((m[j, i] - m[i, j]) / 2.0j)
        return np.asarray(coords, dtype=complex)

    # ----- random samples --------------------------------------------------

    def random_element(self, rng: np.random.Generator) -> "Element":
        mats = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                for n in self.block_dims]
        return Element(self, mats)

    def random_hermitian(self, rng: np.random.Generator) -> "Element":
        x = self.random_element(rng)
        return (x + x.adjoint()) * 0.5

    def random_unitary(self, rng: np.random.Generator) -> "Element":
        return unitary_exp(self.random_hermitian(rng), 1.0)

    # ----- center -----------------------------------------------------------

    def central_projections(self) -> list["Element"]:
        """All 2^k sums of block identities, ordered by bitmask (bit j ↔ block j)."""
        out = []
        for mask in range(1 << self.num_blocks):
            mats = []
            for j, n in enumerate(self.block_dims):
                m = np.zeros((n, n), dtype=complex)
                if (mask >> j) & 1:
                    np.fill_diagonal(m, 1.0)
                mats.append(m)
            out.append(Element(self, mats))
        return out

    def central_projection_from_mask(self, mask: int) -> "Element":
        if not 0 <= mask < (1 << self.num_blocks):
            raise DomainError(f"central projection bitmask {mask} out of range")
        return self.central_projections()[mask]


class Element:
    """A block-diagonal complex matrix in a fixed :class:`FdAlgebra`.

    Blocks are stored as read-only complex arrays; all arithmetic returns new
    elements.
    """

    __slots__ = ("parent", "blocks", "_vec")

    def __init__(self, parent: FdAlgebra, blocks):
        mats = []
        if len(blocks) != parent.num_blocks:
            raise StructureMismatchError(
                f"expected {parent.num_blocks} blocks, got {len(blocks)}")
        for n, raw in zip(parent.block_dims, blocks):
            m = np.array(raw, dtype=complex)
            if m.shape != (n, n):
                raise StructureMismatchError(f"block of shape {m.shape}, expected {(n, n)}")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "blocks", tuple(mats))
        object.__setattr__(self, "_vec", None)

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    def vec(self) -> np.ndarray:
        """Flattened concatenation of all blocks (cached)."""
        if self._vec is None:
            v = np.concatenate([b.ravel() for b in self.blocks])
            v.setflags(write=False)
            object.__setattr__(self, "_vec", v)
        return self._vec

    # ----- linear structure -------------------------------------------------

    def _require_same_parent(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if self.parent != other.parent:
            raise StructureMismatchError("elements belong to different algebras")

    def __add__(self, other):
        self._require_same_parent(other)
        return Element(self.parent, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._require_same_parent(other)
        return Element(self.parent, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return Element(self.parent, [-a for a in self.blocks])

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex)):
            return NotImplemented
        return Element(self.parent, [scalar * a for a in self.blocks])

    __rmul__ = __mul__

    def __repr__(self):
        return f"Element({self.parent!r}, norm={self.norm():.4g})"

    # ----- basic maps and scalars --------------------------------------------

    def adjoint(self) -> "Element":
        return Element(self.parent, [a.conj().T for a in self.blocks])

    def trace(self) -> complex:
        return complex(sum(np.trace(a) for a in self.blocks))

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec()))

    def hermitian_parts(self) -> tuple["Element", "Element"]:
        """Pair (h, k) of Hermitians with self = h + i·k."""
        star = self.adjoint()
        return (self + star) * 0.5, (self - star) * (-0.5j)

    # ----- predicates -----------------------------------------------------

    def isclose(self, other: "Element", tol: float = DEFAULT_TOL) -> bool:
        self._require_same_parent(other)
        return distance(self, other) <= tol * _scale(self.norm(), other.norm())

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return self.norm() <= tol

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return distance(self, self.adjoint()) <= tol * _scale(self.norm())

    def is_projection(self, tol: float = DEFAULT_TOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        return distance(multiply(self, self), self) <= tol * _scale(self.norm())

    def is_unitary(self, tol: float = DEFAULT_TOL) -> bool:
        return distance(multiply(self, self.adjoint()), self.parent.identity()) <= tol


class HermitianBasis:
    """Ordered real basis of the self-adjoint part of an algebra."""

    __slots__ = ("parent", "elements", "labels")

    def __init__(self, parent: FdAlgebra, elements, labels=None):
        elems = tuple(elements)
        if len(elems) != parent.dim:
            raise DomainError(f"a Hermitian basis of {parent!r} needs {parent.dim} elements")
        for e in elems:
            if e.parent != parent:
                raise StructureMismatchError("basis element from a different algebra")
            if not e.is_hermitian():
                raise DomainError("basis elements must be Hermitian")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "labels", tuple(labels) if labels else
                           tuple(f"b{i}" for i in range(len(elems))))

    def __setattr__(self, name, value):
        raise AttributeError("HermitianBasis is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def coordinates(self, x: Element, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Real coordinates of a Hermitian element (standard basis only)."""
        if not x.is_hermitian(tol):
            raise DomainError("coordinates are defined for Hermitian elements")
        return self.parent.complex_coordinates(x).real


# ---------------------------------------------------------------------------
# products and involution
# ---------------------------------------------------------------------------

def multiply(a: Element, b: Element) -> Element:
    """Blockwise matrix product ab."""
    a._require_same_parent(b)
    return Element(a.parent, [x @ y for x, y in zip(a.blocks, b.blocks)])


def jordan_product(a: Element, b: Element) -> Element:
    """Symmetrised product a∘b = (ab + ba)/2."""
    a._require_same_parent(b)
    return Element(a.parent, [(x @ y + y @ x) * 0.5 for x, y in zip(a.blocks, b.blocks)])


def commutator(a: Element, b: Element) -> Element:
    """[a, b] = ab − ba."""
    a._require_same_parent(b)
    return Element(a.parent, [x @ y - y @ x for x, y in zip(a.blocks, b.blocks)])


def adjoint(a: Element) -> Element:
    """Blockwise conjugate transpose."""
    return a.adjoint()


def distance(a: Element, b: Element) -> float:
    """Frobenius distance over all blocks."""
    a._require_same_parent(b)
    return float(np.linalg.norm(a.vec() - b.vec()))


def isclose(a: Element, b: Element, tol: float = DEFAULT_TOL) -> bool:
    return a.isclose(b, tol)


# ---------------------------------------------------------------------------
# Hermitian eigenproblem (cyclic Jacobi) and unitary exponentials
# ---------------------------------------------------------------------------

def jacobi_eigh(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of one complex Hermitian matrix by cyclic Jacobi.

    Returns (w, v) with w real ascending and v unitary, mat ≈ v @ diag(w) @ v*.
    Convergence: off-diagonal Frobenius mass below 1e-12·‖mat‖_F.  Adequate
    for the desk-scale blocks (≤ 16) this package targets.
    """
    a = np.array(mat, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return np.array([a[0, 0].real]), v
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return np.zeros(n), v
    thresh = _JACOBI_FACTOR * norm
    for _ in range(_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absb = abs(apq)
                if absb < 1e-300:
                    continue
                phase = apq / absb
                theta = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                sgn = 1.0 if theta >= 0 else -1.0
                t = -sgn / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = (t * c) * np.conj(phase)
                # G = [[c, -conj(s)], [s, c]] on rows/cols (p, q); a ← G* a G
                col_p = a[:, p] * c + a[:, q] * s
                col_q = -a[:, p] * np.conj(s) + a[:, q] * c
                a[:, p], a[:, q] = col_p, col_q
                row_p = a[p, :] * c + a[q, :] * np.conj(s)
                row_q = -a[p, :] * s + a[q, :] * c
                a[p, :], a[q, :] = row_p, row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcol_p = v[:, p] * c + v[:, q] * s
                vcol_q = -v[:, p] * np.conj(s) + v[:, q] * c
                v[:, p], v[:, q] = vcol_p, vcol_q
    else:
        raise NumericError("Jacobi eigensolver did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eig(a: Element, tol: float = DEFAULT_TOL) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-block eigenvalues (ascending) and unitary eigenvector matrices."""
    if not a.is_hermitian(tol):
        raise DomainError("hermitian_eig requires a Hermitian element")
    values, vectors = [], []
    for m in a.blocks:
        w, v = jacobi_eigh((m + m.conj().T) * 0.5)
        values.append(w)
        vectors.append(v)
    return values, vectors


def unitary_exp(a: Element, s: float) -> Element:
    """e^{i·s·a} for Hermitian a, via the Jacobi eigendecomposition."""
    values, vectors = hermitian_eig(a)
    mats = []
    for w, v in zip(values, vectors):
        mats.append((v * np.exp(1j * s * w)) @ v.conj().T)
    return Element(a.parent, mats)


def central_projections(algebra: FdAlgebra) -> list[Element]:
    """All central projections of a finite direct sum of matrix blocks."""
    return algebra.central_projections()


def central_symmetry(c: Element) -> Element:
    """The symmetry z = 2c − 1 attached to a central projection c."""
    return c * 2.0 - c.parent.identity()


def is_central_projection(c: Element, tol: float = DEFAULT_TOL) -> bool:
    """True when every block of c is 0 or the block identity (within tol)."""
    for n, m in zip(c.parent.block_dims, c.blocks):
        if not (np.linalg.norm(m) <= tol or np.linalg.norm(m - np.eye(n)) <= tol):
            return False
    return True


def central_mask(c: Element, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    """Per-block 0/1 pattern of a central projection."""
    if not is_central_projection(c, tol):
        raise DomainError("not a central projection (blocks must be 0 or the identity)")
    return tuple(0 if np.linalg.norm(m) <= tol else 1 for m in c.blocks)
