"""The spectral presheaf over a context fragment and its morphism category.

Spectra are finite discrete character sets, so restriction maps and morphism
components are plain index maps; naturality and the category laws are checked
by exact equality of finite maps.  Arrows follow the two-legged convention: a
base functor running against the arrow plus nodewise character maps.
"""

from __future__ import annotations

from .algebra import DEFAULT_TOL
from .contexts import (ContextPoset, OrderMap, gelfand_spectrum,
                       induced_order_map, locate_atom, restriction)
from .errors import DomainError, InconsistencyError, StructureMismatchError


class PresheafFragment:
    """Spectra over a finite context poset together with restriction maps.

    ``restrictions[(i, j)]`` (defined whenever node_i ≤ node_j) sends each
    character index of node_j to one of node_i.  Instances are treated as
    immutable.
    """

    def __init__(self, base: ContextPoset, spectra, restrictions):
        self.base = base
        self.spectra = tuple(spectra)
        self.restrictions = dict(restrictions)
        if len(self.spectra) != len(base):
            raise StructureMismatchError("one spectrum per node required")

    def __len__(self):
        return len(self.base)

    def spectrum_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.spectra)

    def same_shape(self, other: "PresheafFragment", tol: float = DEFAULT_TOL) -> bool:
        """Node-for-node equal base contexts and spectrum sizes."""
        if self is other:
            return True
        if len(self) != len(other) or self.spectrum_sizes() != other.spectrum_sizes():
            return False
        return all(v.equal(w, tol) for v, w in zip(self.base.nodes, other.base.nodes))


def build_presheaf(poset: ContextPoset, tol: float = DEFAULT_TOL) -> PresheafFragment:
    """Assemble spectra and restriction maps over a fragment."""
    spectra = [gelfand_spectrum(v) for v in poset.nodes]
    restrictions = {}
    for i, j in poset.pairs():
        if i == j:
            restrictions[(i, j)] = tuple(range(len(spectra[i])))
        else:
            restrictions[(i, j)] = restriction(poset.nodes[i], poset.nodes[j], tol)
    frag = PresheafFragment(poset, spectra, restrictions)
    check_restriction_functoriality(frag)
    return frag


def check_restriction_functoriality(frag: PresheafFragment) -> None:
    """Exact composition over every length-2 chain i ≤ j ≤ k."""
    pairs = set(frag.restrictions)
    for (i, j) in pairs:
        for (j2, k) in pairs:
            if j2 != j or (i, k) not in pairs:
                continue
            r_ij, r_jk, r_ik = (frag.restrictions[(i, j)],
                                frag.restrictions[(j, k)],
                                frag.restrictions[(i, k)])
            composed = tuple(r_ij[x] for x in r_jk)
            if composed != r_ik:
                raise InconsistencyError(
                    f"restrictions do not compose along the chain {i} ≤ {j} ≤ {k}")


def pullback(h: OrderMap, source: PresheafFragment, tol: float = DEFAULT_TOL) -> PresheafFragment:
    """The presheaf over h's domain carrying source's spectrum at h(J)."""
    locate = []
    for i in range(len(h.domain)):
        k = source.base.index_of(h.image_node(i), tol)
        if k is None:
            raise DomainError(f"image of node {i} escapes the source presheaf's base")
        locate.append(k)
    spectra = [source.spectra[k] for k in locate]
    restrictions = {}
    for i, j in h.domain.pairs():
        restrictions[(i, j)] = source.restrictions[(locate[i], locate[j])]
    return PresheafFragment(h.domain, spectra, restrictions)


class PresheafMorphism:
    """An arrow between presheaf fragments: base map plus character maps.

    The arrow runs ``source → target`` while ``base_map`` runs between the
    base posets in the opposite direction; ``components[v]`` maps character
    indices of ``source`` at ``base_map(v)`` to character indices of
    ``target`` at node v.
    """

    def __init__(self, source: PresheafFragment, target: PresheafFragment,
                 base_map: OrderMap, components, *, validate: bool = True):
        self.source = source
        self.target = target
        self.base_map = base_map
        self.components = tuple(tuple(int(x) for x in comp) for comp in components)
        if base_map.domain is not target.base and len(base_map.domain) != len(target.base):
            raise StructureMismatchError("base map must start at the target's base")
        if len(self.components) != len(target.base):
            raise StructureMismatchError("one component per target node required")
        for v, comp in enumerate(self.components):
            if len(comp) != len(source.spectra[base_map(v)]):
                raise StructureMismatchError(f"component {v} has the wrong arity")
            size = len(target.spectra[v])
            if any(not 0 <= x < size for x in comp):
                raise StructureMismatchError(f"component {v} maps outside the spectrum")
        if validate:
            self.check_naturality()

    def check_naturality(self) -> None:
        """Components must commute with restrictions on every order pair."""
        for i, j in self.target.base.pairs():
            hi, hj = self.base_map(i), self.base_map(j)
            upstairs = self.source.restrictions[(hi, hj)]
            downstairs = self.target.restrictions[(i, j)]
            lhs = tuple(self.components[i][x] for x in upstairs)
            rhs = tuple(downstairs[x] for x in self.components[j])
            if lhs != rhs:
                raise InconsistencyError(
                    f"naturality square fails for the pair {i} ≤ {j}")

    def __eq__(self, other):
        if not isinstance(other, PresheafMorphism):
            return False
        return (self.base_map.index_map == other.base_map.index_map
                and self.components == other.components
                and self.source.same_shape(other.source)
                and self.target.same_shape(other.target))

    __hash__ = None

    def __repr__(self):
        return (f"PresheafMorphism(nodes={len(self.target)}, "
                f"base={list(self.base_map.index_map)})")


def identity_morphism(frag: PresheafFragment) -> PresheafMorphism:
    base = OrderMap(frag.base, frag.base, range(len(frag.base)))
    comps = [tuple(range(len(s))) for s in frag.spectra]
    return PresheafMorphism(frag, frag, base, comps)


def induced_presheaf_morphism(f, source: PresheafFragment, target: PresheafFragment,
                              tol: float = DEFAULT_TOL) -> PresheafMorphism:
    """The arrow ⟨induced order map, character pullback⟩ of a Jordan *-map f.

    ``target`` lives over f's domain algebra and ``source`` over its codomain
    algebra; every image context must already be a node of ``source``'s base.
    The component at node V sends the character at atom f(p) of f(V) to the
    character at atom p of V.
    """
    base_map = induced_order_map(f, target.base, codomain=source.base, tol=tol)
    components = []
    for v, ctx in enumerate(target.base.nodes):
        img_node = source.base.nodes[base_map(v)]
        comp = [-1] * img_node.num_atoms
        for p_idx, p in enumerate(ctx.atoms):
            q = f(p)
            if q.norm() <= tol:
                continue
            k = locate_atom(img_node, q, tol)
            if k is None or comp[k] != -1:
                raise InconsistencyError("image atoms do not biject onto the image node")
            comp[k] = p_idx
        if any(x < 0 for x in comp):
            raise InconsistencyError("component not total over the image spectrum")
        components.append(tuple(comp))
    return PresheafMorphism(source, target, base_map, components)


def compose(m2: PresheafMorphism, m1: PresheafMorphism,
            tol: float = DEFAULT_TOL) -> PresheafMorphism:
    """Composite m2 ∘ m1; m1's target presheaf must be m2's source.

    Base maps compose the other way round, and the component at node J is
    m2's component there after m1's component at the image node.
    """
    if not m1.target.same_shape(m2.source, tol):
        raise StructureMismatchError("morphisms are not composable")
    base = OrderMap(m2.target.base, m1.source.base,
                    [m1.base_map(m2.base_map(i)) for i in range(len(m2.target.base))])
    components = []
    for v in range(len(m2.target.base)):
        inner = m1.components[m2.base_map(v)]
        outer = m2.components[v]
        components.append(tuple(outer[x] for x in inner))
    return PresheafMorphism(m1.source, m2.target, base, components)


def is_isomorphism(m: PresheafMorphism) -> bool:
    """Order-isomorphic base map and bijective components."""
    if not m.base_map.is_order_isomorphism():
        return False
    for v, comp in enumerate(m.components):
        if len(set(comp)) != len(comp) or len(comp) != len(m.target.spectra[v]):
            return False
    return True
