"""Unital linear maps between block algebras, given on a Hermitian basis.

A map is stored as the images of the standard Hermitian basis of its domain
and extended complex-linearly; this is exactly the complexification of a
real-linear map on the self-adjoint part.  Whether a map is actually Jordan,
*-preserving, or orientation-preserving is decided by the check functions in
:mod:`vnalg.morphisms` — only unitality is enforced here.
"""

from __future__ import annotations

import numpy as np

from .algebra import (DEFAULT_TOL, Element, FdAlgebra, _scale, distance,
                      multiply)
from .errors import DomainError, NumericError, StructureMismatchError

#: Real-linear maps with condition number above this are treated as singular.
COND_CAP = 1e8


class JordanMap:
    """A unital complex-linear map specified by Hermitian-basis images."""

    __slots__ = ("domain", "codomain", "images", "label", "_stacks", "_matrix")

    def __init__(self, domain: FdAlgebra, codomain: FdAlgebra, images,
                 label: str = "map", *, tol: float = DEFAULT_TOL):
        images = tuple(images)
        if len(images) != domain.dim:
            raise StructureMismatchError(
                f"need {domain.dim} basis images, got {len(images)}")
        for img in images:
            if img.parent != codomain:
                raise StructureMismatchError("image lies in the wrong algebra")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "_stacks", None)
        object.__setattr__(self, "_matrix", None)
        one = self(domain.identity())
        if distance(one, codomain.identity()) > tol * _scale(one.norm()):
            raise DomainError(f"map {label!r} is not unital")

    def __setattr__(self, name, value):
        raise AttributeError("JordanMap is immutable")

    def __repr__(self):
        return f"JordanMap({self.label!r}: {self.domain!r} → {self.codomain!r})"

    def _image_stacks(self):
        # one (dim, n, n) tensor per codomain block, for vectorised application
        if self._stacks is None:
            stacks = tuple(
                np.stack([img.blocks[b] for img in self.images])
                for b in range(self.codomain.num_blocks))
            object.__setattr__(self, "_stacks", stacks)
        return self._stacks

    def __call__(self, x: Element) -> Element:
        if x.parent != self.domain:
            raise StructureMismatchError("argument from the wrong algebra")
        coords = self.domain.complex_coordinates(x)
        mats = [np.tensordot(coords, stack, axes=1) for stack in self._image_stacks()]
        return Element(self.codomain, mats)

    # ----- the real-linear matrix on the self-adjoint parts ----------------

    def matrix(self) -> np.ndarray:
        """Codomain-basis coordinates of the images, as columns.

        Real for *-preserving maps; a complex residue means the map fails to
        send Hermitians to Hermitians.
        """
        if self._matrix is None:
            cols = [self.codomain.complex_coordinates(img) for img in self.images]
            object.__setattr__(self, "_matrix", np.array(cols).T)
        return self._matrix

    def star_defect(self) -> float:
        """How far the basis images are from being Hermitian."""
        return max(distance(img, img.adjoint()) for img in self.images)

    def is_bijective(self, cond_cap: float = COND_CAP) -> bool:
        if self.domain.dim != self.codomain.dim:
            return False
        m = self.matrix().real
        return bool(np.linalg.cond(m) <= cond_cap)

    def inverse(self, cond_cap: float = COND_CAP, tol: float = DEFAULT_TOL) -> "JordanMap":
        """Inverse map from the inverted basis-image matrix."""
        if self.domain.dim != self.codomain.dim:
            raise NumericError("map between algebras of different dimension")
        if self.star_defect() > max(tol, 1e-7) * 10:
            raise DomainError("inverse is defined for *-preserving maps only")
        m = self.matrix().real
        cond = np.linalg.cond(m)
        if not np.isfinite(cond) or cond > cond_cap:
            raise NumericError(f"map is numerically singular (cond = {cond:.3g})")
        minv = np.linalg.inv(m)
        dom_basis = self.domain.hermitian_basis()
        images = []
        for j in range(self.codomain.dim):
            img = self.domain.zero()
            for i, c in enumerate(minv[:, j]):
                if c != 0.0:
                    img = img + float(c) * dom_basis[i]
            images.append(img)
        return JordanMap(self.codomain, self.domain, images, f"inv({self.label})")


# ---------------------------------------------------------------------------
# named constructors
# ---------------------------------------------------------------------------

def _images_by_rule(algebra: FdAlgebra, rule) -> list[Element]:
    return [rule(b) for b in algebra.hermitian_basis()]


def identity_map(algebra: FdAlgebra) -> JordanMap:
    return JordanMap(algebra, algebra, _images_by_rule(algebra, lambda b: b), "identity")


def transpose_map(algebra: FdAlgebra, blocks=None) -> JordanMap:
    """Blockwise transpose on the selected blocks (all by default)."""
    chosen = set(range(algebra.num_blocks)) if blocks is None else set(blocks)
    if not chosen <= set(range(algebra.num_blocks)):
        raise DomainError("transpose block index out of range")

    def rule(b: Element) -> Element:
        return Element(algebra, [m.T if j in chosen else m
                                 for j, m in enumerate(b.blocks)])

    tag = "transpose" if blocks is None else f"transpose{sorted(chosen)}"
    return JordanMap(algebra, algebra, _images_by_rule(algebra, rule), tag)


def ad_map(u: Element, label: str | None = None, tol: float = DEFAULT_TOL) -> JordanMap:
    """Conjugation x ↦ u x u* by a unitary."""
    if not u.is_unitary(tol):
        raise DomainError("ad_map requires a unitary element")
    algebra = u.parent
    ustar = u.adjoint()
    rule = lambda b: multiply(multiply(u, b), ustar)
    return JordanMap(algebra, algebra, _images_by_rule(algebra, rule), label or "ad_u")


def permute_blocks_map(algebra: FdAlgebra, perm) -> JordanMap:
    """Reorder the direct summands: block j of the image is block perm[j]."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(algebra.num_blocks)):
        raise DomainError(f"{perm!r} is not a permutation of the blocks")
    codomain = FdAlgebra([algebra.block_dims[p] for p in perm])

    def rule(b: Element) -> Element:
        return Element(codomain, [b.blocks[p] for p in perm])

    return JordanMap(algebra, codomain, _images_by_rule(algebra, rule),
                     f"permute{list(perm)}")


def direct_sum_map(*maps: JordanMap) -> JordanMap:
    """Blockwise direct sum f_1 ⊕ … ⊕ f_m acting summand by summand."""
    if not maps:
        raise DomainError("direct sum of no maps")
    domain = FdAlgebra([n for f in maps for n in f.domain.block_dims])
    codomain = FdAlgebra([n for f in maps for n in f.codomain.block_dims])

    def rule(b: Element) -> Element:
        out, k = [], 0
        for f in maps:
            nb = f.domain.num_blocks
            piece = Element(f.domain, b.blocks[k:k + nb])
            out.extend(f(piece).blocks)
            k += nb
        return Element(codomain, out)

    tag = "⊕".join(f.label for f in maps)
    return JordanMap(domain, codomain, _images_by_rule(domain, rule), tag)


def compose_maps(g: JordanMap, f: JordanMap) -> JordanMap:
    """g ∘ f (apply f first)."""
    if f.codomain != g.domain:
        raise StructureMismatchError("maps are not composable")
    rule = lambda b: g(f(b))
    return JordanMap(f.domain, g.codomain, _images_by_rule(f.domain, rule),
                     f"{g.label}∘{f.label}")


def summand_projection_map(algebra: FdAlgebra, block: int) -> JordanMap:
    """Unital projection onto one direct summand (a non-injective Jordan map)."""
    codomain = FdAlgebra([algebra.block_dims[block]])
    rule = lambda b: Element(codomain, [b.blocks[block]])
    return JordanMap(algebra, codomain, _images_by_rule(algebra, rule),
                     f"summand{block}")


def diagonal_compression_map(algebra: FdAlgebra) -> JordanMap:
    """Entrywise diagonal cut: unital and *-preserving but not Jordan."""
    rule = lambda b: Element(algebra, [np.diag(np.diag(m)) for m in b.blocks])
    return JordanMap(algebra, algebra, _images_by_rule(algebra, rule), "diag-cut")


def from_basis_images(domain: FdAlgebra, codomain: FdAlgebra, images,
                      label: str = "matrix") -> JordanMap:
    """Map given by explicit images of the standard Hermitian basis."""
    return JordanMap(domain, codomain, images, label)
