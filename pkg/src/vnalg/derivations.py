"""Order derivations, dynamical correspondences, and inner flows.

The operator b ↦ (ab + ba*)/2 attached to a generator a exhausts the order
derivations of a block algebra: Hermitian generators give Jordan
multiplications, anti-Hermitian ones give commutator derivations.  A choice
of central projection c twists the associative product to
a★b = c·ab + (1−c)·ba and thereby fixes the sign of every commutator
derivation — the orientation.  Flows are evaluated by exact unitary
conjugation (eigendecomposition), never by series truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (DEFAULT_TOL, Element, FdAlgebra, _scale,
                      central_symmetry, commutator, distance,
                      is_central_projection, jordan_product, multiply,
                      unitary_exp)
from .contexts import ContextPoset, OrderMap, conjugate_context
from .errors import DomainError, FragmentEscapeError, StructureMismatchError
from .maps import ad_map
from .presheaf import PresheafFragment, PresheafMorphism, induced_presheaf_morphism

#: Default sampling grid for flow-based checks: commensurate and generic times.
DEFAULT_TIMES = (np.pi, -np.pi, np.pi / 2, -np.pi / 2, 1 / 3, -1 / 3, 1e-2, -1e-2)


class OrderDerivation:
    """The operator b ↦ (ab + ba*)/2 for a fixed generator a."""

    __slots__ = ("generator",)

    def __init__(self, generator: Element):
        object.__setattr__(self, "generator", generator)

    def __setattr__(self, name, value):
        raise AttributeError("OrderDerivation is immutable")

    @property
    def parent(self) -> FdAlgebra:
        return self.generator.parent

    def __call__(self, b: Element) -> Element:
        a = self.generator
        b._require_same_parent(a)
        return (multiply(a, b) + multiply(b, a.adjoint())) * 0.5

    def __repr__(self):
        return f"OrderDerivation(gen_norm={self.generator.norm():.4g})"


def delta(a: Element) -> OrderDerivation:
    """The order derivation generated by a (any element, not only Hermitian)."""
    return OrderDerivation(a)


def self_skew_decompose(d: OrderDerivation) -> tuple[OrderDerivation, OrderDerivation]:
    """Unique split into a self-adjoint and a skew-adjoint order derivation.

    The generator a = h + ik splits into Hermitian parts; the skew generator
    is normalised by removing the trace component of k, since adding iλ·1
    (real λ) to a generator does not change the operator.
    """
    h, k = d.generator.hermitian_parts()
    algebra = d.parent
    lam = k.trace().real / algebra.identity().trace().real
    k0 = k - lam * algebra.identity()
    return delta(h), delta(1j * k0)


def is_skew(d: OrderDerivation, tol: float = DEFAULT_TOL) -> bool:
    """Skew order derivations annihilate the unit."""
    value = d(d.parent.identity())
    return value.norm() <= tol * _scale(d.generator.norm())


def skew_is_jordan_derivation(d: OrderDerivation, tol: float = DEFAULT_TOL) -> bool:
    """Leibniz rule d(a∘b) = d(a)∘b + a∘d(b) over all Hermitian basis pairs."""
    basis = d.parent.hermitian_basis()
    for a in basis:
        for b in basis:
            lhs = d(jordan_product(a, b))
            rhs = jordan_product(d(a), b) + jordan_product(a, d(b))
            if distance(lhs, rhs) > tol * _scale(lhs.norm(), rhs.norm(), d.generator.norm()):
                return False
    return True


def operator_residual(d1, d2, basis) -> float:
    """Max pointwise distance of two operators over a spanning set."""
    return max(distance(d1(b), d2(b)) for b in basis)


class DynamicalCorrespondence:
    """The assignment a ↦ (i/2)·z·[a, −] fixed by a central projection c.

    z = 2c − 1 is the attached central symmetry; c = 1 recovers the native
    product's correspondence, c = 0 the opposite one, and mixed c flips the
    commutator blockwise.
    """

    __slots__ = ("parent", "c", "z")

    def __init__(self, parent: FdAlgebra, c: Element, *, tol: float = DEFAULT_TOL):
        if c.parent != parent:
            raise StructureMismatchError("central projection from a different algebra")
        if not is_central_projection(c, tol):
            raise DomainError("orientation requires a central projection "
                              "(each block 0 or the identity)")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "z", central_symmetry(c))

    def __setattr__(self, name, value):
        raise AttributeError("DynamicalCorrespondence is immutable")

    def __call__(self, a: Element, tol: float = DEFAULT_TOL) -> OrderDerivation:
        if not a.is_hermitian(tol):
            raise DomainError("a dynamical correspondence acts on Hermitian elements")
        return delta(1j * multiply(self.z, a))

    def twisted_product(self, x: Element, y: Element) -> Element:
        """a★b = c·ab + (1−c)·ba (complex bilinear as written)."""
        one = self.parent.identity()
        return multiply(self.c, multiply(x, y)) + multiply(one - self.c, multiply(y, x))

    def __repr__(self):
        from .algebra import central_mask
        return f"DynamicalCorrespondence(c={list(central_mask(self.c))})"


def dc_from_product(algebra: FdAlgebra, c: Element, *,
                    tol: float = DEFAULT_TOL) -> DynamicalCorrespondence:
    """The correspondence of the c-twisted product: ψ_a = (i/2)(a★b − b★a)."""
    return DynamicalCorrespondence(algebra, c, tol=tol)


@dataclass(frozen=True)
class DcAxiomsReport:
    """Residuals of the two correspondence axioms plus a linearity probe."""

    bracket_residual: float        # ‖[ψ_a,ψ_b] + [δ_a,δ_b]‖ over basis pairs
    annihilation_residual: float   # ‖ψ_a(a)‖ over basis and random Hermitians
    linearity_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return (self.bracket_residual <= self.tol
                and self.annihilation_residual <= self.tol
                and self.linearity_residual <= self.tol)

    def to_dict(self) -> dict:
        return {
            "bracket_residual": self.bracket_residual,
            "annihilation_residual": self.annihilation_residual,
            "linearity_residual": self.linearity_residual,
            "tolerance": self.tol,
            "passed": self.passed,
        }


def check_dc_axioms(psi, algebra: FdAlgebra | None = None, *,
                    tol: float = DEFAULT_TOL, rng: np.random.Generator | None = None,
                    samples: int = 16) -> DcAxiomsReport:
    """Verify the two axioms of a dynamical correspondence on a basis grid.

    ``psi`` is any callable sending Hermitian elements to order derivations
    (a :class:`DynamicalCorrespondence` works).  Both axioms are operator
    statements; they are applied to every Hermitian basis element rather than
    compared in a flattened matrix representation.  Random Hermitian samples
    guard the "for all a" claims beyond the basis.
    """
    if algebra is None:
        algebra = psi.parent
    if rng is None:
        rng = np.random.default_rng(0)
    basis = algebra.hermitian_basis()

    def jordan_mult(a):
        return delta(a)

    bracket_res = 0.0
    for a in basis:
        psi_a = psi(a)
        d_a = jordan_mult(a)
        for b in basis:
            psi_b = psi(b)
            d_b = jordan_mult(b)
            for x in basis:
                lhs = psi_a(psi_b(x)) - psi_b(psi_a(x))
                rhs = -(d_a(d_b(x)) - d_b(d_a(x)))
                bracket_res = max(bracket_res, distance(lhs, rhs))

    probes = list(basis) + [algebra.random_hermitian(rng) for _ in range(samples)]
    annihilation_res = max(psi(a)(a).norm() / _scale(a.norm() ** 2) for a in probes)

    linearity_res = 0.0
    for _ in range(4):
        a = algebra.random_hermitian(rng)
        b = algebra.random_hermitian(rng)
        s, t = rng.standard_normal(2)
        combined = psi(float(s) * a + float(t) * b)
        for x in basis:
            expected = float(s) * psi(a)(x) + float(t) * psi(b)(x)
            linearity_res = max(linearity_res, distance(combined(x), expected))

    return DcAxiomsReport(bracket_res, annihilation_res, linearity_res, tol)


def product_from_dc(psi):
    """Rebuild the associative product a∘b = a·b − i·ψ_a(b) from ψ.

    Defined on Hermitian pairs and extended complex-bilinearly; for the
    correspondence of a c-twisted product this returns that product.
    """

    def hermitian_piece(a: Element, b: Element) -> Element:
        return jordan_product(a, b) - 1j * psi(a)(b)

    def product(x: Element, y: Element) -> Element:
        x1, x2 = x.hermitian_parts()
        y1, y2 = y.hermitian_parts()
        return (hermitian_piece(x1, y1) - hermitian_piece(x2, y2)
                + 1j * hermitian_piece(x1, y2) + 1j * hermitian_piece(x2, y1))

    return product


class InnerFlow:
    """One-parameter group of inner Jordan *-automorphisms of a generator.

    Under the orientation z = 2c − 1 the slice at time t is conjugation by
    e^{i t z a / 2}; the derivative at 0 is the skew derivation ψ_a.
    """

    __slots__ = ("parent", "generator", "correspondence")

    def __init__(self, generator: Element, correspondence: DynamicalCorrespondence,
                 *, tol: float = DEFAULT_TOL):
        if not generator.is_hermitian(tol):
            raise DomainError("flow generators must be Hermitian")
        if generator.parent != correspondence.parent:
            raise StructureMismatchError("generator and orientation disagree")
        object.__setattr__(self, "parent", generator.parent)
        object.__setattr__(self, "generator", generator)
        object.__setattr__(self, "correspondence", correspondence)

    def __setattr__(self, name, value):
        raise AttributeError("InnerFlow is immutable")

    def unitary(self, t: float) -> Element:
        return unitary_exp(multiply(self.correspondence.z, self.generator), t / 2.0)

    def apply(self, t: float, b: Element) -> Element:
        u = self.unitary(t)
        return multiply(multiply(u, b), u.adjoint())

    def automorphism(self, t: float):
        """The time-t slice as a conjugation map."""
        return ad_map(self.unitary(t), label=f"flow(t={t:.6g})")

    def derivative_at_zero(self, b: Element, step: float = 1e-6) -> Element:
        """Central finite difference of t ↦ flow_t(b) at t = 0."""
        return (self.apply(step, b) - self.apply(-step, b)) * (0.5 / step)


def flow(a: Element, psi: DynamicalCorrespondence, *, tol: float = DEFAULT_TOL) -> InnerFlow:
    """The inner flow of a Hermitian generator under the given orientation."""
    return InnerFlow(a, psi, tol=tol)


def flow_on_contexts(fl: InnerFlow, poset: ContextPoset, t: float,
                     tol: float = DEFAULT_TOL) -> OrderMap:
    """Nodewise conjugation of a fragment by the time-t flow unitary.

    The fragment must be invariant under this conjugation; escaping nodes
    raise :class:`FragmentEscapeError` listing their indices.
    """
    u = fl.unitary(t)
    idx, escaping = [], []
    for i, v in enumerate(poset.nodes):
        image = conjugate_context(v, u, tol)
        k = poset.index_of(image, tol)
        if k is None:
            escaping.append(i)
        else:
            idx.append(k)
    if escaping:
        raise FragmentEscapeError(
            f"flow at t={t} moves nodes {escaping} outside the fragment", escaping)
    return OrderMap(poset, poset, idx)


def flow_on_presheaf(fl: InnerFlow, frag: PresheafFragment, t: float,
                     tol: float = DEFAULT_TOL) -> PresheafMorphism:
    """The induced presheaf morphism of the time-t flow automorphism."""
    return induced_presheaf_morphism(fl.automorphism(t), frag, frag, tol)
