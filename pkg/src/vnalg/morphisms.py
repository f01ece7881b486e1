"""Verdicts on linear maps: Jordan/*-structure, orientation, diagrams.

The headline equivalence realised here: for a Jordan *-isomorphism f the
following agree — f preserves commutators, f intertwines the commutator
derivations (δ-form), f intertwines their one-parameter flows, f is
classified multiplicative on every corner (c = 1), and the induced maps make
the context and presheaf diagrams commute at every sampled node and time.
The two diagram checks evaluate both composites nodewise by direct
computation, so they need no closure assumptions on the fragments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (DEFAULT_TOL, Element, FdAlgebra, _scale, commutator,
                      distance, is_central_projection, jordan_product,
                      multiply, unitary_exp)
from .contexts import (DEFAULT_ATOM_CAP, DEFAULT_NODE_CAP, Context,
                       ContextPoset, atom_matching, conjugate_context,
                       context_distance, image_context, induced_order_map,
                       locate_atom, poset_fragment)
from .derivations import DEFAULT_TIMES, delta
from .errors import DomainError, InconsistencyError
from .maps import JordanMap
from .presheaf import PresheafFragment, build_presheaf, induced_presheaf_morphism

CLASSIFICATIONS = ("vn_isomorphism", "anti_isomorphism", "mixed",
                   "jordan_only", "not_jordan")


@dataclass
class OrientedMapReport:
    """Aggregated verdicts, residuals, and witnesses for one map."""

    map_label: str
    is_jordan: bool = False
    is_star: bool = False
    preserves_commutators: bool | None = None
    preserves_orientation_delta: bool | None = None
    preserves_orientation_flow: bool | None = None
    context_diagram_ok: bool | None = None
    presheaf_diagram_ok: bool | None = None
    classification: str = "not_jordan"
    splitting_c_mask: tuple[int, ...] | None = None
    residuals: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def verdicts(self) -> dict:
        return {
            "is_jordan": self.is_jordan,
            "is_star": self.is_star,
            "preserves_commutators": self.preserves_commutators,
            "preserves_orientation_delta": self.preserves_orientation_delta,
            "preserves_orientation_flow": self.preserves_orientation_flow,
            "context_diagram_ok": self.context_diagram_ok,
            "presheaf_diagram_ok": self.presheaf_diagram_ok,
            "classification": self.classification,
        }

    def to_dict(self) -> dict:
        out = {"map": self.map_label}
        out.update(self.verdicts())
        out["splitting_c_mask"] = (list(self.splitting_c_mask)
                                   if self.splitting_c_mask is not None else None)
        out["residuals"] = dict(self.residuals)
        out["witnesses"] = dict(self.witnesses)
        out["warnings"] = list(self.warnings)
        out["failures"] = list(self.failures)
        out["config"] = dict(self.config)
        return out


# ---------------------------------------------------------------------------
# pointwise structure checks
# ---------------------------------------------------------------------------

def _jordan_star_detail(f: JordanMap, tol: float):
    basis = f.domain.hermitian_basis()
    jordan_res, witness = 0.0, None
    for i, a in enumerate(basis):
        fa = f(a)
        for j, b in enumerate(basis):
            lhs = f(jordan_product(a, b))
            rhs = jordan_product(fa, f(b))
            r = distance(lhs, rhs) / _scale(lhs.norm(), rhs.norm())
            if r > jordan_res:
                jordan_res, witness = r, {"a": basis.labels[i], "b": basis.labels[j]}
    star_res = f.star_defect()
    return (jordan_res <= tol, star_res <= tol, jordan_res, star_res, witness)


def check_jordan_star(f: JordanMap, tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """(Jordan-multiplicative on Hermitian pairs, involution-preserving)."""
    jordan_ok, star_ok, _, _, _ = _jordan_star_detail(f, tol)
    return jordan_ok, star_ok


def _commutator_detail(f: JordanMap, tol: float, rng: np.random.Generator):
    basis = f.domain.hermitian_basis()
    res, rev_res, witness = 0.0, 0.0, None
    for i, a in enumerate(basis):
        fa = f(a)
        for j, b in enumerate(basis):
            lhs = f(commutator(a, b))
            rhs = commutator(fa, f(b))
            r = distance(lhs, rhs) / _scale(lhs.norm(), rhs.norm())
            rev_res = max(rev_res, distance(lhs, -1 * rhs) / _scale(lhs.norm(), rhs.norm()))
            if r > res:
                res, witness = r, {"a": basis.labels[i], "b": basis.labels[j]}
    # independent spot check: multiplicativity on random (non-Hermitian) pairs
    mult_res = 0.0
    for _ in range(4):
        x, y = f.domain.random_element(rng), f.domain.random_element(rng)
        lhs, rhs = f(multiply(x, y)), multiply(f(x), f(y))
        mult_res = max(mult_res, distance(lhs, rhs) / _scale(lhs.norm(), rhs.norm()))
    return res <= tol, res, rev_res, mult_res, witness


def check_commutator_preservation(f: JordanMap, tol: float = DEFAULT_TOL,
                                  rng: np.random.Generator | None = None) -> bool:
    """f([a,b]) = [f(a), f(b)] over all Hermitian basis pairs."""
    _require_jordan_star(f, tol)
    ok, _, _, _, _ = _commutator_detail(f, tol, rng or np.random.default_rng(0))
    return ok


def _orientation_delta_detail(f: JordanMap, tol: float):
    basis = f.domain.hermitian_basis()
    res, witness = 0.0, None
    for i, a in enumerate(basis):
        d_dom = delta(1j * a)
        d_cod = delta(1j * f(a))
        for j, b in enumerate(basis):
            lhs = f(d_dom(b))
            rhs = d_cod(f(b))
            r = distance(lhs, rhs) / _scale(lhs.norm(), rhs.norm())
            if r > res:
                res, witness = r, {"a": basis.labels[i], "b": basis.labels[j]}
    return res <= tol, res, witness


def check_orientation_delta(f: JordanMap, tol: float = DEFAULT_TOL) -> bool:
    """Intertwining f ∘ δ_{ia} = δ_{i f(a)} ∘ f for every basis generator."""
    _require_jordan_star(f, tol)
    ok, _, _ = _orientation_delta_detail(f, tol)
    return ok


def _orientation_flow_detail(f: JordanMap, times, tol: float):
    basis = f.domain.hermitian_basis()
    res, witness = 0.0, None
    for i, a in enumerate(basis):
        fa = f(a)
        for t in times:
            u = unitary_exp(a, t / 2.0)
            w = unitary_exp(fa, t / 2.0)
            ustar, wstar = u.adjoint(), w.adjoint()
            for j, b in enumerate(basis):
                lhs = f(multiply(multiply(u, b), ustar))
                rhs = multiply(multiply(w, f(b)), wstar)
                r = distance(lhs, rhs) / _scale(lhs.norm(), rhs.norm())
                if r > res:
                    res, witness = r, {"a": basis.labels[i], "b": basis.labels[j],
                                       "t": float(t)}
    return res <= tol, res, witness


def check_orientation_flow(f: JordanMap, times=DEFAULT_TIMES,
                           tol: float = DEFAULT_TOL) -> bool:
    """Intertwining f ∘ e^{tδ_{ia}} = e^{tδ_{i f(a)}} ∘ f on sampled times."""
    _require_jordan_star(f, tol)
    ok, _, _ = _orientation_flow_detail(f, times, tol)
    return ok


def _require_jordan_star(f: JordanMap, tol: float):
    jordan_ok, star_ok = check_jordan_star(f, tol)
    if not (jordan_ok and star_ok):
        raise DomainError(f"{f.label!r} is not a Jordan *-map")


# ---------------------------------------------------------------------------
# diagram checks on fragments
# ---------------------------------------------------------------------------

def _context_diagram_detail(f: JordanMap, poset: ContextPoset, a: Element,
                            times, tol: float):
    """Nodewise equality f̃(u V u*) = u' f̃(V) u'* with u = e^{ita/2}."""
    fa = f(a)
    f_images = [image_context(f, v, tol=tol, validate=False) for v in poset.nodes]
    res, witness, ok = 0.0, None, True
    for t in times:
        u = unitary_exp(a, t / 2.0)
        w = unitary_exp(fa, t / 2.0)
        for i, v in enumerate(poset.nodes):
            lhs = image_context(f, conjugate_context(v, u, tol), tol=tol, validate=False)
            rhs = conjugate_context(f_images[i], w, tol)
            d = context_distance(lhs, rhs, max(tol, 1e-7))
            res = max(res, d)
            if not np.isfinite(d):
                ok = False
                if witness is None:
                    witness = {"node": i, "t": float(t)}
    return ok, res, witness


def check_context_diagram(f: JordanMap, poset: ContextPoset, a: Element,
                          times=DEFAULT_TIMES, tol: float = DEFAULT_TOL) -> bool:
    """Does f̃ intertwine the inner flows of a and f(a) on the fragment?

    Both composites are computed directly at every node, so the fragment
    need not be invariant under the sampled conjugations.
    """
    _require_jordan_star(f, tol)
    if not a.is_hermitian(tol):
        raise DomainError("the flow generator must be Hermitian")
    ok, _, _ = _context_diagram_detail(f, poset, a, times, tol)
    return ok


def _presheaf_diagram_detail(f: JordanMap, frag_dom: PresheafFragment,
                             frag_cod: PresheafFragment, times, tol: float):
    """Compare slice∘⟨f̃,G_f⟩ against ⟨f̃,G_f⟩∘slice' nodewise.

    For each codomain basis element b with a = f⁻¹(b): path one conjugates a
    node V by u = e^{ita/2} and then applies f; path two applies f and then
    conjugates by w = e^{itb/2}.  The paths must give equal contexts and
    equal composite character maps into Σ(V).
    """
    # the induced morphism itself must exist over the given fragments
    induced_presheaf_morphism(f, frag_cod, frag_dom, tol)
    finv = f.inverse()
    basis_cod = f.codomain.hermitian_basis()
    poset = frag_dom.base
    f_atom_images = [[f(p) for p in v.atoms] for v in poset.nodes]
    f_images = [
        Context(f.codomain, [q for q in imgs if q.norm() > tol], tol=tol, validate=False)
        for imgs in f_atom_images]
    res, witness, ok = 0.0, None, True
    for bi, b in enumerate(basis_cod):
        a = finv(b)
        for t in times:
            u = unitary_exp(a, t / 2.0)
            w = unitary_exp(b, t / 2.0)
            ustar, wstar = u.adjoint(), w.adjoint()
            for i, v in enumerate(poset.nodes):
                vu = conjugate_context(v, u, tol)
                lhs_ctx = image_context(f, vu, tol=tol, validate=False)
                rhs_ctx = conjugate_context(f_images[i], w, tol)
                match = atom_matching(lhs_ctx, rhs_ctx, max(tol, 1e-7))
                if match is None:
                    ok = False
                    res = max(res, 1.0)
                    if witness is None:
                        witness = {"b": basis_cod.labels[bi], "t": float(t),
                                   "node": i, "reason": "base"}
                    continue
                # composite character maps into Σ(V), one entry per image atom
                comp1, comp2 = {}, {}
                for p_idx, p in enumerate(v.atoms):
                    q1 = f(multiply(multiply(u, p), ustar))
                    if q1.norm() > tol:
                        k = locate_atom(lhs_ctx, q1, max(tol, 1e-7))
                        if k is not None:
                            comp1[k] = p_idx
                    q2 = f_atom_images[i][p_idx]
                    if q2.norm() > tol:
                        k = locate_atom(rhs_ctx, multiply(multiply(w, q2), wstar),
                                        max(tol, 1e-7))
                        if k is not None:
                            comp2[k] = p_idx
                agreed = all(comp1.get(x) == comp2.get(match[x])
                             for x in range(lhs_ctx.num_atoms))
                if not (agreed and len(comp1) == lhs_ctx.num_atoms
                        and len(comp2) == rhs_ctx.num_atoms):
                    ok = False
                    if witness is None:
                        res = max(res, 1.0)
                        witness = {"b": basis_cod.labels[bi], "t": float(t),
                                   "node": i, "reason": "component"}
    return ok, res, witness


def check_presheaf_diagram(f: JordanMap, frag_dom: PresheafFragment,
                           frag_cod: PresheafFragment, times=DEFAULT_TIMES,
                           tol: float = DEFAULT_TOL) -> bool:
    """Does ⟨f̃, G_f⟩ intertwine the inner presheaf flows of b and f⁻¹(b)?

    Requires an invertible Jordan *-map; ``frag_cod`` must contain the image
    of every node of ``frag_dom`` (the induced morphism is constructed, so a
    fragment escape raises).  The flow legs are computed directly nodewise.
    """
    _require_jordan_star(f, tol)
    ok, _, _ = _presheaf_diagram_detail(f, frag_dom, frag_cod, times, tol)
    return ok


# ---------------------------------------------------------------------------
# classification by the splitting central projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _CornerVerdicts:
    classification: str
    c_mask: tuple[int, ...]
    mult_residuals: tuple[float, ...]
    anti_residuals: tuple[float, ...]


def _classify_detail(f: JordanMap, *, codomain_product=None, tol: float,
                     rng: np.random.Generator, corner_samples: int = 8) -> _CornerVerdicts:
    prod = codomain_product if codomain_product is not None else multiply
    finv = f.inverse()
    cod = f.codomain
    mask, mult_rs, anti_rs = [], [], []
    for k, n in enumerate(cod.block_dims):
        z = cod.block_identity(k)
        w = finv(z)
        if not (w.is_projection(max(tol, 1e-7)) and is_central_projection(w, max(tol, 1e-7))):
            raise InconsistencyError(
                f"preimage of the central projection of block {k} is not central; "
                f"{f.label!r} is not a Jordan isomorphism of the expected kind")
        corner = [c for c in (multiply(multiply(w, b), w)
                              for b in f.domain.hermitian_basis()) if c.norm() > tol]
        pairs = [(x, y) for x in corner for y in corner]
        for _ in range(corner_samples):
            r1 = multiply(multiply(w, f.domain.random_element(rng)), w)
            r2 = multiply(multiply(w, f.domain.random_element(rng)), w)
            pairs.append((r1, r2))
        mult_res = anti_res = 0.0
        for x, y in pairs:
            lhs = f(multiply(x, y))
            fx, fy = f(x), f(y)
            scale = _scale(lhs.norm())
            mult_res = max(mult_res, distance(lhs, prod(fx, fy)) / scale)
            anti_res = max(anti_res, distance(lhs, prod(fy, fx)) / scale)
        mult_ok, anti_ok = mult_res <= tol, anti_res <= tol
        if not (mult_ok or anti_ok):
            raise InconsistencyError(
                f"corner {k} of {f.label!r} is neither multiplicative nor "
                f"anti-multiplicative (residuals {mult_res:.2e} / {anti_res:.2e})")
        mask.append(1 if mult_ok else 0)
        mult_rs.append(mult_res)
        anti_rs.append(anti_res)
    nonabelian = [k for k, n in enumerate(cod.block_dims) if n >= 2]
    if not nonabelian or all(mask[k] for k in nonabelian):
        label = "vn_isomorphism"
    elif not any(mask[k] for k in nonabelian):
        label = "anti_isomorphism"
    else:
        label = "mixed"
    return _CornerVerdicts(label, tuple(mask), tuple(mult_rs), tuple(anti_rs))


def splitting_projection(algebra: FdAlgebra, mask) -> Element:
    """The central projection with the given per-block 0/1 pattern."""
    out = algebra.zero()
    for k, bit in enumerate(mask):
        if bit:
            out = out + algebra.block_identity(k)
    return out


def classify(f: JordanMap, *, codomain_product=None, tol: float = DEFAULT_TOL,
             rng: np.random.Generator | None = None) -> OrientedMapReport:
    """Corner-by-corner multiplicativity verdict and the splitting projection.

    On every minimal central projection of the codomain the map must act
    multiplicatively or anti-multiplicatively (unanimously over a spanning
    set plus random samples); abelian corners count as multiplicative.  The
    optional ``codomain_product`` classifies f against a twisted target
    product instead of the native one.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    jordan_ok, star_ok = check_jordan_star(f, tol)
    if not (jordan_ok and star_ok):
        raise DomainError("classification requires a Jordan *-map")
    if not f.is_bijective():
        raise DomainError("classification requires a bijective map")
    detail = _classify_detail(f, codomain_product=codomain_product, tol=tol, rng=rng)
    report = OrientedMapReport(map_label=f.label, is_jordan=True, is_star=True,
                               classification=detail.classification,
                               splitting_c_mask=detail.c_mask)
    report.residuals["corner_multiplicative"] = max(detail.mult_residuals)
    report.residuals["corner_anti_multiplicative"] = max(detail.anti_residuals)
    return report


# ---------------------------------------------------------------------------
# default fragments and the full suite
# ---------------------------------------------------------------------------

def _clustered_diagonal_context(algebra: FdAlgebra) -> Context:
    """Diagonal context with paired eigenvalues on blocks of size ≥ 3.

    Keeps the Bell-number blow-up of down-closures small while still
    separating every direct summand.
    """
    atoms = []
    for b, n in enumerate(algebra.block_dims):
        if n <= 2:
            groups = [[i] for i in range(n)]
        else:
            groups = [list(range(i, min(i + 2, n))) for i in range(0, n, 2)]
        for grp in groups:
            atom = algebra.zero()
            for i in grp:
                atom = atom + algebra.matrix_unit(b, i, i)
            atoms.append(atom)
    return Context(algebra, atoms, validate=False)


def default_fragment(algebra: FdAlgebra, rng: np.random.Generator | None = None, *,
                     atom_cap: int = DEFAULT_ATOM_CAP,
                     node_cap: int = DEFAULT_NODE_CAP,
                     tol: float = DEFAULT_TOL) -> ContextPoset:
    """A small discriminating fragment: a diagonal seed plus a generic tilt."""
    rng = rng if rng is not None else np.random.default_rng(0)
    seed = _clustered_diagonal_context(algebra)
    tilted = conjugate_context(seed, algebra.random_unitary(rng), tol)
    return poset_fragment([seed, tilted], atom_cap=atom_cap, node_cap=node_cap, tol=tol)


def image_fragment(f: JordanMap, poset: ContextPoset, tol: float = DEFAULT_TOL) -> ContextPoset:
    """The closure fragment containing every f-image of the given nodes."""
    return induced_order_map(f, poset, tol=tol).codomain


def theorem_suite(f: JordanMap, fragment: ContextPoset | None = None,
                  times=None, *, tol: float = DEFAULT_TOL,
                  rng: np.random.Generator | None = None,
                  codomain_product=None,
                  atom_cap: int = DEFAULT_ATOM_CAP,
                  node_cap: int = DEFAULT_NODE_CAP) -> OrientedMapReport:
    """Run every check on one map and assert the theorem equivalences.

    The six verdicts must agree for a bijective Jordan *-map: any mismatch is
    an implementation failure (recorded in ``failures``), never a property of
    the map.  Hypothesis violations (C ⊕ C, type I_2 summands) only produce
    warnings.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    times = tuple(times) if times is not None else DEFAULT_TIMES
    report = OrientedMapReport(map_label=f.label)
    report.config = {"tolerance": tol, "times": [float(t) for t in times],
                     "atom_cap": atom_cap, "node_cap": node_cap}
    for algebra, side in ((f.domain, "domain"), (f.codomain, "codomain")):
        if algebra.is_C_plus_C:
            report.warnings.append(f"{side} is isomorphic to C⊕C; "
                                   "the completeness theorems exclude this case")
        if algebra.has_I2_summand:
            report.warnings.append(f"{side} has a type I_2 summand; "
                                   "the completeness theorems exclude this case")

    jordan_ok, star_ok, jres, sres, jwit = _jordan_star_detail(f, tol)
    report.is_jordan, report.is_star = jordan_ok, star_ok
    report.residuals["jordan"] = jres
    report.residuals["star"] = sres
    if jwit:
        report.witnesses["jordan"] = jwit
    if not (jordan_ok and star_ok):
        report.classification = "not_jordan"
        return report

    ok, cres, rev_res, mult_res, cwit = _commutator_detail(f, tol, rng)
    report.preserves_commutators = ok
    report.residuals["commutator"] = cres
    report.residuals["commutator_reversal"] = rev_res
    report.residuals["multiplicativity_spot_check"] = mult_res
    if cwit:
        report.witnesses["commutator"] = cwit

    ok, dres, dwit = _orientation_delta_detail(f, tol)
    report.preserves_orientation_delta = ok
    report.residuals["orientation_delta"] = dres
    if dwit:
        report.witnesses["orientation_delta"] = dwit

    ok, fres, fwit = _orientation_flow_detail(f, times, tol)
    report.preserves_orientation_flow = ok
    report.residuals["orientation_flow"] = fres
    if fwit:
        report.witnesses["orientation_flow"] = fwit

    bijective = f.is_bijective()
    if bijective:
        detail = _classify_detail(f, codomain_product=codomain_product, tol=tol, rng=rng)
        report.classification = detail.classification
        report.splitting_c_mask = detail.c_mask
        report.residuals["corner_multiplicative"] = max(detail.mult_residuals)
        report.residuals["corner_anti_multiplicative"] = max(detail.anti_residuals)
    else:
        report.classification = "jordan_only"

    poset = fragment if fragment is not None else default_fragment(
        f.domain, rng, atom_cap=atom_cap, node_cap=node_cap, tol=tol)
    basis = f.domain.hermitian_basis()
    ctx_ok, ctx_res, ctx_wit = True, 0.0, None
    for i, a in enumerate(basis):
        ok, r, wit = _context_diagram_detail(f, poset, a, times, tol)
        if not ok and ctx_wit is None:
            ctx_wit = dict(wit or {}, a=basis.labels[i])
        ctx_ok &= ok
        ctx_res = max(ctx_res, r if np.isfinite(r) else 1.0)
    report.context_diagram_ok = ctx_ok
    report.residuals["context_diagram"] = ctx_res
    if ctx_wit:
        report.witnesses["context_diagram"] = ctx_wit

    if bijective:
        frag_dom = build_presheaf(poset, tol)
        frag_cod = build_presheaf(image_fragment(f, poset, tol), tol)
        ok, pres, pwit = _presheaf_diagram_detail(f, frag_dom, frag_cod, times, tol)
        report.presheaf_diagram_ok = ok
        report.residuals["presheaf_diagram"] = pres if np.isfinite(pres) else 1.0
        if pwit:
            report.witnesses["presheaf_diagram"] = pwit

    _assert_equivalences(report, bijective)
    return report


def _assert_equivalences(report: OrientedMapReport, bijective: bool) -> None:
    """The theorems force all verdicts to coincide for Jordan *-isomorphisms."""
    if not bijective:
        return
    expected = report.classification == "vn_isomorphism"
    checks = {
        "preserves_commutators": report.preserves_commutators,
        "preserves_orientation_delta": report.preserves_orientation_delta,
        "preserves_orientation_flow": report.preserves_orientation_flow,
        "context_diagram_ok": report.context_diagram_ok,
        "presheaf_diagram_ok": report.presheaf_diagram_ok,
    }
    for name, value in checks.items():
        if value is not None and value != expected:
            report.failures.append(
                f"equivalence violated: {name} = {value} but classification "
                f"= {report.classification}")
    if report.classification == "anti_isomorphism":
        rev = report.residuals.get("commutator_reversal")
        if rev is not None and rev > report.config.get("tolerance", DEFAULT_TOL):
            report.failures.append(
                "anti-isomorphism should reverse all commutators "
                f"(residual {rev:.3e})")
