"""Acceptance criteria, one test per criterion, each printing PASS/FAIL.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines.  Tolerances are fixed here and never loosened at runtime.
"""

import time

import numpy as np
import pytest

from vnalg import (FdAlgebra, ad_map, build_presheaf, check_dc_axioms,
                   classify, commutator, compose, compose_maps,
                   dc_from_product, default_fragment, diagonal_context,
                   direct_sum_map, distance, flow, identity_map,
                   identity_morphism, image_fragment,
                   induced_presheaf_morphism, jordan_product, multiply,
                   permute_blocks_map, poset_fragment, product_from_dc,
                   restriction, theorem_suite, transpose_map)
from vnalg.derivations import DEFAULT_TIMES
from vnalg.presheaf import check_restriction_functoriality

_T0 = time.time()

M2 = FdAlgebra([2], "M2")
M3 = FdAlgebra([3], "M3")
M23 = FdAlgebra([2, 3], "M2+M3")
M22 = FdAlgebra([2, 2], "M2+M2")
M232 = FdAlgebra([2, 3, 2], "M2+M3+M2")

CATALOG_ALGEBRAS = (M2, M3, M23, M22, M232)


def _report(num: int, description: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:02d} {status} — {description}"
          + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {num}: {description} {detail}"


def test_criterion_01_product_decomposition():
    rng = np.random.default_rng(101)
    worst = 0.0
    for algebra in CATALOG_ALGEBRAS:
        for _ in range(100):
            a, b = algebra.random_element(rng), algebra.random_element(rng)
            worst = max(worst, distance(
                multiply(a, b), jordan_product(a, b) + 0.5 * commutator(a, b)))
    _report(1, "ab = a·b + [a,b]/2 on 100 random pairs per algebra",
            worst < 1e-12, f"max residual {worst:.2e}")


def test_criterion_02_dc_axioms():
    rng = np.random.default_rng(102)
    worst = 0.0
    for algebra in (M2, M3, M23):
        for c in algebra.central_projections():
            rep = check_dc_axioms(dc_from_product(algebra, c), rng=rng)
            worst = max(worst, rep.bracket_residual, rep.annihilation_residual)
    _report(2, "dynamical-correspondence axioms for every central projection",
            worst < 1e-9, f"max residual {worst:.2e}")


def test_criterion_03_product_dc_roundtrip():
    worst = 0.0
    for algebra in (M2, M3, M23):
        basis = algebra.hermitian_basis()
        for c in algebra.central_projections():
            psi = dc_from_product(algebra, c)
            product = product_from_dc(psi)
            for a in basis:
                for b in basis:
                    worst = max(worst, distance(product(a, b),
                                                psi.twisted_product(a, b)))
    _report(3, "product_from_dc(dc_from_product(M, c)) equals the c-twisted product",
            worst < 1e-12, f"max residual {worst:.2e}")


def test_criterion_04_jordan_invariance_of_star_family():
    worst = 0.0
    for algebra in (M2, M3, M23):
        basis = algebra.hermitian_basis()
        for c in algebra.central_projections():
            psi = dc_from_product(algebra, c)
            for a in basis:
                for b in basis:
                    sym = 0.5 * (psi.twisted_product(a, b) + psi.twisted_product(b, a))
                    worst = max(worst, distance(sym, jordan_product(a, b)))
    _report(4, "(a★b + b★a)/2 = a·b for every central projection",
            worst < 1e-12, f"max residual {worst:.2e}")


def test_criterion_05_flow_correctness():
    rng = np.random.default_rng(105)
    series_worst = 0.0
    for algebra in (M2, M23):
        for mask in (0, (1 << algebra.num_blocks) - 1):
            psi = dc_from_product(algebra, algebra.central_projection_from_mask(mask))
            a = algebra.random_hermitian(rng)
            a = a * (1.0 / max(1.0, a.norm()))
            fl = flow(a, psi)
            d = psi(a)
            for t in (1.0, -1.0, 1 / 3, -1 / 3, 0.01):
                for b in algebra.hermitian_basis():
                    series, term = b, b
                    for k in range(1, 13):
                        term = d(term) * (t / k)
                        series = series + term
                    series_worst = max(series_worst, distance(fl.apply(t, b), series))
    group_worst = 0.0
    psi = dc_from_product(M23, M23.identity())
    a = M23.random_hermitian(rng)
    fl = flow(a, psi)
    b = M23.random_element(rng)
    for s in DEFAULT_TIMES:
        for t in DEFAULT_TIMES:
            group_worst = max(group_worst, distance(
                fl.apply(s, fl.apply(t, b)), fl.apply(s + t, b)))
    ok = series_worst < 1e-8 and group_worst < 1e-9
    _report(5, "conjugation matches the 12-term flow series; group law holds",
            ok, f"series {series_worst:.2e}, group law {group_worst:.2e}")


def _catalog(rng):
    u2, u3, u23 = (M2.random_unitary(rng), M3.random_unitary(rng),
                   M23.random_unitary(rng))
    return [
        ("identity on M2", identity_map(M2), True),
        ("Ad_u on M2", ad_map(u2), True),
        ("Ad_u on M3", ad_map(u3), True),
        ("Ad_u on M2+M3", ad_map(u23), True),
        ("transpose on M2", transpose_map(M2), False),
        ("block swap on M2+M2", permute_blocks_map(M22, [1, 0]), True),
        ("Ad_u ⊕ transpose on M2+M3",
         direct_sum_map(ad_map(u2), transpose_map(M3)), False),
    ]


def test_criterion_06_equivalence_chain():
    rng = np.random.default_rng(106)
    fragments = {alg: default_fragment(alg, np.random.default_rng(60))
                 for alg in (M2, M3, M23, M22)}
    all_ok, lines = True, []
    for name, f, should_pass in _catalog(rng):
        report = theorem_suite(f, fragments[f.domain], rng=np.random.default_rng(61))
        verdicts = [report.preserves_commutators,
                    report.preserves_orientation_delta,
                    report.preserves_orientation_flow,
                    report.context_diagram_ok,
                    report.presheaf_diagram_ok]
        expected = report.classification == "vn_isomorphism"
        consistent = all(v == expected for v in verdicts) and not report.failures
        direction_ok = all(v == should_pass for v in verdicts)
        all_ok &= consistent and direction_ok
        lines.append(f"{name}: {report.classification}"
                     f"{'' if consistent and direction_ok else '  <-- INCONSISTENT'}")
    _report(6, "six verdicts mutually consistent across the catalog",
            all_ok, "; ".join(lines))


def test_criterion_07_classification():
    rng = np.random.default_rng(107)
    u3 = M3.random_unitary(rng)
    adu = classify(ad_map(u3), rng=rng)
    tr = classify(transpose_map(M3), rng=rng)
    mixed = classify(direct_sum_map(ad_map(M2.random_unitary(rng)),
                                    transpose_map(M3)), rng=rng)
    ok = (adu.classification == "vn_isomorphism" and adu.splitting_c_mask == (1,)
          and tr.classification == "anti_isomorphism" and tr.splitting_c_mask == (0,)
          and mixed.classification == "mixed" and mixed.splitting_c_mask == (1, 0))
    _report(7, "splitting projections: Ad_u → 1, transpose → 0, mixed → (1,0)",
            ok, f"{adu.splitting_c_mask} {tr.splitting_c_mask} {mixed.splitting_c_mask}")


def test_criterion_08_presheaf_category_laws():
    rng = np.random.default_rng(108)
    poset = poset_fragment([diagonal_context(M3)])
    assert len(poset) >= 5
    f = ad_map(M3.random_unitary(rng))
    g = transpose_map(M3)
    p0 = poset
    p1 = image_fragment(f, p0)
    p2 = image_fragment(g, p1)
    f0, f1, f2 = (build_presheaf(p) for p in (p0, p1, p2))
    mf = induced_presheaf_morphism(f, f1, f0)
    mg = induced_presheaf_morphism(g, f2, f1)
    identity_ok = (compose(mf, identity_morphism(f1)) == mf
                   and compose(identity_morphism(f0), mf) == mf)
    contravariance_ok = (induced_presheaf_morphism(compose_maps(g, f), f2, f0)
                         == compose(mf, mg))
    h = ad_map(M3.random_unitary(rng))
    p3 = image_fragment(h, p2)
    mh = induced_presheaf_morphism(h, build_presheaf(p3), f2)
    associativity_ok = (compose(compose(mf, mg), mh)
                        == compose(mf, compose(mg, mh)))
    ok = identity_ok and contravariance_ok and associativity_ok
    _report(8, "presheaf identity/associativity/contravariance laws hold exactly",
            ok, f"nodes {len(poset)}")


def test_criterion_09_opposite_algebra_witness():
    rng = np.random.default_rng(109)
    opposite = product_from_dc(dc_from_product(M23, M23.zero()))
    ident = identity_map(M23)
    from vnalg import check_jordan_star
    jordan_ok, star_ok = check_jordan_star(ident)
    report = classify(ident, codomain_product=opposite, rng=rng)
    ok = (jordan_ok and star_ok
          and report.classification == "anti_isomorphism"
          and report.classification != "vn_isomorphism")
    _report(9, "identity into the opposite product is Jordan-* but anti",
            ok, report.classification)


def test_criterion_10_restriction_functoriality():
    rng = np.random.default_rng(110)
    fragments = [poset_fragment([diagonal_context(M3)]),
                 default_fragment(M2, rng),
                 default_fragment(M23, rng)]
    checked = 0
    for poset in fragments:
        frag = build_presheaf(poset)
        check_restriction_functoriality(frag)
        # independent recomputation over every length-2 chain
        for i, j in poset.pairs():
            for j2, k in poset.pairs():
                if j2 != j or not poset.order[i, k]:
                    continue
                r_ij = restriction(poset.nodes[i], poset.nodes[j])
                r_jk = restriction(poset.nodes[j], poset.nodes[k])
                r_ik = restriction(poset.nodes[i], poset.nodes[k])
                assert tuple(r_ij[x] for x in r_jk) == r_ik
                checked += 1
    _report(10, "restrictions compose exactly along every length-2 chain",
            True, f"{checked} chains")


def test_suite_runtime_budget():
    elapsed = time.time() - _T0
    print(f"acceptance suite elapsed: {elapsed:.1f}s (budget 60s)")
    assert elapsed < 60.0
