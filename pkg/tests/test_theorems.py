import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detkernel.basis import (HALF_LINE, REAL_LINE, SYMMETRIC_UNIT, UNIT, Composite,
                             FunctionSet, Interval, MonicPoly, Monomial, monomials)
from detkernel.fixtures import get_fixture, rule_for
from detkernel.kernel import GeneralizedKernel
from detkernel.quadrature import BudgetError, gauss_rule
from detkernel.theorems import (SUITES, TheoremReport, dyson_prefactor, free_points,
                                lhs_theorem1, make_report, rhs_theorem1, run_suite,
                                verify_andreief, verify_contraction_k, verify_dyson_classical,
                                verify_knorm, verify_step_iii, verify_theorem1)


def build(name, n=None, m=40, rule=None):
    phi, psi = get_fixture(name, n)
    rule = rule or rule_for(phi, psi, m)
    return GeneralizedKernel.build(phi, psi, rule), rule


def test_theorem1_fixture_a_k1_by_hand():
    K, rule = build("A", m=8)
    # (1/C) int_0^1 [Q(x,x) Q(0,0) - Q(x,0) Q(0,x)] dx with Q = 1 + xy: (4/3 - 1) * 12
    assert lhs_theorem1(K, 1, [0.0], [0.0], rule) == pytest.approx(4.0, rel=1e-13)
    assert rhs_theorem1(K, 1, [0.0], [0.0]) == pytest.approx(4.0, rel=1e-13)


@pytest.mark.parametrize("p,q", [(0.2, 0.7), (0.9, 0.1), (0.5, 0.5)])
def test_theorem1_fixture_a_k1_closed_form(p, q):
    K, rule = build("A", m=8)
    integral = 4 / 3 * (1 + p * q) - (1 + (p + q) / 2 + p * q / 3)
    assert lhs_theorem1(K, 1, [p], [q], rule) == pytest.approx(12 * integral, rel=1e-12)
    assert rhs_theorem1(K, 1, [p], [q]) == pytest.approx(4 - 6 * p - 6 * q + 12 * p * q,
                                                       rel=1e-12, abs=1e-12)


def test_theorem1_k0_is_n_factorial():
    K, rule = build("monomials", 3)
    assert lhs_theorem1(K, 0, [], [], rule) == pytest.approx(6.0, rel=1e-10)
    assert rhs_theorem1(K, 0, [], []) == 6.0


def test_andreief_fixture_a_is_one_sixth():
    phi, psi = get_fixture("A")
    rep = verify_andreief(phi, psi, gauss_rule(UNIT, 8))
    assert rep.passed
    assert rep.lhs == pytest.approx(1 / 6, rel=1e-13)
    assert rep.rhs == pytest.approx(1 / 6, rel=1e-13)


def test_andreief_monomials_n3():
    s = monomials(3)
    rep = verify_andreief(s, s, gauss_rule(UNIT, 10))
    # 3! det(Hilbert_3) = 6 / 2160
    assert rep.lhs == pytest.approx(1 / 360, rel=1e-11)
    assert rep.rhs == pytest.approx(1 / 360, rel=1e-11)


def test_verify_theorem1_report_fields():
    K, rule = build("monomials", 2)
    rep = verify_theorem1(K, 1, [0.0], [0.0], rule=rule)
    assert isinstance(rep, TheoremReport)
    assert rep.theorem_id == "Theorem1" and rep.n == 2 and rep.k == 1
    assert rep.passed and rep.tolerance == 1e-8
    assert rep.oracle_cost == 40
    assert rep.points == {"p": [0.0], "q": [0.0]}


@pytest.mark.parametrize("name", ["monomials", "mixed", "hermite-wave", "hermite-nonorth",
                                  "legendre-wave", "laguerre-wave"])
@pytest.mark.parametrize("n", [2, 3])
def test_theorem1_all_k(name, n):
    K, rule = build(name, n, m=24)
    for k in range(n + 1):
        rep = verify_theorem1(K, k, rule=rule, seed=3)
        assert rep.passed, rep


def test_k_equals_n_is_the_formula_identity():
    K, rule = build("mixed", 3)
    rep = verify_theorem1(K, 3, rule=rule, seed=1)
    assert rep.theorem_id == "StepIII_identity"
    assert rep.tolerance == 1e-10 and rep.passed
    assert verify_step_iii(K, seed=1).passed


def test_oracle_budget_guards():
    K, rule = build("monomials", 5, m=10)
    with pytest.raises(BudgetError):
        verify_theorem1(K, 0, rule=rule)
    s = monomials(5)
    with pytest.raises(BudgetError):
        verify_andreief(s, s, gauss_rule(UNIT, 10))
    K4, r4 = build("monomials", 4, m=10)
    with pytest.raises(BudgetError):
        verify_contraction_k(K4, 4, rule=r4)
    with pytest.raises(BudgetError):
        verify_knorm(K4, 4, rule=r4)


def test_bad_k_and_points():
    K, rule = build("monomials", 2)
    with pytest.raises(ValueError):
        lhs_theorem1(K, 3, [0.1] * 3, [0.2] * 3, rule)
    with pytest.raises(ValueError):
        verify_theorem1(K, 1, [0.1, 0.2], [0.3], rule=rule)


def test_knorm_binomial_example():
    K, rule = build("monomials", 4, m=20)
    rep = verify_knorm(K, 2, rule=rule)
    assert rep.rhs == 6.0
    assert abs(rep.lhs - 6.0) <= 1e-8 * 6


@pytest.mark.parametrize("name", ["mixed", "hermite-nonorth", "laguerre-wave"])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_theorem2(name, n):
    K, rule = build(name, n, m=24)
    for k in range(1, min(n, 3) + 1):
        c = verify_contraction_k(K, k, rule=rule, seed=2)
        nrm = verify_knorm(K, k, rule=rule)
        assert c.passed, c
        assert nrm.passed and nrm.rhs == math.comb(n, k), nrm


def test_dyson_prefactor():
    assert dyson_prefactor(5, 3, 1) == 12
    assert dyson_prefactor(4, 4, 1) == math.factorial(3)
    assert dyson_prefactor(7, 2, 2) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dyson_classical_hermite(n):
    for k in range(n + 1):
        rep = verify_dyson_classical("hermite", n, k, gauss_rule("hermite", 30), seed=5)
        assert rep.passed, rep


def test_dyson_classical_laguerre_point_count():
    with pytest.raises(ValueError):
        verify_dyson_classical("laguerre", 3, 2, points=[0.5])


@pytest.mark.parametrize("name", ["degenerate-rank1", "degenerate-rank2of3",
                                  "degenerate-rank1of3"])
def test_degenerate_theorem1(name):
    K, rule = build(name, m=20)
    assert not K.normalized
    for k in range(K.n + 1):
        rep = verify_theorem1(K, k, rule=rule, seed=4)
        assert rep.passed and rep.mode == "unnormalized", rep


def test_degenerate_rank1_k1_sides_are_finite_and_nonzero():
    K, rule = build("degenerate-rank1", m=20)
    # C*K(p, q) = -2 p p_2(q); pick points where it is not small
    rep = verify_theorem1(K, 1, [0.8], [0.9], rule=rule)
    expected = -2 * 0.8 * (0.81 - 1 / 3)
    assert rep.rhs == pytest.approx(expected, rel=1e-12)
    assert rep.lhs == pytest.approx(expected, rel=1e-10)


def test_degenerate_k2_sides_vanish():
    K, rule = build("degenerate-rank1", m=20)
    rep = verify_theorem1(K, 2, [0.3, -0.6], [0.9, 0.2], rule=rule)
    assert abs(rep.lhs) <= 1e-10 and abs(rep.rhs) <= 1e-10


def test_dressed_set_under_truncated_rule_converges_monotonically():
    K, _ = build("hermite-nonorth", 2)
    p, q = [0.3], [-0.4]
    residuals = []
    for m in (20, 40, 80):
        rule = gauss_rule(Interval(-9.0, 9.0), m)
        Km = GeneralizedKernel.build(K.phi, K.psi, rule)
        residuals.append(verify_theorem1(Km, 1, p, q, rule=rule).abs_residual)
    assert all(b < a or b < 1e-12 for a, b in zip(residuals, residuals[1:]))
    assert residuals[-1] < 1e-12


def test_monotone_convergence_in_oracle_nodes():
    K, _ = build("mixed", 3)
    residuals = [verify_theorem1(K, 1, [0.2], [0.6], rule=gauss_rule(SYMMETRIC_UNIT, m)
                                 ).abs_residual for m in (2, 4, 8)]
    assert all(b < a or b < 1e-12 for a, b in zip(residuals, residuals[1:]))


def test_report_json_round_trip():
    K, rule = build("A", m=8)
    rep = verify_theorem1(K, 1, [0.25], [0.75], rule=rule, fixture="A", seed=0)
    d = json.loads(rep.to_json())
    assert list(d) == sorted(d)
    assert TheoremReport(**d) == rep


def test_make_report_near_zero_uses_scale():
    rep = make_report("Theorem1", 2, 2, 3e-12, 0.0, 1e-10, scale=10.0)
    assert rep.rel_residual == pytest.approx(3e-13) and rep.passed
    rep = make_report("Theorem1", 2, 1, 1.0, 2.0, 1e-8)
    assert rep.rel_residual == 0.5 and not rep.passed
    assert not make_report("Theorem1", 2, 1, float("nan"), 1.0, 1e-8).passed
    with pytest.raises(ValueError):
        make_report("Lemma9", 1, 0, 0.0, 0.0, 1e-8)


@pytest.mark.parametrize("dom", [UNIT, SYMMETRIC_UNIT, REAL_LINE, HALF_LINE])
def test_free_points_reproducible_and_inside(dom):
    a = free_points(dom, 5, seed=11)
    assert np.array_equal(a, free_points(dom, 5, seed=11))
    assert not np.array_equal(a, free_points(dom, 5, seed=12))
    assert all(dom.contains(x) for x in a)
    assert len(set(a.tolist())) == 5
    assert free_points(dom, 0).size == 0


def test_run_suite_names_and_order():
    with pytest.raises(ValueError):
        run_suite("lemma")
    assert "full" in SUITES
    a = run_suite("andreief", n_max=2, oracle_nodes=12)
    b = run_suite("andreief", n_max=2, oracle_nodes=12)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert all(r.passed for r in a)


def test_degenerate_suite_passes():
    reps = run_suite("degenerate", oracle_nodes=16)
    assert reps and all(r.passed for r in reps)
    assert {r.mode for r in reps} == {"unnormalized"}


coefficients = st.floats(-1.0, 1.0, allow_nan=False, allow_subnormal=False)


@st.composite
def random_sets(draw):
    n = draw(st.integers(1, 3))
    phi = tuple(Composite(((1.0, Monomial(i)),)
                          + tuple((draw(coefficients), Monomial(j)) for j in range(i)))
                for i in range(n))
    psi = tuple(Composite(((1.0, MonicPoly("legendre", i)),)
                          + tuple((draw(coefficients), Monomial(j)) for j in range(i)))
                for i in range(n))
    return FunctionSet(phi, SYMMETRIC_UNIT), FunctionSet(psi, SYMMETRIC_UNIT)


@settings(max_examples=25, deadline=None)
@given(random_sets(), st.data())
def test_theorem1_property(sets, data):
    phi, psi = sets
    rule = gauss_rule(SYMMETRIC_UNIT, 12)
    K = GeneralizedKernel.build(phi, psi, rule)
    if not K.normalized or np.linalg.cond(K.gram.entries) > 1e6:
        return
    k = data.draw(st.integers(0, phi.n))
    pts = data.draw(st.lists(st.floats(-1, 1), min_size=2 * k, max_size=2 * k))
    # nearly coincident points make det[Q] cancel to noise; keep them apart
    for group in (pts[:k], pts[k:]):
        if k > 1 and np.min(np.diff(np.sort(group))) < 1e-3:
            return
    rep = verify_theorem1(K, k, pts[:k], pts[k:], rule=rule)
    assert rep.passed, rep


@settings(max_examples=25, deadline=None)
@given(random_sets())
def test_andreief_property(sets):
    phi, psi = sets
    rep = verify_andreief(phi, psi, gauss_rule(SYMMETRIC_UNIT, 12))
    assert rep.passed, rep
