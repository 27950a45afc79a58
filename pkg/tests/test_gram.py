from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from detkernel.basis import (REAL_LINE, SYMMETRIC_UNIT, UNIT, FunctionSet, Interval,
                             MonicPoly, Monomial, monomials, wave_functions)
from detkernel.gram import (GramMatrix, SingularNormalizationError, WeightConventionError,
                            cofactor_det, cofactor_matrix, compute_gram, inverse_row_solve,
                            lu_det, signed_minor)
from detkernel.quadrature import gauss_rule

HILBERT2 = [[1, 0.5], [0.5, 1 / 3]]


def hilbert_exact(n):
    return [[Fraction(1, i + k + 1) for k in range(n)] for i in range(n)]


def fraction_det(a):
    """Exact determinant by fraction-valued Gaussian elimination."""
    a = [row[:] for row in a]
    n, det = len(a), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def test_fixture_a_entries():
    s = monomials(2)
    G = compute_gram(s, s, gauss_rule(UNIT, 8))
    np.testing.assert_allclose(G.entries, HILBERT2, rtol=1e-15)
    assert G.det_C == pytest.approx(1 / 12, rel=1e-14)
    assert G.rank == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_monomial_gram_is_hilbert(n):
    s = monomials(n)
    G = compute_gram(s, s, gauss_rule(UNIT, 40))
    exact = hilbert_exact(n)
    np.testing.assert_allclose(G.entries, np.array(exact, dtype=float), rtol=1e-14)
    assert G.det_C == pytest.approx(float(fraction_det(exact)), rel=1e-9)


def test_orthonormal_legendre_gives_identity():
    ws = wave_functions("legendre", 3)
    G = compute_gram(ws, ws, gauss_rule(SYMMETRIC_UNIT, 40))
    np.testing.assert_allclose(G.entries, np.eye(3), atol=1e-10)
    assert G.det_C == pytest.approx(1.0, abs=1e-10)


def test_orthonormal_hermite_gives_identity():
    ws = wave_functions("hermite", 6)
    G = compute_gram(ws, ws, gauss_rule(REAL_LINE, 40))
    np.testing.assert_allclose(G.entries, np.eye(6), atol=1e-10)


def test_degenerate_example_rank_one():
    phi = FunctionSet((Monomial(0), Monomial(1)), SYMMETRIC_UNIT)
    psi = FunctionSet((MonicPoly("legendre", 2), Monomial(0)), SYMMETRIC_UNIT)
    G = compute_gram(phi, psi, gauss_rule(SYMMETRIC_UNIT, 20))
    np.testing.assert_allclose(G.entries, [[0, 2], [0, 0]], atol=1e-14)
    assert abs(G.det_C) < 1e-14
    assert G.rank == 1
    assert not G.nonsingular


def test_signed_minor_examples():
    G = GramMatrix.from_entries(HILBERT2)
    assert signed_minor(G, 1, 1) == pytest.approx(1 / 3)
    assert signed_minor(G, 1, 2) == pytest.approx(-1 / 2)
    assert signed_minor(G, 2, 1) == pytest.approx(-1 / 2)
    assert signed_minor(G, 2, 2) == pytest.approx(1.0)
    assert signed_minor(GramMatrix.from_entries([[3.0]]), 1, 1) == 1.0
    with pytest.raises(IndexError):
        signed_minor(G, 3, 1)


def test_minor_orientation_on_nonsymmetric_matrix():
    # C_lj removes row j and column l; with G = [[a, b], [c, d]]: C_12 = -b, C_21 = -c
    G = GramMatrix.from_entries([[1.0, 2.0], [3.0, 4.0]])
    assert signed_minor(G, 1, 2) == pytest.approx(-2.0)
    assert signed_minor(G, 2, 1) == pytest.approx(-3.0)


def test_inverse_row_solve_examples():
    np.testing.assert_allclose(inverse_row_solve(GramMatrix.from_entries(np.eye(4))), np.eye(4))
    M = inverse_row_solve(GramMatrix.from_entries(HILBERT2))
    np.testing.assert_allclose(M, [[4, -6], [-6, 12]], rtol=1e-13)


def test_inverse_row_solve_singular():
    with pytest.raises(SingularNormalizationError) as info:
        inverse_row_solve(GramMatrix.from_entries([[0.0, 2.0], [0.0, 0.0]]))
    assert info.value.rank == 1


def test_random_5x5_inverse():
    rng = np.random.default_rng(12)
    a = rng.normal(size=(5, 5)) + 5 * np.eye(5)
    M = inverse_row_solve(GramMatrix.from_entries(a))
    np.testing.assert_allclose(M @ a, np.eye(5), atol=1e-11)


def test_lu_det_and_cofactor_det_agree_on_fixed_matrix():
    a = np.array([[2.0, -1, 0, 3], [1, 4, 2, -2], [0, 5, -3, 1], [7, 0, 1, 1]])
    exact = fraction_det([[Fraction(int(v)) for v in row] for row in a])
    assert lu_det(a) == pytest.approx(float(exact), rel=1e-13)
    assert cofactor_det(a) == float(exact)


def test_non_finite_entry_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        GramMatrix.from_entries([[1.0, np.nan], [0.0, 1.0]])


def test_weight_convention_checks():
    ws = wave_functions("hermite", 2)
    mono = FunctionSet((Monomial(0), Monomial(1)), REAL_LINE)
    with pytest.raises(WeightConventionError):
        compute_gram(mono, mono, gauss_rule(REAL_LINE, 10))
    with pytest.raises(WeightConventionError):
        compute_gram(ws, mono, gauss_rule(REAL_LINE, 10))
    # truncated plain rule is fine for decaying sets, not for bare polynomials
    G = compute_gram(ws, ws, gauss_rule(Interval(-12, 12), 120))
    np.testing.assert_allclose(G.entries, np.eye(2), atol=1e-10)
    with pytest.raises(WeightConventionError):
        compute_gram(mono, mono, gauss_rule(Interval(-12, 12), 20))
    with pytest.raises(ValueError, match="domain mismatch"):
        compute_gram(monomials(2), FunctionSet((Monomial(0), Monomial(1)), SYMMETRIC_UNIT),
                     gauss_rule(UNIT, 4))
    with pytest.raises(ValueError, match="sizes"):
        compute_gram(monomials(2), monomials(3), gauss_rule(UNIT, 4))


def test_to_dict():
    d = GramMatrix.from_entries(HILBERT2).to_dict()
    assert d["rank"] == 2 and d["n"] == 2
    assert d["det"] == pytest.approx(1 / 12)


well_conditioned = arrays(np.float64, st.tuples(st.integers(1, 6)).map(lambda t: (t[0], t[0])),
                          elements=st.floats(-2, 2, allow_nan=False, allow_subnormal=False))


@settings(max_examples=80, deadline=None)
@given(well_conditioned)
def test_laplace_identity(a):
    G = GramMatrix.from_entries(a)
    n = G.n
    scale = max(1.0, float(np.max(np.abs(a)))) ** n
    for j in range(1, n + 1):
        expansion = sum(a[j - 1, l - 1] * signed_minor(G, l, j) for l in range(1, n + 1))
        assert abs(expansion - G.det_C) <= 1e-10 * scale


@settings(max_examples=80, deadline=None)
@given(well_conditioned)
def test_lu_det_matches_cofactor_expansion(a):
    G = GramMatrix.from_entries(a)
    scale = max(1.0, float(np.max(np.abs(a)))) ** G.n
    assert abs(G.det_C - cofactor_det(a)) <= 1e-10 * scale


@settings(max_examples=80, deadline=None)
@given(well_conditioned)
def test_cofactors_equal_inverse_times_det(a):
    G = GramMatrix.from_entries(a)
    if not G.nonsingular or np.linalg.cond(a) > 1e6:
        return
    adj = cofactor_matrix(G)
    np.testing.assert_allclose(adj, inverse_row_solve(G) * G.det_C, rtol=1e-9,
                               atol=1e-9 * np.max(np.abs(adj)))


def fraction_inverse(a):
    """Gauss-Jordan inverse in exact rationals."""
    n = len(a)
    m = [[Fraction(float(v)) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        m[c] = [v / m[c][c] for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return np.array([[float(v) for v in row[n:]] for row in m])


@pytest.mark.parametrize("n", [4, 6, 7])
def test_refined_inverse_of_hilbert_is_accurate(n):
    # plain LU loses about cond(H) * eps here; refinement recovers working accuracy
    a = np.array(hilbert_exact(n), dtype=float)
    exact = fraction_inverse(a)
    M = inverse_row_solve(GramMatrix.from_entries(a))
    assert np.max(np.abs(M - exact)) <= 1e-14 * np.max(np.abs(exact))


def test_hilbert_8_falls_below_the_rank_threshold():
    # sigma_min / sigma_max ~ 7e-11 < 1e-9, so the matrix is treated as rank deficient
    G = GramMatrix.from_entries(np.array(hilbert_exact(8), dtype=float))
    assert G.rank == 7 and not G.nonsingular
