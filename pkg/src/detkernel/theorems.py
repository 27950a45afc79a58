"""
Brute-force verification of the determinant integration identities.

Every ``verify_*`` function computes the left-hand side by nested tensor
quadrature over the raw determinant and the right-hand side from the kernel
formulas, and returns a :class:`TheoremReport`.  When the quadrature rule
embeds the weight, integration variables are evaluated with ``sqrt(w)``
stripped from both the row and the column they occupy; each variable then
carries exactly one factor ``w`` which the rule supplies.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc
from scipy.special import ndtri

from .basis import HALF_LINE, REAL_LINE, FunctionSet, Interval, get_family, wave_functions
from .gram import check_weight_convention, compute_gram, lu_det
from .kernel import BilinearQ, GeneralizedKernel, kernel_det, k_kernel
from .quadrature import (DEFAULT_ORACLE_NODES, BudgetError, QuadratureRule,
                         gauss_rule, grid_size, integrate_nd)

ORACLE_TOL = 1e-8
FORMULA_TOL = 1e-10
MAX_ORACLE_DIM = 4
MAX_CONTRACTION_K = 3
NEAR_ZERO = 1e-10

THEOREM_IDS = ("Dyson", "Theorem1", "Theorem2_contraction", "Theorem2_norm",
               "Andreief", "StepIII_identity")


@dataclass
class TheoremReport:
    theorem_id: str
    n: int
    k: int
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    oracle_cost: int
    tolerance: float
    passed: bool
    mode: str = "normalized"
    fixture: str | None = None
    seed: int | None = None
    points: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def make_report(theorem_id, n, k, lhs, rhs, tol, cost=0, scale=1.0, **extra) -> TheoremReport:
    """Compare ``lhs`` and ``rhs``.

    A right-hand side below ``NEAR_ZERO * scale`` is judged by the absolute
    residual measured in units of ``scale``; otherwise by the relative one.
    """
    if theorem_id not in THEOREM_IDS:
        raise ValueError(f"unknown theorem id {theorem_id!r}")
    lhs, rhs = float(lhs), float(rhs)
    err = abs(lhs - rhs)
    denom = abs(rhs) if abs(rhs) > NEAR_ZERO * scale else scale
    rel = err / denom
    passed = bool(np.isfinite(rel) and rel <= tol)
    return TheoremReport(theorem_id, n, k, lhs, rhs, err, rel, int(cost), tol, passed, **extra)


# -- helpers -------------------------------------------------------------------

def free_points(domain: Interval, count: int, seed: int = 0) -> np.ndarray:
    """Reproducible interior points from a scrambled Halton sequence."""
    if count == 0:
        return np.empty(0)
    u = qmc.Halton(d=1, scramble=True, seed=seed).random(count)[:, 0]
    u = np.clip(u, 1e-6, 1 - 1e-6)
    if domain.is_finite:
        return domain.a + (domain.b - domain.a) * u
    if domain == REAL_LINE:
        return ndtri(u)
    if domain == HALF_LINE:
        return -np.log1p(-u)
    raise ValueError(f"cannot place points on {domain}")


def _split_points(K, k, p_free, q_free, seed):
    if p_free is None or q_free is None:
        pts = free_points(K.phi.domain, 2 * k, seed)
        p_free = pts[:k] if p_free is None else p_free
        q_free = pts[k:] if q_free is None else q_free
    p_free = np.atleast_1d(np.asarray(p_free, dtype=float))
    q_free = np.atleast_1d(np.asarray(q_free, dtype=float))
    if len(p_free) != k or len(q_free) != k:
        raise ValueError(f"need {k} free p and q points, got {len(p_free)} and {len(q_free)}")
    return p_free, q_free


def _guard(rule: QuadratureRule, d: int, limit: int):
    if d > limit:
        raise BudgetError(f"{d}-fold oracle integral exceeds the limit of {limit}")
    return grid_size(rule, d) if d else 0


def dyson_prefactor(c: int, n: int, k: int) -> int:
    """``(c-n+1)(c-n+2)...(c-k)`` in exact integer arithmetic."""
    out = 1
    for m in range(k, n):
        out *= c - m
    return out


def _default_rule(K: GeneralizedKernel, m=DEFAULT_ORACLE_NODES):
    from .fixtures import rule_for
    return rule_for(K.phi, K.psi, m)


# -- Theorem 1 -----------------------------------------------------------------

def _q_block(phi: FunctionSet, psi: FunctionSet, X, p_free, q_free, strip):
    """Batched ``det_n[Q(p_i, q_j)]`` with ``p_i = q_i = X[:, i]`` for the leading rows."""
    N = X.shape[0]
    fx = phi.values(X, strip)
    gx = psi.values(X, strip)
    fp = np.broadcast_to(phi.values(p_free), (N, len(p_free), phi.n))
    gq = np.broadcast_to(psi.values(q_free), (N, len(q_free), psi.n))
    rows = np.concatenate([fx, fp], axis=1)
    cols = np.concatenate([gx, gq], axis=1)
    return np.linalg.det(rows @ np.swapaxes(cols, -1, -2))


def lhs_theorem1(K: GeneralizedKernel, k: int, p_free, q_free,
                 rule: QuadratureRule) -> float:
    """``(1/C) int dx_1..dx_{n-k} det_n[Q(p_i, q_j)]`` by tensor quadrature.

    In unnormalized mode the identity is multiplied by ``C^k``: the result is
    ``C^(k-1)`` times the integral for ``k >= 1`` and the bare integral for
    ``k = 0``.
    """
    n = K.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    p_free, q_free = _split_points(K, k, p_free, q_free, None)
    d = n - k
    _guard(rule, d, MAX_ORACLE_DIM)
    if d == 0:
        raw = lu_det(K.bilinear.matrix(p_free, q_free))
    else:
        strip = check_weight_convention(K.phi, K.psi, rule)
        raw = integrate_nd(lambda X: _q_block(K.phi, K.psi, X, p_free, q_free, strip),
                           rule, d)
    if K.normalized:
        return raw / K.det_C
    return raw * K.det_C ** (k - 1) if k >= 1 else raw


def rhs_theorem1(K: GeneralizedKernel, k: int, p_free, q_free) -> float:
    """``(n-k)! det_k[K(p_i, q_j)]``; in unnormalized mode ``C*K`` entries (and ``n! C`` at k=0)."""
    n = K.n
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    p_free, q_free = _split_points(K, k, p_free, q_free, None)
    val = math.factorial(n - k) * kernel_det(K, p_free, q_free)
    if not K.normalized and k == 0:
        val *= K.det_C
    return val


def _kernel_scale(K: GeneralizedKernel, power: int, seed=0) -> float:
    """Magnitude for near-zero comparisons in unnormalized mode.

    ``max |C*K|`` over sampled points raised to ``power``, floored at 1 so an
    identically vanishing kernel falls back to an absolute test.
    """
    pts = free_points(K.phi.domain, 16, seed + 7919)
    return max(float(np.max(np.abs(K.matrix(pts, pts)))) ** power, 1.0)


def verify_theorem1(K: GeneralizedKernel, k: int, p_free=None, q_free=None,
                    rule: QuadratureRule | None = None, seed: int = 0,
                    tol: float = ORACLE_TOL, fixture: str | None = None) -> TheoremReport:
    rule = rule or _default_rule(K)
    p_free, q_free = _split_points(K, k, p_free, q_free, seed)
    lhs = lhs_theorem1(K, k, p_free, q_free, rule)
    rhs = rhs_theorem1(K, k, p_free, q_free)
    scale = 1.0 if K.normalized else _kernel_scale(K, max(k, 1), seed)
    tid = "StepIII_identity" if k == K.n else "Theorem1"
    return make_report(tid, K.n, k, lhs, rhs, tol if k < K.n else min(tol, FORMULA_TOL),
                       grid_size(rule, K.n - k) if k < K.n else 0, scale,
                       mode=K.mode, fixture=fixture, seed=seed,
                       points={"p": p_free.tolist(), "q": q_free.tolist()})


def verify_step_iii(K: GeneralizedKernel, p=None, q=None, seed: int = 0,
                    fixture: str | None = None) -> TheoremReport:
    """``det_n[K(p_i, q_j)] = det_n[Q(p_i, q_j)] / C`` with no integration."""
    n = K.n
    p, q = _split_points(K, n, p, q, seed)
    lhs = lu_det(K.bilinear.matrix(p, q))
    lhs = lhs / K.det_C if K.normalized else lhs * K.det_C ** (n - 1)
    rhs = kernel_det(K, p, q)
    scale = 1.0 if K.normalized else _kernel_scale(K, n, seed)
    return make_report("StepIII_identity", n, n, lhs, rhs, FORMULA_TOL, 0, scale,
                       mode=K.mode, fixture=fixture, seed=seed,
                       points={"p": p.tolist(), "q": q.tolist()})


# -- Andreief ------------------------------------------------------------------

def verify_andreief(phi: FunctionSet, psi: FunctionSet,
                    rule: QuadratureRule | None = None, tol: float = ORACLE_TOL,
                    fixture: str | None = None) -> TheoremReport:
    """``int det[phi_j(x_i)] det[psi_j(x_i)] = n! det[<i,j>]``."""
    if rule is None:
        from .fixtures import rule_for
        rule = rule_for(phi, psi)
    n = phi.n
    cost = _guard(rule, n, MAX_ORACLE_DIM)
    strip = check_weight_convention(phi, psi, rule)

    def integrand(X):
        return np.linalg.det(phi.values(X, strip)) * np.linalg.det(psi.values(X, strip))

    lhs = integrate_nd(integrand, rule, n)
    G = compute_gram(phi, psi, rule)
    rhs = math.factorial(n) * G.det_C
    scale = math.factorial(n) * max(float(np.max(np.abs(G.entries))), 1e-300) ** n
    return make_report("Andreief", n, 0, lhs, rhs, tol, cost, scale,
                       mode="normalized" if G.nonsingular else "unnormalized",
                       fixture=fixture)


# -- Theorem 2 -----------------------------------------------------------------

def _kk_batch(K: GeneralizedKernel, p, q, strip_p=False, strip_q=False):
    k = p.shape[-1]
    return np.linalg.det(K.matrix(p, q, strip_p, strip_q)) / math.factorial(k)


def verify_contraction_k(K: GeneralizedKernel, k: int, p=None, r=None,
                         rule: QuadratureRule | None = None, seed: int = 0,
                         tol: float = ORACLE_TOL, fixture: str | None = None) -> TheoremReport:
    """``int dq K^(k)(p; q) K^(k)(q; r) = K^(k)(p; r)``.

    In unnormalized mode both sides use ``C*K`` and the right side gains ``C^k``.
    """
    if not 1 <= k <= MAX_CONTRACTION_K:
        raise BudgetError(f"contraction oracle supports 1 <= k <= {MAX_CONTRACTION_K}")
    rule = rule or _default_rule(K)
    cost = _guard(rule, k, MAX_CONTRACTION_K)
    strip = check_weight_convention(K.phi, K.psi, rule)
    p, r = _split_points(K, k, p, r, seed)

    def integrand(Qpts):
        N = Qpts.shape[0]
        P = np.broadcast_to(p, (N, k))
        R = np.broadcast_to(r, (N, k))
        return _kk_batch(K, P, Qpts, False, strip) * _kk_batch(K, Qpts, R, strip, False)

    lhs = integrate_nd(integrand, rule, k)
    rhs = k_kernel(K, p, r)
    scale = 1.0
    if not K.normalized:
        rhs *= K.det_C ** k
        scale = _kernel_scale(K, 2 * k, seed)
    return make_report("Theorem2_contraction", K.n, k, lhs, rhs, tol, cost, scale,
                       mode=K.mode, fixture=fixture, seed=seed,
                       points={"p": p.tolist(), "r": r.tolist()})


def verify_knorm(K: GeneralizedKernel, k: int, rule: QuadratureRule | None = None,
                 tol: float = ORACLE_TOL, fixture: str | None = None) -> TheoremReport:
    """``int dq K^(k)(q; q) = binomial(n, k)`` (times ``C^k`` in unnormalized mode)."""
    if not 1 <= k <= MAX_CONTRACTION_K:
        raise BudgetError(f"normalisation oracle supports 1 <= k <= {MAX_CONTRACTION_K}")
    rule = rule or _default_rule(K)
    cost = _guard(rule, k, MAX_CONTRACTION_K)
    strip = check_weight_convention(K.phi, K.psi, rule)
    lhs = integrate_nd(lambda Q: _kk_batch(K, Q, Q, strip, strip), rule, k)
    rhs = float(math.comb(K.n, k))
    scale = 1.0
    if not K.normalized:
        rhs *= K.det_C ** k
        scale = _kernel_scale(K, k)
    return make_report("Theorem2_norm", K.n, k, lhs, rhs, tol, cost, scale,
                       mode=K.mode, fixture=fixture)


# -- classical Dyson -----------------------------------------------------------

def verify_dyson_classical(family, n: int, k: int, rule: QuadratureRule | None = None,
                           points=None, seed: int = 0,
                           tol: float = ORACLE_TOL) -> TheoremReport:
    """Iterated Dyson theorem for the orthonormal wave-function kernel (``c = n``)."""
    fam = get_family(family)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    ws = wave_functions(fam, n)
    Kn = BilinearQ(ws, ws)
    rule = rule or gauss_rule(fam.domain, DEFAULT_ORACLE_NODES)
    d = n - k
    cost = _guard(rule, d, MAX_ORACLE_DIM)
    x = free_points(fam.domain, k, seed) if points is None else np.atleast_1d(
        np.asarray(points, dtype=float))
    if len(x) != k:
        raise ValueError(f"need {k} free points, got {len(x)}")
    if d == 0:
        lhs = lu_det(Kn.matrix(x, x))
    else:
        strip = check_weight_convention(ws, ws, rule)
        lhs = integrate_nd(lambda X: _q_block(ws, ws, X, x, x, strip), rule, d)
    rhs = dyson_prefactor(n, n, k) * (lu_det(Kn.matrix(x, x)) if k else 1.0)
    return make_report("Dyson", n, k, lhs, rhs, tol, cost, fixture=f"{fam.name}-wave",
                       seed=seed, points={"x": x.tolist()})


# -- batches -------------------------------------------------------------------

SUITES = ("theorem1", "andreief", "theorem2", "dyson", "degenerate", "full")

THEOREM1_FIXTURES = ("monomials", "mixed", "hermite-wave", "hermite-nonorth")


def run_suite(name: str = "full", n_max: int = 4, oracle_nodes: int = DEFAULT_ORACLE_NODES,
              seed: int = 0, points_per_case: int = 1) -> list[TheoremReport]:
    """Run a named batch of verifications; reports come back in a fixed order."""
    from .fixtures import FIXTURES, get_fixture, rule_for

    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    reports: list[TheoremReport] = []
    want = (lambda s: name in (s, "full"))

    def kernel(fx, n):
        phi, psi = get_fixture(fx, n)
        rule = rule_for(phi, psi, oracle_nodes)
        return GeneralizedKernel.build(phi, psi, rule), rule

    if want("theorem1"):
        for fx in THEOREM1_FIXTURES:
            for n in range(2, n_max + 1):
                K, rule = kernel(fx, n)
                for k in range(max(0, n - MAX_ORACLE_DIM), n + 1):
                    for i in range(points_per_case):
                        reports.append(verify_theorem1(K, k, rule=rule, seed=seed + i,
                                                       fixture=f"{fx}:{n}"))
    if want("andreief"):
        for fx in ("monomials", "mixed", "hermite-nonorth"):
            for n in range(1, min(n_max, MAX_ORACLE_DIM) + 1):
                phi, psi = get_fixture(fx, n)
                reports.append(verify_andreief(phi, psi, rule_for(phi, psi, oracle_nodes),
                                               fixture=f"{fx}:{n}"))
    if want("theorem2"):
        for fx in ("monomials", "mixed", "hermite-nonorth"):
            for n in range(1, n_max + 1):
                K, rule = kernel(fx, n)
                for k in range(1, min(n, MAX_CONTRACTION_K) + 1):
                    reports.append(verify_contraction_k(K, k, rule=rule, seed=seed,
                                                        fixture=f"{fx}:{n}"))
                    reports.append(verify_knorm(K, k, rule=rule, fixture=f"{fx}:{n}"))
    if want("dyson"):
        for n in range(1, n_max + 1):
            for k in range(max(0, n - MAX_ORACLE_DIM), n + 1):
                reports.append(verify_dyson_classical(
                    "hermite", n, k, gauss_rule("hermite", oracle_nodes), seed=seed))
    if want("degenerate"):
        for fx in ("degenerate-rank1", "degenerate-rank2of3", "degenerate-rank1of3"):
            n = FIXTURES[fx].sizes[0]
            K, rule = kernel(fx, n)
            for k in range(0, n + 1):
                reports.append(verify_theorem1(K, k, rule=rule, seed=seed, fixture=fx))
            reports.append(verify_andreief(K.phi, K.psi, rule, fixture=fx))
            for k in range(1, n + 1):
                reports.append(verify_contraction_k(K, k, rule=rule, seed=seed, fixture=fx))
                reports.append(verify_knorm(K, k, rule=rule, fixture=fx))
    return reports
