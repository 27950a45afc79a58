"""
Gauss rules and tensor-product integration.

Rules are computed by the Golub-Welsch procedure: nodes are eigenvalues of
the symmetric tridiagonal Jacobi matrix of the family's recurrence.  Weights
use the Christoffel-function form ``mu0 / sum_k q_k(x)^2`` (``q_k``
orthonormal) which stays positive and relatively accurate even when the
weights underflow the eigenvector components.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import FAMILIES, HALF_LINE, REAL_LINE, Interval, OrthoFamily, get_family

MAX_NODES = 256
MAX_LAGUERRE_NODES = 192
MAX_GRID_POINTS = 10**8
DEFAULT_ORACLE_NODES = 40
_CHUNK = 1 << 17


class NonFiniteIntegrandError(ArithmeticError):
    """The integrand returned inf/nan at a quadrature node."""

    def __init__(self, node, value):
        self.node = node
        self.value = value
        super().__init__(f"non-finite integrand value {value!r} at node {node!r}")


class BudgetError(RuntimeError):
    """A tensor-product grid would exceed the evaluation budget."""


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights.

    When ``weight_embedded`` is true the weights absorb the weight function
    of ``family`` and ``integrate_1d(f)`` approximates ``int f(x) w(x) dx``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: Interval
    weight_embedded: bool = False
    family: str | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")

    @property
    def m(self) -> int:
        return len(self.nodes)

    def __repr__(self):
        kind = f"{self.family}, embedded" if self.weight_embedded else "plain"
        return f"QuadratureRule(m={self.m}, [{self.domain.a}, {self.domain.b}], {kind})"


def _newton_polish(nodes, alpha, beta, m, steps=2):
    # monic p_m and p_m' by recurrence; scaled to keep magnitudes bounded
    for _ in range(steps):
        p_prev, p = np.zeros_like(nodes), np.ones_like(nodes)
        d_prev, d = np.zeros_like(nodes), np.zeros_like(nodes)
        for k in range(m):
            b = beta[k - 1] if k > 0 else 0.0
            p_next = (nodes - alpha[k]) * p - b * p_prev
            d_next = p + (nodes - alpha[k]) * d - b * d_prev
            s = 1.0 / np.maximum(np.abs(p_next), 1.0)
            p_prev, p, d_prev, d = p * s, p_next * s, d * s, d_next * s
        step = np.where(d != 0, p / np.where(d != 0, d, 1.0), 0.0)
        nodes = nodes - step
    return nodes


def golub_welsch(family: OrthoFamily, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``m``-point Gauss rule for ``family``'s weight."""
    alpha, beta = family.recurrence(m)
    nodes = eigh_tridiagonal(alpha, np.sqrt(beta), eigvals_only=True)
    nodes = _newton_polish(np.sort(nodes), alpha, beta, m)
    # orthonormal recurrence: sqrt(b_{k+1}) q_{k+1} = (x - a_k) q_k - sqrt(b_k) q_{k-1}
    sb = np.sqrt(np.concatenate([[0.0], beta]))
    q_prev = np.zeros_like(nodes)
    q = np.ones_like(nodes)
    total = np.ones_like(nodes)
    # scaled accumulation to avoid overflow for large m on unbounded domains
    log_scale = np.zeros_like(nodes)
    for k in range(m - 1):
        q_next = ((nodes - alpha[k]) * q - sb[k] * q_prev) / sb[k + 1]
        q_prev, q = q, q_next
        total = total + q * q
        big = total > 1e200
        if np.any(big):
            s = np.where(big, 1e-100, 1.0)
            q, q_prev, total = q * s, q_prev * s, total * s * s
            log_scale = log_scale + np.where(big, 200 * math.log(10), 0.0)
    weights = family.mu0 / total * np.exp(-log_scale)
    return nodes, weights


def gauss_rule(domain, m: int) -> QuadratureRule:
    """Gauss rule matched to a domain.

    ``domain`` is an :class:`Interval` or a family name.  Finite intervals
    get affinely mapped Gauss-Legendre (no embedded weight); the real line
    gets Gauss-Hermite and ``[a, inf)`` gets shifted Gauss-Laguerre, both with
    their weight embedded.
    """
    if not 1 <= m <= MAX_NODES:
        raise ValueError(f"node count m={m} outside 1..{MAX_NODES}")
    if isinstance(domain, str):
        fam = get_family(domain)
        domain = fam.domain
    if not isinstance(domain, Interval):
        raise ValueError(f"unsupported domain tag {domain!r}")
    if domain.is_finite:
        x, w = golub_welsch(FAMILIES["legendre"], m)
        half = 0.5 * (domain.b - domain.a)
        mid = 0.5 * (domain.b + domain.a)
        return QuadratureRule(mid + half * x, half * w, domain)
    if domain == REAL_LINE:
        x, w = golub_welsch(FAMILIES["hermite"], m)
        return QuadratureRule(x, w, domain, True, "hermite")
    if domain == HALF_LINE:
        x, w = golub_welsch(FAMILIES["laguerre"], m)
        if np.any(w <= 0):
            raise ValueError(
                f"Gauss-Laguerre weights underflow double precision for m={m}; "
                f"use m <= {MAX_LAGUERRE_NODES}")
        return QuadratureRule(x, w, domain, True, "laguerre")
    raise ValueError(f"unsupported domain [{domain.a}, {domain.b}]")


def _check_finite(values, nodes):
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        node = nodes[i]
        node = tuple(float(v) for v in node) if np.ndim(node) else float(node)
        raise NonFiniteIntegrandError(node, float(values[i]))


def integrate_1d(f, rule: QuadratureRule) -> float:
    """``sum_i w_i f(x_i)`` with an exactly rounded sum.

    ``f`` is called once with the node array; a scalar return is broadcast.
    """
    values = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    _check_finite(values, rule.nodes)
    return math.fsum(rule.weights * values)


def grid_size(rule: QuadratureRule, d: int) -> int:
    return rule.m ** d


def integrate_nd(f, rule: QuadratureRule, d: int) -> float:
    """Tensor-product integral over ``d`` copies of ``rule``.

    ``f`` receives an ``(N, d)`` array of grid points in lexicographic order
    (last axis fastest) and must return ``N`` values.  The grid is processed
    in chunks and all weighted terms go through one exactly rounded sum, so
    the result does not depend on the chunk size.
    """
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    total = grid_size(rule, d)
    if total > MAX_GRID_POINTS:
        raise BudgetError(
            f"tensor grid m^d = {rule.m}^{d} = {total} exceeds budget {MAX_GRID_POINTS}")
    if d == 1:
        return integrate_1d(lambda x: np.asarray(f(x[:, None]), dtype=float), rule)
    m = rule.m

    def chunks():
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total))
            digits = np.empty((len(idx), d), dtype=np.int64)
            rem = idx
            for axis in range(d - 1, -1, -1):
                digits[:, axis] = rem % m
                rem = rem // m
            pts = rule.nodes[digits]
            w = np.prod(rule.weights[digits], axis=1)
            values = np.broadcast_to(np.asarray(f(pts), dtype=float), (len(idx),))
            _check_finite(values, pts)
            yield w * values

    # fsum consumes the generator lazily: exactly rounded, one chunk in memory
    return math.fsum(itertools.chain.from_iterable(chunks()))
