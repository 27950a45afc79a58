"""
Unitary-ensemble application layer.

An :class:`Ensemble` couples a classical weight with the matrix size ``n``.
Its kernel ``K_n(x, y) = sum_{j<n} phi_j(x) phi_j(y)`` is a sum over
orthonormal wave functions, and the k-point correlation functions are
``R_k = det_k[K_n(x_i, x_j)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import OrthoFamily, get_family, monic_norms, wave_functions
from .gram import lu_det
from .kernel import GeneralizedKernel
from .quadrature import (DEFAULT_ORACLE_NODES, BudgetError, QuadratureRule, gauss_rule,
                         integrate_nd)

CD_SWITCH = 1e-6
MAX_PARTITION_ORACLE_N = 4


@dataclass(frozen=True, eq=False)
class Ensemble:
    family: OrthoFamily
    n: int

    def __post_init__(self):
        object.__setattr__(self, "family", get_family(self.family))
        if self.n < 1:
            raise ValueError("ensemble size n must be >= 1")

    @property
    def norms(self) -> list[float]:
        return monic_norms(self.family, self.n)

    @property
    def wave_functions(self):
        return wave_functions(self.family, self.n)

    @property
    def domain(self):
        return self.family.domain

    def rule(self, m: int = DEFAULT_ORACLE_NODES) -> QuadratureRule:
        """Gauss rule whose embedded weight (if any) is the ensemble weight."""
        return gauss_rule(self.family.domain, m)

    def _values(self, x, strip):
        return self.wave_functions.values(np.asarray(x, dtype=float), strip)

    def kernel_matrix(self, x, y, strip_x=False, strip_y=False) -> np.ndarray:
        """``out[..., i, j] = K_n(x[..., i], y[..., j])``.

        ``strip_*`` drops ``sqrt(w)`` from those points, which is what an
        embedded-weight rule needs for integrated variables.
        """
        fx = self._values(x, strip_x)
        fy = self._values(y, strip_y)
        return fx @ np.swapaxes(fy, -1, -2)


def cd_kernel(E: Ensemble, x, y, strip: bool = False):
    """``K_n(x, y)`` by direct summation of wave-function products."""
    val = np.sum(E._values(x, strip) * E._values(y, strip), axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def cd_kernel_ratio(E: Ensemble, x: float, y: float) -> float:
    """Christoffel-Darboux closed form of ``K_n(x, y)``.

    ``sqrt(w(x) w(y)) [p_n(x) p_{n-1}(y) - p_{n-1}(x) p_n(y)] / (h_{n-1} (x - y))``,
    replaced by its confluent limit when ``|x - y| < CD_SWITCH``.
    """
    fam, n = E.family, E.n
    E.domain.check([x, y])
    h = E.norms[-1]
    sw = float(fam.sqrt_weight(x) * fam.sqrt_weight(y))
    if abs(x - y) < CD_SWITCH:
        t = 0.5 * (x + y)
        pn, dpn = fam.monic_with_derivative(n, t)
        pm, dpm = fam.monic_with_derivative(n - 1, t)
        return sw * float(dpn * pm - dpm * pn) / h
    pn_x, pm_x = fam.monic(n, x), fam.monic(n - 1, x)
    pn_y, pm_y = fam.monic(n, y), fam.monic(n - 1, y)
    return sw * float(pn_x * pm_y - pm_x * pn_y) / (h * (x - y))


def vandermonde_sq(points) -> float:
    """``prod_{i<j} (x_j - x_i)^2`` as a product, not a determinant."""
    x = np.asarray(points, dtype=float).ravel()
    out = 1.0
    for i in range(len(x)):
        d = x[i + 1:] - x[i]
        out *= float(np.prod(d * d))
    return out


def _vandermonde_sq_batch(X):
    out = np.ones(X.shape[0])
    d = X.shape[1]
    for i in range(d):
        for j in range(i + 1, d):
            diff = X[:, j] - X[:, i]
            out *= diff * diff
    return out


def partition_function(E: Ensemble, mode: str = "closed_form",
                       m: int = DEFAULT_ORACLE_NODES) -> float:
    """``Z_n = int prod_i w(x_i) Delta_n(x)^2``.

    ``closed_form`` gives ``n! prod h_{i-1}``; ``oracle`` integrates the
    squared Vandermonde product on an n-fold tensor grid of the ensemble's
    Gauss rule (which supplies the weights).
    """
    if mode == "closed_form":
        return math.factorial(E.n) * math.prod(E.norms)
    if mode == "oracle":
        if E.n > MAX_PARTITION_ORACLE_N:
            raise BudgetError(f"partition oracle limited to n <= {MAX_PARTITION_ORACLE_N}")
        rule = E.rule(m)
        if rule.weight_embedded:
            return integrate_nd(_vandermonde_sq_batch, rule, E.n)
        fam = E.family
        return integrate_nd(
            lambda X: _vandermonde_sq_batch(X) * np.prod(fam.weight(X), axis=1), rule, E.n)
    raise ValueError(f"unknown mode {mode!r}; expected 'closed_form' or 'oracle'")


def correlation_Rk(E: Ensemble, points, strip=None) -> float | np.ndarray:
    """``R_k(x_1..x_k) = det_k[K_n(x_i, x_j)]``.

    ``points`` may be batched with shape ``(..., k)``.  ``strip`` is an
    optional boolean mask over the k points marking integration variables
    (see :meth:`Ensemble.kernel_matrix`).
    """
    x = np.asarray(points, dtype=float)
    x = np.atleast_1d(x)
    k = x.shape[-1]
    if k > E.n:
        raise ValueError(f"k={k} exceeds ensemble size n={E.n}")
    if strip is None:
        mat = E.kernel_matrix(x, x)
    else:
        mask = np.asarray(strip, dtype=bool)
        fx = np.where(mask[:, None], E._values(x, True), E._values(x, False))
        mat = fx @ np.swapaxes(fx, -1, -2)
    if mat.ndim == 2:
        return lu_det(mat)
    return np.linalg.det(mat)


def integrate_Rk(E: Ensemble, fixed, m: int = DEFAULT_ORACLE_NODES) -> float:
    """``int R_k(fixed..., x) dx`` over the last variable."""
    fixed = np.atleast_1d(np.asarray(fixed, dtype=float))
    rule = E.rule(m)
    k = len(fixed) + 1
    mask = np.zeros(k, dtype=bool)
    mask[-1] = rule.weight_embedded

    def integrand(X):
        pts = np.concatenate([np.broadcast_to(fixed, (X.shape[0], k - 1)), X], axis=1)
        return correlation_Rk(E, pts, strip=mask)

    return integrate_nd(integrand, rule, 1)


def integrate_all_Rk(E: Ensemble, k: int, m: int = DEFAULT_ORACLE_NODES) -> float:
    """``int R_k`` over all k variables, which equals ``n! / (n-k)!``."""
    rule = E.rule(m)
    mask = np.full(k, rule.weight_embedded)
    return integrate_nd(lambda X: correlation_Rk(E, X, strip=mask), rule, k)


def generalized_kernel(E: Ensemble, m: int = DEFAULT_ORACLE_NODES) -> GeneralizedKernel:
    """The same kernel built through the overlap-matrix machinery."""
    ws = E.wave_functions
    return GeneralizedKernel.build(ws, ws, E.rule(m))
