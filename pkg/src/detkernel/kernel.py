"""
The bilinear ``Q_n`` and the generalized self-contracting kernel.

For two sets with overlap matrix ``G`` the kernel is the bilinear form

    K(p, q) = sum_{j,l} phi_j(p) (G^{-1})_{lj} psi_l(q)

which equals the normalised sum of column-replaced overlap determinants.
The first form is used for evaluation, the second is kept as an oracle.
When ``G`` is singular the kernel is stored multiplied through by ``C``
(the adjugate replaces ``C * G^{-1}``) and ``normalized`` is False.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import FunctionSet
from .gram import (GramMatrix, SingularNormalizationError, cofactor_matrix,
                   compute_gram, exact_det, inverse_row_solve, lu_det)
from .quadrature import QuadratureRule

COLUMN_ORACLE_MAX_N = 6


class RankDeficiencyWarning(UserWarning):
    """More kernel points than the rank of the kernel; the determinant is 0."""


def _as_points(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class BilinearQ:
    """``Q_n(x, y) = sum_j phi_j(x) psi_j(y)``."""

    phi: FunctionSet
    psi: FunctionSet

    def __post_init__(self):
        if self.phi.n != self.psi.n:
            raise ValueError(f"set sizes differ: {self.phi.n} vs {self.psi.n}")

    @property
    def n(self) -> int:
        return self.phi.n

    def __call__(self, x, y, strip_x=False, strip_y=False):
        return np.sum(self.phi.values(x, strip_x) * self.psi.values(y, strip_y), axis=-1)

    def matrix(self, p, q, strip_p=False, strip_q=False) -> np.ndarray:
        """``out[..., i, j] = Q(p[..., i], q[..., j])``."""
        fp = self.phi.values(_as_points(p), strip_p)
        gq = self.psi.values(_as_points(q), strip_q)
        return fp @ np.swapaxes(gq, -1, -2)


def q_eval(Q: BilinearQ, x, y):
    val = Q(x, y)
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True, eq=False)
class GeneralizedKernel:
    """Kernel built from two function sets and their overlap matrix.

    ``coeff[j, l]`` multiplies ``phi_j(p) psi_l(q)``; it holds ``C_lj / C``
    in normalized mode and the bare signed minor ``C_lj`` otherwise.
    """

    phi: FunctionSet
    psi: FunctionSet
    gram: GramMatrix
    coeff: np.ndarray
    normalized: bool

    @classmethod
    def from_gram(cls, phi: FunctionSet, psi: FunctionSet,
                  gram: GramMatrix) -> "GeneralizedKernel":
        if phi.n != psi.n or gram.n != phi.n:
            raise ValueError("set sizes and overlap matrix size must agree")
        if gram.nonsingular:
            coeff = inverse_row_solve(gram).T
        else:
            coeff = cofactor_matrix(gram).T
        coeff.setflags(write=False)
        return cls(phi, psi, gram, coeff, gram.nonsingular)

    @classmethod
    def build(cls, phi: FunctionSet, psi: FunctionSet,
              rule: QuadratureRule) -> "GeneralizedKernel":
        return cls.from_gram(phi, psi, compute_gram(phi, psi, rule))

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def mode(self) -> str:
        return "normalized" if self.normalized else "unnormalized"

    @property
    def det_C(self) -> float:
        return self.gram.det_C

    @property
    def bilinear(self) -> BilinearQ:
        return BilinearQ(self.phi, self.psi)

    def __call__(self, p, q, strip_p=False, strip_q=False):
        """Kernel value in this object's mode (``K`` or ``C*K``), broadcasting."""
        fp = self.phi.values(_as_points(p), strip_p)
        gq = self.psi.values(_as_points(q), strip_q)
        return np.einsum("...j,jl,...l->...", fp, self.coeff, gq)

    def matrix(self, p, q, strip_p=False, strip_q=False) -> np.ndarray:
        """``out[..., i, j] = K(p[..., i], q[..., j])`` in this object's mode."""
        fp = self.phi.values(_as_points(p), strip_p)
        gq = self.psi.values(_as_points(q), strip_q)
        return fp @ self.coeff @ np.swapaxes(gq, -1, -2)


def kernel_eval(K: GeneralizedKernel, p, q):
    """Normalised kernel ``K(p, q)``; refuses a singular overlap matrix."""
    if not K.normalized:
        raise SingularNormalizationError(K.gram.rank, K.n)
    val = K(p, q)
    return float(val) if np.ndim(val) == 0 else val


def kernel_eval_column_oracle(K: GeneralizedKernel, p: float, q: float) -> float:
    """Sum over ``a`` of overlap determinants with column ``a`` replaced.

    Column ``a`` becomes ``phi_i(p) psi_a(q)``.  Divided by ``C`` in
    normalized mode, left as ``C*K`` otherwise.  The determinants are taken
    in exact rational arithmetic on the stored floats, so the oracle adds no
    rounding of its own even for badly conditioned overlap matrices.
    """
    n = K.n
    if n > COLUMN_ORACLE_MAX_N:
        raise ValueError(f"column-replacement oracle limited to n <= {COLUMN_ORACLE_MAX_N}")
    fp = K.phi(float(p))
    gq = K.psi(float(q))
    total = 0
    for a in range(n):
        m = np.array(K.gram.entries, dtype=float)
        m[:, a] = fp * gq[a]
        total += exact_det(m)
    if K.normalized:
        return float(total / exact_det(K.gram.entries))
    return float(total)


def kernel_det(K: GeneralizedKernel, p, q) -> float:
    """``det_k [K(p_i, q_j)]`` (``C*K`` entries in unnormalized mode)."""
    p = np.atleast_1d(_as_points(p))
    q = np.atleast_1d(_as_points(q))
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"need equal numbers of p and q points, got {p.shape}, {q.shape}")
    k = len(p)
    if k == 0:
        return 1.0
    if k > K.n:
        warnings.warn(f"{k} points exceed kernel rank {K.n}; determinant vanishes",
                      RankDeficiencyWarning, stacklevel=2)
    return lu_det(K.matrix(p, q))


def k_kernel(K: GeneralizedKernel, p, q) -> float:
    """k-variable kernel ``det_k[K(p_i, q_j)] / k!``."""
    k = len(np.atleast_1d(p))
    return kernel_det(K, p, q) / math.factorial(k)
