"""
Overlap matrix ``<i,k> = int phi_i(x) psi_k(x) dx`` and its normalisation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .basis import FunctionSet
from .quadrature import QuadratureRule

RANK_TOL = 1e-9


class SingularNormalizationError(np.linalg.LinAlgError):
    """The overlap matrix is rank deficient, so ``C = 0``."""

    def __init__(self, rank, n):
        self.rank = rank
        self.n = n
        super().__init__(
            f"overlap matrix has rank {rank} < {n}; the normalisation C vanishes. "
            "Use the unnormalized (C-multiplied) kernel instead.")


class WeightConventionError(ValueError):
    """Function sets and quadrature rule disagree on who carries the weight."""


def lu_det(a) -> float:
    """Determinant from a row-pivoted LU factorization."""
    a = np.asarray(a, dtype=float)
    if a.shape == (0, 0):
        return 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=True)
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return sign * float(np.prod(np.diag(lu)))


def cofactor_det(a) -> float:
    """Determinant by Laplace expansion along the first row.

    O(n!) - intended as an independent check for small matrices only.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return float(a[0, 0])
    if n > 8:
        raise ValueError("cofactor expansion is limited to n <= 8")
    total = 0.0
    for col in range(n):
        if a[0, col] == 0.0:
            continue
        sub = np.delete(a[1:], col, axis=1)
        total += (-1) ** col * a[0, col] * cofactor_det(sub)
    return total


def exact_det(a) -> Fraction:
    """Determinant of a float matrix in exact rational arithmetic.

    Every double is a rational, so the result is the true determinant of the
    stored entries; only the final conversion rounds.
    """
    rows = [[Fraction(float(v)) for v in row] for row in np.asarray(a, dtype=float)]
    n, det = len(rows), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Overlap matrix with determinant ``det_C``, LU factors and numerical rank."""

    entries: np.ndarray
    det_C: float
    lu: tuple
    rank: int
    tol_rank: float
    singular_values: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def nonsingular(self) -> bool:
        return self.rank == self.n

    @classmethod
    def from_entries(cls, entries, tol_rank: float = RANK_TOL) -> "GramMatrix":
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"overlap matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            i, k = np.argwhere(~np.isfinite(a))[0]
            raise ValueError(f"non-finite overlap entry <{i + 1},{k + 1}> = {a[i, k]}")
        a.setflags(write=False)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu = sla.lu_factor(a)
        sv = np.linalg.svd(a, compute_uv=False)
        rank = int(np.count_nonzero(sv > tol_rank * sv[0])) if sv[0] > 0 else 0
        return cls(a, lu_det(a), lu, rank, tol_rank, sv)

    def to_dict(self) -> dict:
        return {"n": self.n,
                "entries": self.entries.tolist(),
                "det": self.det_C,
                "rank": self.rank}


def check_weight_convention(phi: FunctionSet, psi: FunctionSet,
                            rule: QuadratureRule) -> bool:
    """Validate a rule against two sets; return whether to strip ``sqrt(w)``.

    An embedded-weight rule is accepted only when both sets carry exactly
    that weight, so ``phi_i psi_k = w * poly`` and the polynomial parts are
    integrated.  A plain rule must lie inside the common domain; it may be a
    finite truncation of an unbounded domain only for weight-dressed sets.
    """
    if phi.domain != psi.domain:
        raise ValueError(f"domain mismatch: phi on {phi.domain}, psi on {psi.domain}")
    if rule.weight_embedded:
        if phi.weight != rule.family or psi.weight != rule.family:
            raise WeightConventionError(
                f"rule embeds the {rule.family} weight but the sets carry "
                f"phi:{phi.weight!r}, psi:{psi.weight!r}")
        if rule.domain != phi.domain:
            raise ValueError(f"rule domain {rule.domain} differs from set domain {phi.domain}")
        return True
    dom = phi.domain
    if rule.domain.a < dom.a or rule.domain.b > dom.b:
        raise ValueError(f"rule domain {rule.domain} leaves set domain {dom}")
    if rule.domain != dom and (phi.weight in (None, "mixed") or psi.weight in (None, "mixed")):
        raise WeightConventionError(
            "a truncated rule requires weight-dressed (decaying) function sets")
    return False


def compute_gram(phi: FunctionSet, psi: FunctionSet, rule: QuadratureRule,
                 tol_rank: float = RANK_TOL) -> GramMatrix:
    """Overlap matrix ``entries[i][k] = int phi_i psi_k`` under ``rule``."""
    if phi.n != psi.n:
        raise ValueError(f"set sizes differ: {phi.n} vs {psi.n}")
    strip = check_weight_convention(phi, psi, rule)
    fv = phi.values(rule.nodes, strip)
    gv = psi.values(rule.nodes, strip)
    n = phi.n
    entries = np.empty((n, n))
    for i in range(n):
        for k in range(n):
            terms = rule.weights * fv[:, i] * gv[:, k]
            if not np.all(np.isfinite(terms)):
                raise ValueError(f"non-finite integrand in overlap <{i + 1},{k + 1}>")
            entries[i, k] = math.fsum(terms)
    return GramMatrix.from_entries(entries, tol_rank)


def signed_minor(G: GramMatrix, l: int, j: int) -> float:
    """``C_lj = (-1)^(l+j) det`` of the overlap matrix without row ``j`` and column ``l``.

    Indices are 1-based.  For a nonsingular matrix ``C_lj / C`` is the
    ``(l, j)`` element of the inverse.
    """
    n = G.n
    if not (1 <= l <= n and 1 <= j <= n):
        raise IndexError(f"minor index ({l}, {j}) out of range 1..{n}")
    sub = np.delete(np.delete(G.entries, j - 1, axis=0), l - 1, axis=1)
    return (-1) ** (l + j) * lu_det(sub)


def cofactor_matrix(G: GramMatrix) -> np.ndarray:
    """Matrix of all signed minors, ``out[l-1, j-1] = C_lj`` (the adjugate)."""
    n = G.n
    return np.array([[signed_minor(G, l, j) for j in range(1, n + 1)]
                     for l in range(1, n + 1)])


REFINE_STEPS = 2


def _exact_residual(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``I - a @ x`` with every product and sum exact, rounded once at the end."""
    n = a.shape[0]
    fa = [[Fraction(float(v)) for v in row] for row in a]
    fx = [[Fraction(float(v)) for v in row] for row in x]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            acc = Fraction(int(i == j))
            for k in range(n):
                acc -= fa[i][k] * fx[k][j]
            out[i, j] = float(acc)
    return out


def inverse_row_solve(G: GramMatrix) -> np.ndarray:
    """``M[l][k] = C_lk / C`` obtained by triangular solves against the identity.

    Followed by iterative refinement with exactly computed residuals, which
    brings the inverse to working accuracy whenever ``cond(G) * eps < 1``;
    this matters for Hilbert-like overlap matrices of monomial sets.
    """
    if not G.nonsingular:
        raise SingularNormalizationError(G.rank, G.n)
    x = sla.lu_solve(G.lu, np.eye(G.n))
    for _ in range(REFINE_STEPS):
        x = x + sla.lu_solve(G.lu, _exact_residual(G.entries, x))
    return x
