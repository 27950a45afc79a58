"""
Function families used to build the two sets {phi_j} and {psi_j}.

Members are small immutable descriptors: monomials, monic classical
orthogonal polynomials, orthonormal wave functions ``h_k^{-1/2} w^{1/2} p_k``
and real linear combinations of these.  Every member factors as

    member(x) = sqrt(w_F(x)) * poly(x)

where ``F`` is the member's weight family (``None`` for bare polynomials).
Keeping the two factors apart lets the quadrature layer integrate products
of dressed members against a Gauss rule that already carries ``w_F``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

MAX_DEGREE = 30


class DomainError(ValueError):
    """Raised when a point lies outside the domain of a function set."""


@dataclass(frozen=True)
class Interval:
    """Closed real interval; either end may be infinite."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.a) and math.isfinite(self.b)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.a) & (x <= self.b)

    def check(self, x) -> None:
        x = np.asarray(x, dtype=float)
        bad = ~self.contains(x)
        if np.any(bad):
            offender = x[bad].flat[0]
            raise DomainError(f"x={offender!r} outside domain [{self.a}, {self.b}]")

    def to_list(self):
        return [_float_to_json(self.a), _float_to_json(self.b)]

    @classmethod
    def from_list(cls, pair) -> "Interval":
        a, b = pair
        return cls(_float_from_json(a), _float_from_json(b))


def _float_to_json(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _float_from_json(v):
    if v is None:
        raise ValueError("interval endpoints must be numbers or 'inf'/'-inf'")
    return float(v)


REAL_LINE = Interval(-math.inf, math.inf)
HALF_LINE = Interval(0.0, math.inf)
SYMMETRIC_UNIT = Interval(-1.0, 1.0)
UNIT = Interval(0.0, 1.0)


# -- classical families -------------------------------------------------------

@dataclass(frozen=True)
class OrthoFamily:
    """A classical weight together with its monic three-term recurrence.

    The monic polynomials obey
    ``p_{k+1}(x) = (x - alpha_k) p_k(x) - beta_k p_{k-1}(x)`` with
    ``p_0 = 1`` and ``p_{-1} = 0``.  ``mu0`` is the total mass of the weight.
    """

    name: str
    domain: Interval
    alpha: Callable[[int], Fraction]
    beta: Callable[[int], Fraction]
    mu0: float
    sqrt_weight: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def weight(self, x):
        return self.sqrt_weight(x) ** 2

    def recurrence(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``alpha_0..alpha_{m-1}`` and ``beta_1..beta_{m-1}`` as floats."""
        alpha = np.array([float(self.alpha(k)) for k in range(m)])
        beta = np.array([float(self.beta(k)) for k in range(1, m)])
        return alpha, beta

    def monic(self, degree: int, x) -> np.ndarray:
        """Evaluate the monic polynomial of the given degree by recurrence."""
        x = np.asarray(x, dtype=float)
        prev = np.zeros_like(x)
        cur = np.ones_like(x)
        for k in range(degree):
            prev, cur = cur, (x - float(self.alpha(k))) * cur - float(self.beta(k)) * prev
        return cur

    def monic_with_derivative(self, degree: int, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        prev, cur = np.zeros_like(x), np.ones_like(x)
        dprev, dcur = np.zeros_like(x), np.zeros_like(x)
        for k in range(degree):
            a, b = float(self.alpha(k)), float(self.beta(k))
            nxt = (x - a) * cur - b * prev
            dnxt = cur + (x - a) * dcur - b * dprev
            prev, cur, dprev, dcur = cur, nxt, dcur, dnxt
        return cur, dcur

    def norm(self, k: int) -> float:
        return monic_norms(self, k + 1)[k]


def _legendre_alpha(k):
    return Fraction(0)


def _legendre_beta(k):
    return Fraction(k * k, 4 * k * k - 1) if k > 0 else Fraction(0)


def _hermite_beta(k):
    return Fraction(k, 2)


def _laguerre_alpha(k):
    return Fraction(2 * k + 1)


def _laguerre_beta(k):
    return Fraction(k * k)


def _sqrt_w_legendre(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _sqrt_w_hermite(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x)


def _sqrt_w_laguerre(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return np.where(x >= 0, np.exp(-0.5 * np.abs(x)), np.nan)


LEGENDRE = OrthoFamily("legendre", SYMMETRIC_UNIT, _legendre_alpha, _legendre_beta,
                       2.0, _sqrt_w_legendre)
HERMITE = OrthoFamily("hermite", REAL_LINE, _legendre_alpha, _hermite_beta,
                      math.sqrt(math.pi), _sqrt_w_hermite)
LAGUERRE = OrthoFamily("laguerre", HALF_LINE, _laguerre_alpha, _laguerre_beta,
                       1.0, _sqrt_w_laguerre)

FAMILIES = {f.name: f for f in (LEGENDRE, HERMITE, LAGUERRE)}


def get_family(family) -> OrthoFamily:
    if isinstance(family, OrthoFamily):
        return family
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unsupported family {family!r}; expected one of {sorted(FAMILIES)}"
        ) from None


@lru_cache(maxsize=None)
def _exact_norm_ratios(name: str, n: int) -> tuple[Fraction, ...]:
    fam = FAMILIES[name]
    out, prod = [], Fraction(1)
    for k in range(n):
        if k > 0:
            prod *= fam.beta(k)
        out.append(prod)
    return tuple(out)


def monic_norms(family, n: int) -> list[float]:
    """Squared norms ``h_0 .. h_{n-1}`` of the monic polynomials.

    Uses ``h_k = mu0 * beta_1 * ... * beta_k`` with the products formed in
    exact rational arithmetic, so no quadrature error enters.
    """
    fam = get_family(family)
    if n < 1:
        raise ValueError("n must be >= 1")
    norms = [fam.mu0 * float(r) for r in _exact_norm_ratios(fam.name, n)]
    if any(not h > 0 for h in norms):
        raise ValueError(f"corrupted norm table for {fam.name}: {norms}")
    return norms


def wave_function(family, k: int, x) -> np.ndarray:
    """Orthonormal wave function ``h_k^{-1/2} w(x)^{1/2} p_k(x)``.

    Points where the weight vanishes (including infinite endpoints) give 0.
    """
    fam = get_family(family)
    h = monic_norms(fam, k + 1)[k]
    if not h > 0:
        raise ValueError(f"non-positive norm h_{k}={h} for {fam.name}")
    x = np.asarray(x, dtype=float)
    fam.domain.check(x)
    sw = fam.sqrt_weight(x)
    finite = np.isfinite(x)
    with np.errstate(invalid="ignore", over="ignore"):
        p = fam.monic(k, np.where(finite, x, 0.0))
        val = sw * p / math.sqrt(h)
    return np.where(finite & (sw != 0), val, 0.0)


# -- member descriptors -------------------------------------------------------

class Member:
    """Base for function-set members; subclasses are frozen dataclasses."""

    weight: str | None = None

    def poly(self, x) -> np.ndarray:
        raise NotImplementedError

    @property
    def degree(self) -> int:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.weight is None:
            return self.poly(x)
        sw = FAMILIES[self.weight].sqrt_weight(x)
        finite = np.isfinite(x)
        with np.errstate(invalid="ignore", over="ignore"):
            val = sw * self.poly(np.where(finite, x, 0.0))
        return np.where(finite & (sw != 0), val, 0.0)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Monomial(Member):
    power: int

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("monomial degree must be >= 0")

    @property
    def degree(self):
        return self.power

    def poly(self, x):
        x = np.asarray(x, dtype=float)
        return x ** self.power

    def to_dict(self):
        return {"kind": "monomial", "degree": self.power}


@dataclass(frozen=True)
class MonicPoly(Member):
    family: str
    order: int

    def __post_init__(self):
        get_family(self.family)
        if self.order < 0:
            raise ValueError("polynomial degree must be >= 0")

    @property
    def degree(self):
        return self.order

    def poly(self, x):
        return FAMILIES[self.family].monic(self.order, x)

    def to_dict(self):
        return {"kind": "monic", "family": self.family, "degree": self.order}


@dataclass(frozen=True)
class WaveFunction(Member):
    family: str
    index: int

    def __post_init__(self):
        get_family(self.family)
        if self.index < 0:
            raise ValueError("wave-function index must be >= 0")

    @property
    def weight(self):
        return self.family

    @property
    def degree(self):
        return self.index

    def poly(self, x):
        fam = FAMILIES[self.family]
        h = monic_norms(fam, self.index + 1)[self.index]
        return fam.monic(self.index, x) / math.sqrt(h)

    def to_dict(self):
        return {"kind": "wave", "family": self.family, "index": self.index}


@dataclass(frozen=True)
class Composite(Member):
    """Real linear combination ``sum_i c_i * member_i``.

    All terms must share one weight family.  Linear independence of a set
    containing composites is the caller's responsibility; the Gram rank
    exposes any failure downstream.
    """

    terms: tuple[tuple[float, Member], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("composite needs at least one term")
        object.__setattr__(self, "terms",
                           tuple((float(c), m) for c, m in self.terms))
        weights = {m.weight for _, m in self.terms}
        if len(weights) != 1:
            raise ValueError(f"composite mixes weight families {weights}")

    @property
    def weight(self):
        return self.terms[0][1].weight

    @property
    def degree(self):
        return max(m.degree for _, m in self.terms)

    def poly(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, m in self.terms:
            out = out + c * m.poly(x)
        return out

    def to_dict(self):
        return {"kind": "composite",
                "terms": [[c, m.to_dict()] for c, m in self.terms]}


def member_from_dict(d: dict, path: str = "member") -> Member:
    """Parse a member descriptor; errors name the offending field path."""
    if not isinstance(d, dict):
        raise ValueError(f"{path}: expected an object, got {type(d).__name__}")
    kind = d.get("kind")
    try:
        if kind == "monomial":
            return Monomial(int(d["degree"]))
        if kind == "monic":
            return MonicPoly(str(d["family"]), int(d["degree"]))
        if kind == "wave":
            return WaveFunction(str(d["family"]), int(d["index"]))
        if kind == "composite":
            terms = []
            for i, t in enumerate(d["terms"]):
                c, sub = t
                terms.append((float(c), member_from_dict(sub, f"{path}.terms[{i}]")))
            return Composite(tuple(terms))
    except KeyError as exc:
        raise ValueError(f"{path}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if str(exc).startswith(path):
            raise
        raise ValueError(f"{path}: {exc}") from None
    raise ValueError(f"{path}.kind: unknown member kind {kind!r}")


# -- function sets ------------------------------------------------------------

@dataclass(frozen=True)
class FunctionSet:
    """Ordered family of ``n`` real functions on a common domain."""

    members: tuple[Member, ...]
    domain: Interval

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a function set needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise ValueError("function-set members must be pairwise distinct")
        for m in self.members:
            if m.degree > MAX_DEGREE:
                raise ValueError(f"member degree {m.degree} exceeds cap {MAX_DEGREE}")
            if m.weight is not None:
                wdom = FAMILIES[m.weight].domain
                if self.domain.a < wdom.a or self.domain.b > wdom.b:
                    raise ValueError(
                        f"domain [{self.domain.a}, {self.domain.b}] leaves the "
                        f"support of the {m.weight} weight")

    @property
    def n(self) -> int:
        return len(self.members)

    @property
    def weight(self) -> str | None:
        """Common weight family of all members, ``None`` if all are bare.

        Returns ``"mixed"`` when members disagree.
        """
        ws = {m.weight for m in self.members}
        if len(ws) == 1:
            return ws.pop()
        return "mixed"

    @property
    def independent_by_construction(self) -> bool:
        return not any(isinstance(m, Composite) for m in self.members)

    def __call__(self, x) -> np.ndarray:
        """Values of all members; output shape is ``x.shape + (n,)``."""
        x = np.asarray(x, dtype=float)
        self.domain.check(x)
        return np.stack([m(x) for m in self.members], axis=-1)

    def poly_values(self, x) -> np.ndarray:
        """Member values with the common ``sqrt(w)`` factor removed."""
        if self.weight == "mixed":
            raise ValueError("cannot strip the weight of a mixed-weight set")
        x = np.asarray(x, dtype=float)
        self.domain.check(x)
        return np.stack([m.poly(x) for m in self.members], axis=-1)

    def values(self, x, strip: bool = False) -> np.ndarray:
        return self.poly_values(x) if strip else self(x)

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_list(),
                "members": [m.to_dict() for m in self.members]}

    @classmethod
    def from_dict(cls, d: dict, path: str = "set") -> "FunctionSet":
        if not isinstance(d, dict):
            raise ValueError(f"{path}: expected an object")
        try:
            domain = Interval.from_list(d["domain"])
        except KeyError:
            raise ValueError(f"{path}: missing field 'domain'") from None
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}.domain: {exc}") from None
        if "members" not in d:
            raise ValueError(f"{path}: missing field 'members'")
        members = [member_from_dict(m, f"{path}.members[{i}]")
                   for i, m in enumerate(d["members"])]
        try:
            return cls(tuple(members), domain)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None


def eval_member(fset: FunctionSet, j: int, x) -> np.ndarray | float:
    """Value of the ``j``-th member (1-based) at ``x``."""
    if not 1 <= j <= fset.n:
        raise IndexError(f"member index {j} out of range 1..{fset.n}")
    fset.domain.check(x)
    val = fset.members[j - 1](x)
    return float(val) if np.ndim(val) == 0 else val


# -- convenience constructors -------------------------------------------------

def monomials(n: int, domain: Interval = UNIT) -> FunctionSet:
    return FunctionSet(tuple(Monomial(d) for d in range(n)), domain)


def monic_polys(family, n: int, domain: Interval | None = None) -> FunctionSet:
    fam = get_family(family)
    return FunctionSet(tuple(MonicPoly(fam.name, d) for d in range(n)),
                       domain or fam.domain)


def wave_functions(family, n: int) -> FunctionSet:
    fam = get_family(family)
    return FunctionSet(tuple(WaveFunction(fam.name, k) for k in range(n)), fam.domain)


def combination(coeffs: Sequence[Sequence[float]], base: Sequence[Member],
                domain: Interval) -> FunctionSet:
    """Set whose ``i``-th member is ``sum_j coeffs[i][j] * base[j]``."""
    members = []
    for row in coeffs:
        terms = tuple((c, m) for c, m in zip(row, base) if c != 0)
        members.append(Composite(terms))
    return FunctionSet(tuple(members), domain)
