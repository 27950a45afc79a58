"""
Named function-set pairs used by the verification suites, demos and CLI.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .basis import (SYMMETRIC_UNIT, Composite, FunctionSet, MonicPoly,
                    Monomial, WaveFunction, monomials, wave_functions)
from .gram import check_weight_convention
from .quadrature import DEFAULT_ORACLE_NODES, QuadratureRule, gauss_rule
from .basis import FAMILIES


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    build: Callable[[int], tuple[FunctionSet, FunctionSet]]
    sizes: tuple[int, ...]
    degenerate: bool = False

    def __call__(self, n: int | None = None) -> tuple[FunctionSet, FunctionSet]:
        n = self.sizes[0] if n is None else n
        if n not in self.sizes:
            raise ValueError(f"fixture {self.name!r} supports n in {self.sizes}, got {n}")
        return self.build(n)


def _fixture_a(n):
    s = monomials(2)
    return s, s


def _monomials(n):
    s = monomials(n)
    return s, s


def _mixed(n):
    # phi: unit upper-triangular combinations of monomials
    phi = []
    for i in range(n):
        terms = [(1.0, Monomial(i))]
        if i + 1 < n:
            terms.append((0.3, Monomial(i + 1)))
        phi.append(Composite(tuple(terms)))
    # psi: monic Legendre polynomials, each mixed with its predecessor
    psi = []
    for j in range(n):
        terms = [(1.0, MonicPoly("legendre", j))]
        if j > 0:
            terms.append((0.5, MonicPoly("legendre", j - 1)))
        psi.append(Composite(tuple(terms)))
    return FunctionSet(tuple(phi), SYMMETRIC_UNIT), FunctionSet(tuple(psi), SYMMETRIC_UNIT)


def _wave(family):
    def build(n):
        s = wave_functions(family, n)
        return s, s
    return build


def _hermite_nonorth(n):
    dom = FAMILIES["hermite"].domain
    phi, psi = [], []
    for i in range(n):
        t = [(1.0, WaveFunction("hermite", i))]
        if i + 1 < n:
            t.append((0.4, WaveFunction("hermite", i + 1)))
        phi.append(Composite(tuple(t)))
        u = [(1.0, WaveFunction("hermite", i))]
        if i > 0:
            u.append((-0.7, WaveFunction("hermite", i - 1)))
        if i > 1:
            u.append((0.2, WaveFunction("hermite", 0)))
        psi.append(Composite(tuple(u)))
    return FunctionSet(tuple(phi), dom), FunctionSet(tuple(psi), dom)


def _degenerate_rank1_of_2(n):
    phi = FunctionSet((Monomial(0), Monomial(1)), SYMMETRIC_UNIT)
    psi = FunctionSet((MonicPoly("legendre", 2), Monomial(0)), SYMMETRIC_UNIT)
    return phi, psi


def _degenerate_rank2_of_3(n):
    phi = FunctionSet((Monomial(0), Monomial(1), Monomial(2)), SYMMETRIC_UNIT)
    psi = FunctionSet((MonicPoly("legendre", 3), Monomial(1), Monomial(0)), SYMMETRIC_UNIT)
    return phi, psi


def _degenerate_rank1_of_3(n):
    phi = FunctionSet((Monomial(0), Monomial(1), Monomial(2)), SYMMETRIC_UNIT)
    psi = FunctionSet((MonicPoly("legendre", 3), MonicPoly("legendre", 4), Monomial(0)),
                      SYMMETRIC_UNIT)
    return phi, psi


_SIZES = tuple(range(1, 7))

FIXTURES = {f.name: f for f in [
    Fixture("A", "phi = psi = {1, x} on [0, 1]", _fixture_a, (2,)),
    Fixture("monomials", "phi = psi = {1, x, ..., x^(n-1)} on [0, 1]", _monomials, _SIZES),
    Fixture("mixed", "non-orthogonal monomial / Legendre-polynomial combinations on [-1, 1]",
            _mixed, _SIZES),
    Fixture("hermite-wave", "orthonormal Hermite wave functions on the real line",
            _wave("hermite"), _SIZES),
    Fixture("hermite-nonorth", "non-orthogonal combinations of Hermite wave functions",
            _hermite_nonorth, _SIZES),
    Fixture("legendre-wave", "orthonormal Legendre wave functions on [-1, 1]",
            _wave("legendre"), _SIZES),
    Fixture("laguerre-wave", "orthonormal Laguerre wave functions on [0, inf)",
            _wave("laguerre"), _SIZES),
    Fixture("degenerate-rank1", "phi = {1, x}, psi = {p_2, 1} on [-1, 1]; overlap rank 1 = n-1",
            _degenerate_rank1_of_2, (2,), True),
    Fixture("degenerate-rank2of3", "phi = {1, x, x^2}, psi = {p_3, x, 1}; overlap rank 2 = n-1",
            _degenerate_rank2_of_3, (3,), True),
    Fixture("degenerate-rank1of3", "phi = {1, x, x^2}, psi = {p_3, p_4, 1}; overlap rank 1 = n-2",
            _degenerate_rank1_of_3, (3,), True),
]}


def get_fixture(name: str, n: int | None = None) -> tuple[FunctionSet, FunctionSet]:
    try:
        fx = FIXTURES[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}") from None
    return fx(n)


def rule_for(phi: FunctionSet, psi: FunctionSet,
             m: int = DEFAULT_ORACLE_NODES) -> QuadratureRule:
    """Natural Gauss rule for a pair of sets.

    Sets dressed with a classical weight on that weight's own domain get the
    matching Gauss rule; anything else on a finite domain gets Gauss-Legendre.
    """
    w = phi.weight
    if w == psi.weight and w in FAMILIES and phi.domain == FAMILIES[w].domain:
        rule = gauss_rule(phi.domain, m)
    elif phi.domain.is_finite:
        rule = gauss_rule(phi.domain, m)
    else:
        raise ValueError(
            f"no default rule for weight {w!r}/{psi.weight!r} on {phi.domain}; "
            "pass a rule explicitly")
    check_weight_convention(phi, psi, rule)
    return rule
