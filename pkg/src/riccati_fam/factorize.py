"""Two-operator factorizations [D - phi2(u)][D - phi1(u)] u = 0 of Lienard equations.

Matching the product against u'' + g(u) u' + F(u) = 0 gives

    g(u) = -(phi1 + phi2 + phi1'(u) u)
    F(u) = phi1 phi2 u

With phi1 linear in u the first factor is a Riccati equation. Two engines are
provided: cubic F = A u + B u^2 + C u^3 (phi2 linear) and quadratic
F = A u + B u^2 (phi2 constant).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import (
    ComplexDiscriminant,
    InvalidParameter,
    NoRealBranch,
    ZeroBranch,
    ZeroConstantCofactor,
    ZeroCubicCoefficient,
    ZeroQuadraticCoefficient,
)
from .lienard import LienardEquation, Polynomial

COEFF_TOL = 1e-12
BRANCH_MATCH_TOL = 1e-10


class Branch(enum.Enum):
    PLUS_ROOT = "PlusRoot"
    MINUS_ROOT = "MinusRoot"


@dataclass(frozen=True)
class LinearFactor:
    """phi1(u) = c1 u + c2."""

    c1: float
    c2: float

    def __post_init__(self):
        if self.c1 == 0.0:
            raise InvalidParameter("phi1 must have nonzero slope c1")

    def __call__(self, u):
        return self.c1 * u + self.c2

    def as_polynomial(self) -> Polynomial:
        return Polynomial((self.c2, self.c1))


@dataclass(frozen=True)
class Factorization:
    phi1: LinearFactor
    phi2: Polynomial
    g: Polynomial
    F: Polynomial
    a1: float | None = None
    delta: float | None = None
    branch: Branch | None = None
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def equation(self) -> LienardEquation:
        return LienardEquation(self.g, self.F)


@dataclass(frozen=True)
class FactorizationCheck:
    """Coefficient mismatches for the damping and force matching conditions."""

    damping_mismatch: float
    force_mismatch: float
    tol: float = COEFF_TOL

    @property
    def damping_ok(self) -> bool:
        return self.damping_mismatch < self.tol

    @property
    def force_ok(self) -> bool:
        return self.force_mismatch < self.tol

    @property
    def passed(self) -> bool:
        return self.damping_ok and self.force_ok


def _discriminant_root(A: float, B: float, C: float) -> float:
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        raise ComplexDiscriminant(f"B^2 - 4AC = {disc!r} < 0")
    return math.sqrt(disc)


def _branch_roots(C: float, g1: float) -> tuple[float, float]:
    """(plus, minus) roots of 2C a^2 + g1 a + 1 = 0."""
    disc = g1 * g1 - 8.0 * C
    if disc < 0.0:
        raise NoRealBranch(f"g1^2 - 8C = {disc!r} < 0")
    s = math.sqrt(disc)
    return (-g1 + s) / (4.0 * C), (-g1 - s) / (4.0 * C)


def factor_cubic_forward(A: float, B: float, C: float, a1: float) -> Factorization:
    """Factorize F = A u + B u^2 + C u^3 for a given branch parameter a1.

    phi1 = a1((B + Delta)/2 + C u), phi2 = ((B - Delta)/(2C) + u)/a1 with
    Delta = +sqrt(B^2 - 4AC); the damping g is whatever these induce.
    """
    if C == 0.0:
        raise ZeroCubicCoefficient("C = 0: use the quadratic engine")
    if a1 == 0.0:
        raise ZeroBranch("a1 = 0")
    delta = _discriminant_root(A, B, C)
    b_plus = (B + delta) / 2.0
    b_minus = (B - delta) / (2.0 * C)
    phi1 = LinearFactor(a1 * C, a1 * b_plus)
    phi2 = Polynomial((b_minus / a1, 1.0 / a1))
    g = Polynomial((-(b_plus * a1 + b_minus / a1), -(2.0 * C * a1 + 1.0 / a1)))
    plus, minus = _branch_roots(C, g.coeff(1))
    branch = Branch.PLUS_ROOT if abs(a1 - plus) <= abs(a1 - minus) else Branch.MINUS_ROOT
    return Factorization(
        phi1=phi1,
        phi2=phi2,
        g=g,
        F=Polynomial((0.0, A, B, C)),
        a1=a1,
        delta=delta,
        branch=branch,
    )


def factor_cubic_inverse(g0: float, g1: float, A: float, B: float, C: float) -> list[Factorization]:
    """All factorizations of the cubic engine compatible with g(u) = g0 + g1 u.

    a1 solves the linear-coefficient match 2C a1^2 + g1 a1 + 1 = 0; each real
    root is kept only when its constant coefficient also reproduces g0.
    """
    if C == 0.0:
        raise ZeroCubicCoefficient("C = 0: use the quadratic engine")
    _discriminant_root(A, B, C)
    plus, minus = _branch_roots(C, g1)
    roots = [(plus, Branch.PLUS_ROOT)]
    if minus != plus:
        roots.append((minus, Branch.MINUS_ROOT))
    out = []
    for a1, branch in roots:
        f = factor_cubic_forward(A, B, C, a1)
        if abs(f.g.coeff(0) - g0) > BRANCH_MATCH_TOL:
            continue
        # forward() re-derives the branch label from a1; keep the root's own label
        out.append(Factorization(f.phi1, f.phi2, f.g, f.F, f.a1, f.delta, branch, f.meta))
    return out


def factor_quadratic(A: float, B: float, k: float | str, g: Polynomial | None = None) -> Factorization:
    """Factorize F = A u + B u^2 with constant second factor phi2 = k.

    Pass ``k="solve"`` together with a target damping ``g`` to recover k from
    the linear coefficient of g; the constant coefficient is then a
    consistency check (for the convective Fisher equation this is the
    constraint nu = mu/2 + 1/mu).
    """
    if B == 0.0:
        raise ZeroQuadraticCoefficient("B = 0")
    if k == "solve":
        if g is None:
            raise InvalidParameter("k='solve' needs the target damping g")
        found = factor_quadratic_inverse(g.coeff(0), g.coeff(1), A, B)
        if not found:
            raise InvalidParameter(f"no constant cofactor reproduces g(u) = {g}")
        return found[0]
    if k == 0.0:
        raise ZeroConstantCofactor("k = 0")
    phi1 = LinearFactor(B / k, A / k)
    g = Polynomial((-(A / k + k), -2.0 * B / k))
    return Factorization(phi1=phi1, phi2=Polynomial((k,)), g=g, F=Polynomial((0.0, A, B)))


def factor_quadratic_inverse(g0: float, g1: float, A: float, B: float) -> list[Factorization]:
    """Solve k from g1 = -2B/k, then keep it only if g0 = -(A/k + k)."""
    if B == 0.0:
        raise ZeroQuadraticCoefficient("B = 0")
    if g1 == 0.0:
        raise NoRealBranch("g1 = 0 admits no finite constant cofactor")
    f = factor_quadratic(A, B, -2.0 * B / g1)
    if abs(f.g.coeff(0) - g0) > BRANCH_MATCH_TOL:
        return []
    return [f]


def factor_equation(eq: LienardEquation) -> list[Factorization]:
    """Dispatch to the cubic or quadratic inverse engine from (g, F) alone."""
    if eq.g.degree > 1:
        raise InvalidParameter("damping g must be at most linear in u")
    g0, g1 = eq.g.coeff(0), eq.g.coeff(1)
    A, B, C = eq.F.coeff(1), eq.F.coeff(2), eq.F.coeff(3)
    if eq.F.degree == 3:
        return factor_cubic_inverse(g0, g1, A, B, C)
    if eq.F.degree == 2:
        return factor_quadratic_inverse(g0, g1, A, B)
    raise InvalidParameter(f"F must be quadratic or cubic, got degree {eq.F.degree}")


def check_factorization(eq: LienardEquation, f: Factorization, tol: float = COEFF_TOL) -> FactorizationCheck:
    """Compare the operator product induced by ``f`` against ``eq`` coefficient-wise."""
    phi1 = f.phi1.as_polynomial()
    slope_term = Polynomial((0.0, f.phi1.c1))
    induced_g = -(phi1 + f.phi2 + slope_term)
    induced_force = phi1 * f.phi2
    return FactorizationCheck(
        damping_mismatch=induced_g.mismatch(eq.g),
        force_mismatch=induced_force.mismatch(eq.F.shift_down()),
        tol=tol,
    )
