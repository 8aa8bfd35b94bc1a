"""Closed-form presets: modified Emden, convective Fisher, cubic Lienard.

Each preset bundles its equation, its factorization, the particular solution
u1 and the lam-labelled family written out explicitly. The lam label is the
one of the explicit formulas: lam = 0 is the null solution and |lam| -> inf
recovers u1. For every preset u_lam is strictly decreasing in lam away from
its singular value lambda_s(tau).

All curves are built from jet expression trees, so their first and second
derivatives are exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from . import jet as J
from .errors import (
    ComplexBranch,
    ComplexDiscriminant,
    DegenerateExponent,
    InvalidParameter,
    ZeroBranch,
    ZeroCubicCoefficient,
)
from .factorize import Branch, Factorization, factor_cubic_forward, factor_quadratic
from .lienard import LienardEquation, Polynomial, SolutionCurve
from .riccati import RiccatiODE, reduce

EMDEN_LADDER = (-0.2, -0.4, -1.0, -6.0)
FISHER_LADDER = (-0.2, -0.4, -1.0, -6.0)
LIENARD_LADDER = (0.7, 0.9, 1.1, 1.3)


class Sign(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def value_sign(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0


# -- parameters -------------------------------------------------------------------

@dataclass(frozen=True)
class EmdenParams:
    """u'' + alpha u u' + beta u^3 = 0.

    ``branch`` picks the root a1 = (-alpha +/- sqrt(alpha^2 - 8 beta)) / (4 sqrt(beta)).
    """

    alpha: float
    beta: float
    branch: Branch
    lam: float = 0.0
    tau0: float = 0.0

    def __post_init__(self):
        if not self.beta > 0.0:
            raise InvalidParameter("beta must be positive")
        if not isinstance(self.branch, Branch):
            raise InvalidParameter("branch must be a Branch")
        if self.alpha ** 2 - 8.0 * self.beta < 0.0:
            raise ComplexBranch(f"alpha^2 - 8 beta = {self.alpha ** 2 - 8.0 * self.beta!r} < 0")

    @classmethod
    def from_a1sqrtbeta(cls, a1sqrtbeta: float, beta: float = 1.0, lam: float = 0.0, tau0: float = 0.0):
        """Parameters for a given slope a1 sqrt(beta) of phi1; alpha follows from the damping match."""
        if a1sqrtbeta == 0.0:
            raise ZeroBranch("a1 sqrt(beta) = 0")
        if not beta > 0.0:
            raise InvalidParameter("beta must be positive")
        a1 = a1sqrtbeta / math.sqrt(beta)
        alpha = -math.sqrt(beta) * (2.0 * a1 + 1.0 / a1)
        disc = math.sqrt(max(alpha * alpha - 8.0 * beta, 0.0))
        plus = (-alpha + disc) / (4.0 * math.sqrt(beta))
        minus = (-alpha - disc) / (4.0 * math.sqrt(beta))
        branch = Branch.PLUS_ROOT if abs(a1 - plus) <= abs(a1 - minus) else Branch.MINUS_ROOT
        return cls(alpha, beta, branch, lam, tau0)

    @property
    def a1(self) -> float:
        s = 1.0 if self.branch is Branch.PLUS_ROOT else -1.0
        disc = math.sqrt(self.alpha ** 2 - 8.0 * self.beta)
        return (-self.alpha + s * disc) / (4.0 * math.sqrt(self.beta))

    @property
    def a1sqrtbeta(self) -> float:
        return self.a1 * math.sqrt(self.beta)


@dataclass(frozen=True)
class FisherParams:
    """u'' + 2(nu - mu u) u' + 2u(1 - u) = 0 with nu = mu/2 + 1/mu."""

    mu: float
    sign: Sign
    lam: float = 0.0
    tau0: float = 0.0

    def __post_init__(self):
        if self.mu == 0.0 or not math.isfinite(self.mu):
            raise InvalidParameter("mu must be finite and nonzero")
        if not isinstance(self.sign, Sign):
            raise InvalidParameter("sign must be a Sign")

    @property
    def nu(self) -> float:
        return self.mu / 2.0 + 1.0 / self.mu


@dataclass(frozen=True)
class CubicLienardParams:
    """F(u) = A u + B u^2 + C u^3 with the damping induced by branch parameter a1."""

    A: float
    B: float
    C: float
    a1: float
    lam: float = 0.0
    tau0: float = 0.0

    def __post_init__(self):
        if self.C == 0.0:
            raise ZeroCubicCoefficient("C = 0")
        if self.a1 == 0.0:
            raise ZeroBranch("a1 = 0")
        if self.B ** 2 - 4.0 * self.A * self.C < 0.0:
            raise ComplexDiscriminant("B^2 - 4AC < 0")
        if self.a1 * self.b_plus == 0.0:
            raise DegenerateExponent("a1 (B + Delta)/2 = 0: the exponential particular solution degenerates")

    @property
    def delta(self) -> float:
        return math.sqrt(self.B ** 2 - 4.0 * self.A * self.C)

    @property
    def b_plus(self) -> float:
        return (self.B + self.delta) / 2.0


# -- preset families ------------------------------------------------------------------

class _Preset:
    name = ""
    null_lambda = 0.0

    def __init__(self, params):
        self.params = params

    @property
    def ode(self) -> RiccatiODE:
        return reduce(self.factorization)

    @property
    def equation(self) -> LienardEquation:
        return self.factorization.equation

    def with_lambda(self, lam: float):
        return replace(self.params, lam=float(lam))

    def member(self, lam: float | None = None) -> SolutionCurve:
        lam = self.params.lam if lam is None else float(lam)
        return self._member(lam)

    def lambda_s(self, tau: float) -> float:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class EmdenFamily(_Preset):
    """u1 = -1/(c xi), u_lam = u1 + 1/(lam xi^2 + c xi) with c = a1 sqrt(beta), xi = tau - tau0."""

    name = "emden"

    @property
    def factorization(self) -> Factorization:
        p = self.params
        # generic engine slope is a1 C = a1 beta; the preset's a1 is sqrt(beta) times larger
        f = factor_cubic_forward(0.0, 0.0, p.beta, p.a1 / math.sqrt(p.beta))
        return replace(f, meta={"a1_paper": p.a1, "a1_generic": f.a1})

    @property
    def equation(self) -> LienardEquation:
        p = self.params
        return LienardEquation(Polynomial((0.0, p.alpha)), Polynomial((0.0, 0.0, 0.0, p.beta)))

    @property
    def u1(self) -> SolutionCurve:
        c, t0 = self.params.a1sqrtbeta, self.params.tau0
        return SolutionCurve.from_expression(
            lambda t: -1.0 / (c * (t - t0)),
            poles=(t0,),
            label="emden u1",
            meta={"variant": "bernoulli", "c1": c, "c2": 0.0, "K": 0.0, "tau0": t0},
        )

    def _member(self, lam):
        c, t0 = self.params.a1sqrtbeta, self.params.tau0

        def expr(t):
            # u1 + 1/(lam xi^2 + c xi) over a common denominator; the xi = 0 pole cancels
            return -lam / (c * (lam * (t - t0) + c))

        poles = [t0] + ([t0 - c / lam] if lam != 0.0 else [])
        return SolutionCurve.from_expression(expr, poles=poles, label=f"emden u_lambda({lam:g})")

    def lambda_s(self, tau):
        return -self.params.a1sqrtbeta / (tau - self.params.tau0)

    def describe(self):
        p = self.params
        return {"alpha": p.alpha, "beta": p.beta, "branch": p.branch.value, "a1": p.a1,
                "a1sqrtbeta": p.a1sqrtbeta, "tau0": p.tau0}


class FisherFamily(_Preset):
    """u1 = 1/(1 +/- e^{mu xi}), u_lam = u1 + E/((E +/- 1)(lam (E +/- 1) - 1)), E = e^{-mu xi}."""

    name = "fisher"

    @property
    def factorization(self) -> Factorization:
        return factor_quadratic(2.0, -2.0, -2.0 / self.params.mu)

    @property
    def equation(self) -> LienardEquation:
        p = self.params
        return LienardEquation(Polynomial((2.0 * p.nu, -2.0 * p.mu)), Polynomial((0.0, 2.0, -2.0)))

    @property
    def u1(self) -> SolutionCurve:
        mu, t0, s = self.params.mu, self.params.tau0, self.params.sign.value_sign
        return SolutionCurve.from_expression(
            lambda t: 1.0 / (1.0 + s * J.exp(mu * (t - t0))),
            poles=(t0,) if s < 0 else (),
            label="fisher u1",
            meta={"variant": "bernoulli", "c1": mu, "c2": -mu, "K": -s * mu, "tau0": t0},
        )

    def _member(self, lam):
        mu, t0, s = self.params.mu, self.params.tau0, self.params.sign.value_sign

        def expr(t):
            # u1 + E/((E + s)(lam (E + s) - 1)) with u1 = E/(E + s), combined
            E = J.exp(-mu * (t - t0))
            return lam * E / (lam * (E + s) - 1.0)

        poles = [t0] if s < 0 else []
        if lam != 0.0:
            e_star = 1.0 / lam - s
            if e_star > 0.0:
                poles.append(t0 - math.log(e_star) / mu)
        return SolutionCurve.from_expression(expr, poles=poles, label=f"fisher u_lambda({lam:g})")

    def lambda_s(self, tau):
        p = self.params
        return 1.0 / (math.exp(-p.mu * (tau - p.tau0)) + p.sign.value_sign)

    def describe(self):
        p = self.params
        return {"mu": p.mu, "nu": p.nu, "sign": p.sign.value, "tau0": p.tau0}


class LienardFamily(_Preset):
    """u1 = b/(E - C), u_lam = u1 + bE/((E - C)((lam b - 1)E - lam C b)), b = (B+Delta)/2, E = e^{-a1 b xi}."""

    name = "lienard"

    @property
    def factorization(self) -> Factorization:
        p = self.params
        return factor_cubic_forward(p.A, p.B, p.C, p.a1)

    @property
    def u1(self) -> SolutionCurve:
        p = self.params
        b, C, k, t0 = p.b_plus, p.C, p.a1 * p.b_plus, p.tau0
        return SolutionCurve.from_expression(
            lambda t: b / (J.exp(-k * (t - t0)) - C),
            poles=(t0 - math.log(C) / k,) if C > 0.0 else (),
            label="lienard u1",
            meta={"variant": "bernoulli", "c1": p.a1 * C, "c2": k, "K": p.a1, "tau0": t0},
        )

    def _member(self, lam):
        p = self.params
        b, C, k, t0 = p.b_plus, p.C, p.a1 * p.b_plus, p.tau0

        def expr(t):
            # u1 + bE/((E - C)((lam b - 1)E - lam C b)) combined; exact at lam = 0 and at the equilibrium
            E = J.exp(-k * (t - t0))
            return lam * b * b / ((lam * b - 1.0) * E - lam * C * b)

        poles = [t0 - math.log(C) / k] if C > 0.0 else []
        if lam * b != 1.0:
            e_star = lam * C * b / (lam * b - 1.0)
            if e_star > 0.0:
                poles.append(t0 - math.log(e_star) / k)
        return SolutionCurve.from_expression(expr, poles=poles, label=f"lienard u_lambda({lam:g})")

    def lambda_s(self, tau):
        p = self.params
        E = math.exp(-p.a1 * p.b_plus * (tau - p.tau0))
        return E / (p.b_plus * (E - p.C))

    def describe(self):
        p = self.params
        return {"A": p.A, "B": p.B, "C": p.C, "a1": p.a1, "delta": p.delta, "tau0": p.tau0}


def preset(params) -> _Preset:
    """The preset family object for a parameter record."""
    if isinstance(params, EmdenParams):
        return EmdenFamily(params)
    if isinstance(params, FisherParams):
        return FisherFamily(params)
    if isinstance(params, CubicLienardParams):
        return LienardFamily(params)
    raise InvalidParameter(f"no preset for {type(params).__name__}")


def emden_u1(p: EmdenParams) -> SolutionCurve:
    return EmdenFamily(p).u1


def emden_family(p: EmdenParams) -> SolutionCurve:
    return EmdenFamily(p).member()


def fisher_u1(p: FisherParams) -> SolutionCurve:
    return FisherFamily(p).u1


def fisher_family(p: FisherParams) -> SolutionCurve:
    return FisherFamily(p).member()


def lienard_u1(p: CubicLienardParams) -> SolutionCurve:
    return LienardFamily(p).u1


def lienard_family(p: CubicLienardParams) -> SolutionCurve:
    return LienardFamily(p).member()
