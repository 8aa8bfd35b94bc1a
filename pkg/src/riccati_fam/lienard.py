"""Polynomial Lienard equations u'' + g(u) u' + F(u) = 0 and their residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import EmptyEffectiveGrid, InvalidParameter, OutOfDomain, PoleProximity
from .jet import Jet

POLE_EXCLUSION = 1e-6


def exclusion_radius(tau: float) -> float:
    """Pole-exclusion radius at ``tau``: 1e-6 times the local scale max(1, |tau|)."""
    return POLE_EXCLUSION * max(1.0, abs(tau))


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.12g}"


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial ``sum(coeffs[i] * u**i)``."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float] = ()):
        cs = [float(c) for c in coeffs]
        while cs and cs[-1] == 0.0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> float:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0.0

    def __call__(self, u):
        """Horner evaluation; works for floats, numpy arrays and jets."""
        if not self.coeffs:
            return u * 0.0
        acc = u * 0.0 + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * u + c
        return acc

    def deriv(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coeff(i) + other.coeff(i) for i in range(n))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def shift_down(self) -> "Polynomial":
        """P(u)/u for a polynomial with zero constant term."""
        if self.coeff(0) != 0.0:
            raise InvalidParameter("polynomial has a nonzero constant term; P(u)/u is not polynomial")
        return Polynomial(self.coeffs[1:])

    def mismatch(self, other: "Polynomial") -> float:
        """Largest absolute coefficient difference."""
        n = max(len(self.coeffs), len(other.coeffs), 1)
        return max(abs(self.coeff(i) - other.coeff(i)) for i in range(n))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            mono = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
            mag = abs(c)
            if mono and mag == 1.0:
                body = mono
            elif mono:
                body = f"{_format_real(mag)}*{mono}"
            else:
                body = _format_real(mag)
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class LienardEquation:
    """u'' + g(u) u' + F(u) = 0 with polynomial g and F, F(0) = 0."""

    g: Polynomial
    F: Polynomial

    def __post_init__(self):
        if self.F.coeff(0) != 0.0:
            raise InvalidParameter(f"F(0) must vanish, got constant term {self.F.coeff(0)!r}")

    @classmethod
    def from_coeffs(cls, g: Sequence[float], F: Sequence[float]) -> "LienardEquation":
        return cls(Polynomial(g), Polynomial(F))

    def acceleration(self, u, v):
        """u'' implied by the equation at state (u, u')."""
        return -self.g(u) * v - self.F(u)

    def jerk(self, u, v):
        """u''' implied by the equation, obtained by differentiating it once."""
        a = self.acceleration(u, v)
        return -self.g.deriv()(u) * v * v - self.g(u) * a - self.F.deriv()(u) * v

    def __str__(self) -> str:
        return f"u'' + ({self.g}) u' + ({self.F}) = 0"


@dataclass(frozen=True, eq=False)
class SolutionCurve:
    """A function tau -> (u, u', u'') with declared poles and a validity interval.

    ``jet_at`` returns a :class:`Jet` at a float tau. ``vectorized`` (optional)
    maps an array of tau to u values without any pole checks; it is used by
    quadrature and plotting helpers.
    """

    jet_at: Callable[[float], Jet]
    poles: tuple[float, ...] = ()
    domain: tuple[float, float] = (-math.inf, math.inf)
    label: str = ""
    meta: Mapping[str, Any] = field(default_factory=dict)
    vectorized: Callable[[np.ndarray], np.ndarray] | None = None

    @classmethod
    def from_expression(cls, expr: Callable[[Any], Any], **kwargs) -> "SolutionCurve":
        """Wrap a closed-form expression tree written against jets/arrays."""

        def jet_at(tau):
            return Jet.lift(expr(Jet.variable(float(tau))))

        def vectorized(taus):
            taus = np.asarray(taus, dtype=float)
            out = expr(taus)
            return np.broadcast_to(np.asarray(out, dtype=float), taus.shape).copy()

        kwargs["poles"] = tuple(sorted(float(p) for p in kwargs.get("poles", ())))
        return cls(jet_at=jet_at, vectorized=vectorized, **kwargs)

    def check(self, tau: float) -> None:
        lo, hi = self.domain
        if not (lo <= tau <= hi):
            raise OutOfDomain(f"tau={tau!r} outside domain [{lo!r}, {hi!r}]")
        radius = exclusion_radius(tau)
        for p in self.poles:
            if abs(tau - p) <= radius:
                raise PoleProximity(tau, p)

    def eval(self, tau: float) -> tuple[float, float, float]:
        tau = float(tau)
        self.check(tau)
        j = self.jet_at(tau)
        return float(j.v), float(j.d), float(j.dd)

    def value(self, tau: float) -> float:
        return self.eval(tau)[0]

    def values(self, taus) -> np.ndarray:
        """u at many points, no pole checks; points at a pole come out non-finite."""
        taus = np.asarray(taus, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.vectorized is not None:
                return self.vectorized(taus)
            return np.array([float(self.jet_at(float(t)).v) for t in taus.ravel()]).reshape(taus.shape)

    def is_regular(self, tau: float) -> bool:
        try:
            self.check(float(tau))
        except (PoleProximity, OutOfDomain):
            return False
        return True


def residual(eq: LienardEquation, curve: SolutionCurve, tau: float) -> float:
    """u'' + g(u) u' + F(u) at ``tau`` using the curve's exact derivatives."""
    u, du, ddu = curve.eval(tau)
    return ddu + eq.g(u) * du + eq.F(u)


class ResidualSweep(NamedTuple):
    max_abs: float
    skipped: int
    worst_tau: float


def max_residual(eq: LienardEquation, curve: SolutionCurve, grid: Iterable[float]) -> ResidualSweep:
    """Max |residual| over the grid, skipping points near poles or outside the domain."""
    worst, worst_tau, skipped, used = 0.0, math.nan, 0, 0
    for tau in grid:
        try:
            r = abs(residual(eq, curve, tau))
        except (PoleProximity, OutOfDomain):
            skipped += 1
            continue
        used += 1
        if math.isnan(worst):
            continue
        if math.isnan(r) or r > worst:
            worst, worst_tau = r, float(tau)
    if used == 0:
        raise EmptyEffectiveGrid(f"all {skipped} grid points were skipped")
    return ResidualSweep(worst, skipped, worst_tau)
