"""Riccati reduction of the first factor and its one-parameter solution family.

With phi1(u) = c1 u + c2 the first factor [D - phi1(u)] u = 0 is the Riccati
equation u' = c1 u^2 + c2 u. Given any particular solution u1, every other
solution is

    u(tau) = u1(tau) + exp(I1(tau)) / (lam - c1 I2(tau))
    I1(tau) = int_{tau_ref}^{tau} (2 c1 u1 + c2),   I2(tau) = int_{tau_ref}^{tau} exp(I1)

and the member is singular wherever lam = c1 I2(tau).

Both integrals are taken from the reference point ``tau_ref``. The closed
forms for u1 specialise that choice to particular antiderivatives, so lam here
and the preset lam in :mod:`riccati_fam.families` differ by an affine
relabelling; compare families as solution sets, never by their lam values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jet as J
from .errors import InvalidParameter, OutOfDomain, PoleAtReference, PoleProximity
from .factorize import Factorization
from .jet import Jet
from .lienard import LienardEquation, SolutionCurve, exclusion_radius
from .quadrature import nested_increment

POLE_BISECT_TOL = 1e-12
POLE_MERGE_TOL = 1e-9
SCAN_BRACKETS = 1000


class Form(enum.Enum):
    CLOSED = "ClosedForm"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class RiccatiODE:
    """u' = c1 u^2 + c2 u."""

    c1: float
    c2: float

    def __post_init__(self):
        if self.c1 == 0.0:
            raise InvalidParameter("Riccati coefficient c1 must be nonzero")

    def rhs(self, u):
        return self.c1 * u * u + self.c2 * u

    @property
    def equilibrium(self) -> float:
        """The nonzero constant solution -c2/c1."""
        return -self.c2 / self.c1

    def residual(self, curve: SolutionCurve, tau: float) -> float:
        u, du, _ = curve.eval(tau)
        return du - self.rhs(u)


def reduce(f: Factorization) -> RiccatiODE:
    return RiccatiODE(f.phi1.c1, f.phi1.c2)


def max_riccati_residual(ode: RiccatiODE, curve: SolutionCurve, grid) -> tuple[float, int]:
    """(max |u' - c1 u^2 - c2 u|, skipped points) over a grid."""
    worst, skipped = 0.0, 0
    for tau in grid:
        try:
            r = abs(ode.residual(curve, tau))
        except (PoleProximity, OutOfDomain):
            skipped += 1
            continue
        if math.isnan(r) or r > worst:
            worst = r
    return worst, skipped


# -- elementary solutions ------------------------------------------------------

def _bernoulli_poles(c1, c2, K, tau0):
    if c2 == 0.0:
        return (tau0 - K / c1,)
    if K != 0.0 and c1 / K > 0.0:
        return (tau0 - math.log(c1 / K) / c2,)
    return ()


def bernoulli_family(ode: RiccatiODE, K: float, tau0: float = 0.0) -> SolutionCurve:
    """Solutions of u' = c1 u^2 + c2 u by separation of variables.

    c2 != 0: u = c2 / (K exp(-c2 (tau - tau0)) - c1); K = 0 is the equilibrium.
    c2 == 0: u = -1 / (c1 (tau - tau0) + K).
    Together with u = 0 these are all solutions.
    """
    c1, c2 = ode.c1, ode.c2
    K, tau0 = float(K), float(tau0)
    if c2 == 0.0:
        def expr(t):
            return -1.0 / (c1 * (t - tau0) + K)
    else:
        def expr(t):
            # c2/(K e^{-c2 s} - c1) with the c2 moved into the denominator, accurate for small c2 s
            return 1.0 / ((K - c1) / c2 + K * (J.expm1(-c2 * (t - tau0)) / c2))
    return SolutionCurve.from_expression(
        expr,
        poles=_bernoulli_poles(c1, c2, K, tau0),
        label=f"bernoulli(K={K:g})",
        meta={"variant": "bernoulli", "c1": c1, "c2": c2, "K": K, "tau0": tau0},
    )


def particular_solution(ode: RiccatiODE, tau0: float = 0.0, branch_const: float = 1.0) -> SolutionCurve:
    """A particular solution: -1/(c1 (tau - tau0)) when c2 = 0, else the K = branch_const member.

    ``branch_const = 0`` with c2 != 0 returns the equilibrium u = -c2/c1.
    """
    if ode.c2 == 0.0:
        return bernoulli_family(ode, 0.0, tau0)
    return bernoulli_family(ode, branch_const, tau0)


# -- general solution ------------------------------------------------------------

def _recognized(ode: RiccatiODE, u1: SolutionCurve):
    m = u1.meta
    if m.get("variant") != "bernoulli":
        return None
    same = math.isclose(m["c1"], ode.c1, rel_tol=1e-13) and math.isclose(m["c2"], ode.c2, rel_tol=1e-13, abs_tol=1e-300)
    if not same:
        return None
    return m["K"], m["tau0"]


def _as_form(form, closed_available: bool) -> Form:
    if isinstance(form, Form):
        return form
    if form == "auto":
        return Form.CLOSED if closed_available else Form.QUADRATURE
    try:
        return {"closed": Form.CLOSED, "quadrature": Form.QUADRATURE}[form]
    except KeyError:
        raise InvalidParameter(f"unknown form {form!r}") from None


def _component(u1: SolutionCurve, tau_ref: float) -> tuple[float, float]:
    lo, hi = u1.domain
    for p in u1.poles:
        if p < tau_ref:
            lo = max(lo, p)
        elif p > tau_ref:
            hi = min(hi, p)
    return lo, hi


@dataclass(frozen=True, eq=False)
class RiccatiFamilyMember:
    """One member u1 + exp(I1)/(lam - c1 I2) of the family generated by ``u1``."""

    u1: SolutionCurve
    c1: float
    c2: float
    lam: float
    tau0: float
    form: Form
    curve: SolutionCurve
    integrals: Callable[[float], tuple[float, float]] = field(repr=False)

    def eval(self, tau: float) -> tuple[float, float, float]:
        return self.curve.eval(tau)

    def value(self, tau: float) -> float:
        return self.curve.value(tau)

    def i1(self, tau: float) -> float:
        return self.integrals(tau)[0]

    def i2(self, tau: float) -> float:
        return self.integrals(tau)[1]

    def lambda_s(self, tau: float) -> float:
        """The singular parameter value c1 I2(tau)."""
        return self.c1 * self.i2(tau)


class _ClosedIntegrals:
    """I1, I2 from tau_ref for a separable particular solution, as jets."""

    def __init__(self, ode, K, t0, tau_ref):
        self.c1, self.c2, self.K, self.t0, self.r = ode.c1, ode.c2, K, t0, tau_ref
        if self.c2 == 0.0:
            self.Rr = self.c1 * (tau_ref - t0) + K
        else:
            self.Er = K * math.exp(-self.c2 * (tau_ref - t0))
            self.Dr = self._D(tau_ref, math)

    def member_expr(self, lam):
        c1, c2, K, t0, r = self.c1, self.c2, self.K, self.t0, self.r
        if c2 == 0.0:
            Rr = self.Rr

            def expr(t):
                R = c1 * (t - t0) + K
                return -1.0 / R + Rr * Rr / (R * (lam * R - c1 * Rr * (t - r)))
        else:
            Dr = self.Dr

            def expr(t):
                m = J.expm1(-c2 * (t - r))
                D = self._D(t, J)
                rho = Dr / D
                # exp(I1) = (1 + m) rho^2 and I2 = -rho m / c2; no products of small factors
                return c2 / D + (1.0 + m) * rho * rho / (lam + c1 * rho * (m / c2))
        return expr

    def _D(self, t, lib):
        # K exp(-c2 (t - t0)) - c1, written to survive small c2 (t - t0)
        return (self.K - self.c1) + self.K * lib.expm1(-self.c2 * (t - self.t0))

    def member_poles(self, lam):
        c1, c2, r = self.c1, self.c2, self.r
        if c2 == 0.0:
            if lam == self.Rr:
                return ()
            return (r - lam * self.Rr / (c1 * (lam - self.Rr)),)
        # root x* = exp(-c2 (tau* - r)) of the denominator, as x* - 1 = q
        den = lam * c2 * self.Er + c1 * self.Dr
        if den == 0.0:
            return ()
        q = lam * c2 * (c1 - self.Er) / den
        return (r - math.log1p(q) / c2,) if q > -1.0 and math.isfinite(q) else ()

    def __call__(self, tau):
        c1, c2, r = self.c1, self.c2, self.r
        if c2 == 0.0:
            R = c1 * (tau - self.t0) + self.K
            return 2.0 * math.log(abs(self.Rr / R)), self.Rr * (tau - r) / R
        m = math.expm1(-c2 * (tau - r))
        rho = self.Dr / self._D(tau, math)
        return -c2 * (tau - r) + 2.0 * math.log(abs(rho)), -rho * (m / c2)


class _QuadratureIntegrals:
    """I1, I2 from tau_ref by nested adaptive Gauss-Kronrod quadrature."""

    def __init__(self, ode, u1, tau_ref, rel_tol):
        self.c1, self.c2, self.u1, self.r, self.rel_tol = ode.c1, ode.c2, u1, tau_ref, rel_tol

    def f1(self, x):
        return 2.0 * self.c1 * self.u1.values(x) + self.c2

    def __call__(self, tau):
        return nested_increment(self.f1, self.r, float(tau), 0.0, rel_tol=self.rel_tol)

    def many(self, taus) -> np.ndarray:
        """(I1, I2) at many points, marching outward from tau_ref; shape (n, 2)."""
        taus = np.asarray(taus, dtype=float).ravel()
        out = np.empty((taus.size, 2))
        order = np.argsort(taus)
        right = [i for i in order if taus[i] >= self.r]
        left = [i for i in order[::-1] if taus[i] < self.r]
        for side in (right, left):
            pos, i1, i2 = self.r, 0.0, 0.0
            for i in side:
                d1, d2 = nested_increment(self.f1, pos, taus[i], i1, rel_tol=self.rel_tol)
                i1, i2, pos = i1 + d1, i2 + d2, taus[i]
                out[i] = i1, i2
        return out


def general_solution(
    ode: RiccatiODE,
    u1: SolutionCurve,
    lam: float,
    tau0: float,
    form: str | Form = "auto",
    rel_tol: float = 1e-10,
) -> RiccatiFamilyMember:
    """The family member with parameter ``lam``, integrals referenced at ``tau0``.

    ``form="auto"`` uses closed-form antiderivatives when ``u1`` is a
    separable (Bernoulli) solution of ``ode`` and quadrature otherwise.
    Quadrature members only know the poles of u1; their own singularities can
    be located with :func:`singular_locus`.
    """
    tau0, lam = float(tau0), float(lam)
    if not u1.is_regular(tau0) or not math.isfinite(u1.values(np.array([tau0]))[0]):
        raise PoleAtReference(f"particular solution is singular at tau0={tau0!r}")
    c1, c2 = ode.c1, ode.c2
    known = _recognized(ode, u1)
    form = _as_form(form, known is not None)
    if form is Form.CLOSED and known is None:
        raise InvalidParameter("closed form requires a separable particular solution of the same ODE")

    if form is Form.CLOSED:
        integrals = _ClosedIntegrals(ode, *known, tau0)
        curve = SolutionCurve.from_expression(
            integrals.member_expr(lam),
            poles=tuple(u1.poles) + integrals.member_poles(lam),
            domain=u1.domain,
            label=f"u_lambda(lam={lam:g})",
        )
        return RiccatiFamilyMember(u1, c1, c2, lam, tau0, form, curve, integrals)

    integrals = _QuadratureIntegrals(ode, u1, tau0, rel_tol)

    def jet_at(tau):
        u = u1.jet_at(tau)
        i1, i2 = integrals(tau)
        e = J.exp(Jet(i1, 2.0 * c1 * u.v + c2, 2.0 * c1 * u.d))
        I2 = Jet(i2, e.v, e.d)
        return u + e / (lam - c1 * I2)

    def vectorized(taus):
        taus = np.asarray(taus, dtype=float)
        ints = integrals.many(taus)
        base = u1.values(taus.ravel())
        return (base + np.exp(ints[:, 0]) / (lam - c1 * ints[:, 1])).reshape(taus.shape)

    lo, hi = _component(u1, tau0)
    curve = SolutionCurve(
        jet_at=jet_at,
        poles=tuple(p for p in u1.poles if lo <= p <= hi),
        domain=(lo, hi),
        label=f"u_lambda(lam={lam:g}, quadrature)",
        vectorized=vectorized,
    )
    return RiccatiFamilyMember(u1, c1, c2, lam, tau0, form, curve, integrals)


# -- singularities -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SingularLocus:
    lam: float
    lambda_s: Callable[[float], float] = field(repr=False)
    pole_positions: tuple[float, ...] = ()


def _literal_lambda_s(ode, u1, tau_ref, form="auto"):
    known = _recognized(ode, u1)
    if _as_form(form, known is not None) is Form.CLOSED:
        integrals = _ClosedIntegrals(ode, *known, tau_ref)

        def lambda_s(tau):
            return ode.c1 * integrals(tau)[1]

        return lambda_s, None
    q = _QuadratureIntegrals(ode, u1, tau_ref, 1e-10)

    def lambda_s(tau):
        return ode.c1 * q(tau)[1]

    return lambda_s, lambda taus: ode.c1 * q.many(taus)[:, 1]


def find_roots(fn: Callable[[float], float], a: float, b: float, nodes=None, values=None,
               n_brackets: int = SCAN_BRACKETS, accept: float = 1e-8) -> list[float]:
    """Sign-change scan plus bisection for the zeros of ``fn`` on [a, b].

    Non-finite samples are skipped. A bisected bracket is kept only if ``fn``
    is small there, so sign changes through a singularity of ``fn`` are
    discarded.
    """
    if nodes is None:
        nodes = np.linspace(a, b, n_brackets + 1)
    if values is None:
        values = []
        for x in nodes:
            try:
                values.append(fn(float(x)))
            except (ZeroDivisionError, OverflowError, ValueError, PoleProximity, OutOfDomain):
                values.append(math.nan)
    values = np.asarray(values, dtype=float)
    roots = []
    prev = None
    for x, fx in zip(nodes, values):
        if not math.isfinite(fx):
            prev = None
            continue
        if fx == 0.0:
            roots.append(float(x))
        elif prev is not None and prev[1] != 0.0 and (prev[1] < 0.0) != (fx < 0.0):
            lo, flo, hi = prev[0], prev[1], float(x)
            while hi - lo > POLE_BISECT_TOL:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                fm = fn(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm < 0.0) == (flo < 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
            if abs(fn(root)) <= accept:
                roots.append(root)
        prev = (float(x), fx)
    merged: list[float] = []
    for r in sorted(roots):
        if merged and r - merged[-1] < POLE_MERGE_TOL:
            continue
        merged.append(r)
    return merged


def singular_locus(
    ode: RiccatiODE,
    u1: SolutionCurve,
    lam: float,
    interval: tuple[float, float],
    tau_ref: float | None = None,
    lambda_s: Callable[[float], float] | None = None,
    n_brackets: int = SCAN_BRACKETS,
) -> SingularLocus:
    """Points of ``interval`` where lam = lambda_s(tau), i.e. where the member with ``lam`` blows up.

    By default lambda_s = c1 I2 with I2 integrated from ``tau_ref`` (the
    interval start unless given). A preset family may pass its own
    ``lambda_s`` to locate poles in its own lam convention.
    """
    a, b = map(float, interval)
    if not a < b:
        raise InvalidParameter("interval must satisfy a < b")
    lam = float(lam)
    many = None
    if lambda_s is None:
        ref = a if tau_ref is None else float(tau_ref)
        if not u1.is_regular(ref):
            raise PoleAtReference(f"particular solution is singular at tau_ref={ref!r}")
        lambda_s, many = _literal_lambda_s(ode, u1, ref)

    nodes = np.linspace(a, b, n_brackets + 1)
    regular = np.array([u1.is_regular(x) and not _near(u1.poles, x) for x in nodes])
    values = np.full(nodes.shape, math.nan)
    if many is not None:
        values[regular] = lam - many(nodes[regular])
    else:
        for i in np.flatnonzero(regular):
            try:
                values[i] = lam - lambda_s(float(nodes[i]))
            except (ZeroDivisionError, OverflowError, ValueError):
                pass

    def den(x):
        return lam - lambda_s(x)

    roots = find_roots(den, a, b, nodes=nodes, values=values, accept=1e-10 * max(1.0, abs(lam)))
    return SingularLocus(lam, lambda_s, tuple(roots))


def _near(poles, x):
    return any(abs(x - p) <= exclusion_radius(x) for p in poles)


# -- literal-convention family ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RiccatiFamily:
    """All members generated from ``u1`` with integrals referenced at ``tau_ref``.

    Exposes the same surface as the preset families (``u1``, ``member``,
    ``lambda_s``, ``null_lambda``) so verification code can treat them alike.
    """

    ode: RiccatiODE
    u1: SolutionCurve
    tau_ref: float
    form: str = "auto"
    equation: LienardEquation | None = None
    name: str = "custom"

    def member(self, lam: float) -> SolutionCurve:
        return general_solution(self.ode, self.u1, lam, self.tau_ref, self.form).curve

    def lambda_s(self, tau: float) -> float:
        fn, _ = _literal_lambda_s(self.ode, self.u1, self.tau_ref, self.form)
        return fn(tau)

    @property
    def null_lambda(self) -> float:
        """The parameter whose member is u = 0: exp(I1)/lam must cancel u1 at tau_ref."""
        u = self.u1.value(self.tau_ref)
        return -1.0 / u if u != 0.0 else math.inf
