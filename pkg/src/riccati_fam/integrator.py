"""Dormand-Prince 5(4) integration of Lienard equations with dense output.

The second-order equation is integrated as the first-order system
(u, v) with v' = -g(u) v - F(u). Between accepted steps the trajectory is
reconstructed with quintic Hermite interpolation: u from (u, u', u'') and
v from (u', u'', u''') at both step ends, every derivative coming from the
equation itself. The reconstructed u'' is taken from the equation as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUp, InvalidParameter, StepLimitExceeded
from .jet import Jet
from .lienard import LienardEquation, SolutionCurve

BLOW_UP = 1e12

# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    # None: adaptive. A float forces constant steps of that size (unit tests of the order).
    fixed_step: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidParameter("tolerances must be positive")
        if self.max_steps < 1:
            raise InvalidParameter("max_steps must be at least 1")
        if self.fixed_step is not None and not self.fixed_step > 0:
            raise InvalidParameter("fixed_step must be positive")


def _hermite5(theta, h, p0, d0, dd0, p1, d1, dd1):
    t2 = theta * theta
    t3 = t2 * theta
    t4 = t3 * theta
    t5 = t4 * theta
    h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5
    h1 = theta - 6 * t3 + 8 * t4 - 3 * t5
    h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5)
    h3 = 10 * t3 - 15 * t4 + 6 * t5
    h4 = -4 * t3 + 7 * t4 - 3 * t5
    h5 = 0.5 * (t3 - 2 * t4 + t5)
    return p0 * h0 + h * d0 * h1 + h * h * dd0 * h2 + p1 * h3 + h * d1 * h4 + h * h * dd1 * h5


class _Trajectory:
    def __init__(self, eq, t, u, v):
        self.eq = eq
        self.t = np.asarray(t)
        self.u = np.asarray(u)
        self.v = np.asarray(v)
        self.a = eq.acceleration(self.u, self.v)
        self.j = eq.jerk(self.u, self.v)

    def state(self, tau):
        t = self.t
        if tau <= t[0]:
            k = 0
        else:
            k = min(int(np.searchsorted(t, tau)) - 1, len(t) - 2)
        if len(t) == 1:
            return float(self.u[0]), float(self.v[0])
        h = t[k + 1] - t[k]
        theta = (tau - t[k]) / h
        u = _hermite5(theta, h, self.u[k], self.v[k], self.a[k], self.u[k + 1], self.v[k + 1], self.a[k + 1])
        v = _hermite5(theta, h, self.v[k], self.a[k], self.j[k], self.v[k + 1], self.a[k + 1], self.j[k + 1])
        return float(u), float(v)

    def jet_at(self, tau):
        u, v = self.state(float(tau))
        return Jet(u, v, float(self.eq.acceleration(u, v)))

    def values(self, taus):
        taus = np.asarray(taus, dtype=float)
        return np.array([self.state(float(x))[0] for x in taus.ravel()]).reshape(taus.shape)


def _rms(x):
    return math.sqrt(float(np.mean(x * x)))


def integrate(
    eq: LienardEquation,
    u0: float,
    v0: float,
    span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
) -> SolutionCurve:
    """Integrate from (u0, v0) at span[0] to span[1] and return the dense trajectory.

    Raises BlowUp when |u| exceeds 1e12 and StepLimitExceeded when the step
    budget runs out.
    """
    cfg = cfg or IntegratorConfig()
    a, b = map(float, span)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise InvalidParameter("span must be finite with a < b")

    def f(y):
        return np.array([y[1], eq.acceleration(y[0], y[1])])

    y = np.array([float(u0), float(v0)])
    t = a
    ts, us, vs = [t], [y[0]], [y[1]]
    k0 = f(y)
    rtol, atol = cfg.rel_tol, cfg.abs_tol

    if cfg.fixed_step is not None:
        h = cfg.fixed_step
    else:
        sc = atol + rtol * np.abs(y)
        d0, d1 = _rms(y / sc), _rms(k0 / sc)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        d2 = _rms((f(y + h0 * k0) - k0) / sc) / h0
        h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
        h = min(100 * h0, h1, b - a)

    steps = 0
    while t < b:
        if steps >= cfg.max_steps:
            raise StepLimitExceeded(f"{cfg.max_steps} steps taken, reached tau={t!r} of {b!r}")
        steps += 1
        last = t + h >= b
        if last:
            h = b - t
        ks = [k0]
        for i in range(1, 7):
            yi = y + h * sum(c * k for c, k in zip(_A[i], ks))
            ks.append(f(yi))
        y_new = y + h * sum(c * k for c, k in zip(_A[6], ks))
        if not np.all(np.isfinite(y_new)) or abs(y_new[0]) > BLOW_UP:
            if cfg.fixed_step is not None or h < 1e-14 * max(1.0, abs(t)):
                raise BlowUp(t + h, float(y_new[0]))
            h *= 0.2
            continue
        if cfg.fixed_step is not None:
            err = 0.0
        else:
            sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms(h * sum(e * k for e, k in zip(_E, ks)) / sc)
        if err <= 1.0:
            t = b if last else t + h
            y, k0 = y_new, ks[6]
            ts.append(t)
            us.append(y[0])
            vs.append(y[1])
            if abs(y[0]) > BLOW_UP:
                raise BlowUp(t, float(y[0]))
            if cfg.fixed_step is None:
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < 1e-14 * max(1.0, abs(t)):
                raise BlowUp(t, float(y[0]))

    traj = _Trajectory(eq, ts, us, vs)
    return SolutionCurve(
        jet_at=traj.jet_at,
        domain=(a, b),
        label="rk45",
        meta={"t_steps": traj.t, "steps": steps},
        vectorized=traj.values,
    )
