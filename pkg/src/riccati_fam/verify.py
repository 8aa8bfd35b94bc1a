"""Independent numerical checks of closed-form solutions.

Every check returns a :class:`VerificationReport`; the suite runner catches
errors from individual checks and records them as failed reports, so one bad
check never hides the others.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyEffectiveGrid,
    OutOfDomain,
    PoleInLadder,
    PoleProximity,
    RiccatiFamError,
    UnmatchableAnchor,
)
from .integrator import IntegratorConfig, integrate
from .lienard import LienardEquation, SolutionCurve, max_residual
from .riccati import RiccatiODE, bernoulli_family, general_solution, max_riccati_residual

log = logging.getLogger(__name__)

CROSS_CHECK_THRESHOLD = 1e-6
EQUIVALENCE_THRESHOLD = 1e-8
RESIDUAL_THRESHOLD = 1e-8
NULL_THRESHOLD = 1e-12
RATIO_THRESHOLD = 0.05
FD_THRESHOLD = 1e-4

__all__ = [
    "IntegratorConfig",
    "VerificationReport",
    "integrate",
    "cross_check",
    "equivalence_check",
    "limit_suite",
    "limit_checks",
    "family_match",
    "fd_residual",
    "pole_free_segments",
    "run_suite",
]


@dataclass
class VerificationReport:
    check_name: str
    max_deviation: float
    residual_max: float
    skipped_points: int
    pole_list: list[float] = field(default_factory=list)
    passed: bool = False
    threshold: float = 0.0

    @classmethod
    def build(cls, name, deviation, residual, skipped, poles, threshold, residual_threshold=None):
        rt = threshold if residual_threshold is None else residual_threshold
        passed = bool(deviation <= threshold and residual <= rt)
        return cls(name, float(deviation), float(residual), int(skipped),
                   [float(p) for p in poles], passed, float(threshold))

    @classmethod
    def failure(cls, name, exc: Exception, threshold: float = 0.0):
        log.warning("%s failed: %s", name, exc)
        return cls(f"{name}: {type(exc).__name__}", math.inf, math.inf, 0, [], False, threshold)

    def to_json(self) -> str:
        def clean(x):
            return x if math.isfinite(x) else None

        d = asdict(self)
        d["max_deviation"] = clean(d["max_deviation"])
        d["residual_max"] = clean(d["residual_max"])
        return json.dumps(d, sort_keys=False)


# -- finite-difference fallback ---------------------------------------------------

def fd_residual(eq: LienardEquation, u, tau: float, h: float = 1e-3) -> float:
    """Residual with 5-point central differences, for curves without exact derivatives."""
    f = [u(tau + k * h) for k in (-2, -1, 0, 1, 2)]
    du = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
    ddu = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
    return ddu + eq.g(f[2]) * du + eq.F(f[2])


# -- helpers --------------------------------------------------------------------------

def pole_free_segments(span, poles: Iterable[float], margin: float, min_length: float | None = None):
    """Split ``span`` at the poles inside it, keeping ``margin`` away from each.

    Poles outside ``span`` are ignored: a member is integrable up to its
    range ends as long as they are not themselves singular.
    """
    a, b = map(float, span)
    if min_length is None:
        min_length = margin
    cuts = sorted(p for p in poles if a <= p <= b)
    segments, lo = [], a
    for p in cuts:
        hi = p - margin
        if hi - lo >= min_length:
            segments.append((lo, hi))
        lo = max(lo, p + margin)
    if b - lo >= min_length:
        segments.append((lo, b))
    return segments


def _sample(curve: SolutionCurve, points):
    vals, kept, skipped = [], [], 0
    for t in points:
        try:
            vals.append(curve.value(t))
            kept.append(t)
        except (PoleProximity, OutOfDomain):
            skipped += 1
    return np.array(kept), np.array(vals), skipped


# -- checks ---------------------------------------------------------------------------

def cross_check(
    closed: SolutionCurve,
    eq: LienardEquation,
    span,
    cfg: IntegratorConfig | None = None,
    threshold: float = CROSS_CHECK_THRESHOLD,
    n_samples: int = 1000,
    name: str = "cross_check",
) -> VerificationReport:
    """Integrate from the closed form's initial data and report the sup-norm gap."""
    a, b = map(float, span)
    u0, v0, _ = closed.eval(a)
    num = integrate(eq, u0, v0, (a, b), cfg)
    pts = np.union1d(num.meta["t_steps"], np.linspace(a, b, n_samples))
    kept, vals, skipped = _sample(closed, pts)
    dev = float(np.max(np.abs(vals - num.values(kept)))) if kept.size else math.inf
    res = max_residual(eq, closed, kept).max_abs if kept.size else math.inf
    poles = [p for p in closed.poles if a <= p <= b]
    return VerificationReport.build(name, dev, res, skipped, poles, threshold)


def equivalence_check(
    ode: RiccatiODE,
    u1: SolutionCurve,
    lam: float,
    span,
    anchor: float,
    tau_ref: float | None = None,
    form: str = "auto",
    threshold: float = EQUIVALENCE_THRESHOLD,
    n_points: int = 201,
    name: str = "equivalence",
) -> VerificationReport:
    """Compare the general-solution member with the Bernoulli solution through the same anchor value."""
    a, b = map(float, span)
    ref = anchor if tau_ref is None else tau_ref
    member = general_solution(ode, u1, lam, ref, form=form)
    ua = member.value(anchor)
    if ua == 0.0 or not math.isfinite(ua):
        raise UnmatchableAnchor(f"member value {ua!r} at anchor {anchor!r} is not reached by any K")
    # tau0 = anchor: u(anchor) = c2/(K - c1) or -1/K
    K = ode.c2 / ua + ode.c1 if ode.c2 != 0.0 else -1.0 / ua
    oracle = bernoulli_family(ode, K, anchor)
    pts = np.linspace(a, b, n_points)
    kept, vals, skipped = [], [], 0
    for t in pts:
        if not (member.curve.is_regular(t) and oracle.is_regular(t)):
            skipped += 1
            continue
        kept.append(t)
    kept = np.array(kept)
    if kept.size == 0:
        raise EmptyEffectiveGrid("no regular point in the equivalence span")
    mine = member.curve.values(kept)
    dev = float(np.max(np.abs(mine - oracle.values(kept))))
    res, _ = max_riccati_residual(ode, member.curve, kept[:: max(1, kept.size // 50)])
    poles = sorted(p for p in set(member.curve.poles) | set(oracle.poles) if a <= p <= b)
    return VerificationReport.build(name, dev, res, skipped, poles, threshold)


def family_match(closed: SolutionCurve, other: SolutionCurve, points, threshold=EQUIVALENCE_THRESHOLD,
                 name="family_match") -> VerificationReport:
    """Sup-norm gap between two parametrisations of the same family member."""
    pts = [t for t in points if closed.is_regular(t) and other.is_regular(t)]
    skipped = len(points) - len(pts)
    if not pts:
        raise EmptyEffectiveGrid("no common regular point")
    pts = np.array(pts)
    dev = float(np.max(np.abs(closed.values(pts) - other.values(pts))))
    return VerificationReport.build(name, dev, 0.0, skipped, [], threshold)


def _member_values(family, lam, probes):
    curve = family.member(lam)
    try:
        return np.array([curve.value(t) for t in probes])
    except PoleProximity as exc:
        raise PoleInLadder(f"lam={lam!r} is singular at tau={exc.tau!r}") from exc


def limit_checks(
    family,
    tau_probe: Sequence[float],
    lambda_ladder: Sequence[float],
    big: tuple[float, float] = (1e3, 2e3),
) -> list[VerificationReport]:
    """Null member, 1/lam approach to u1, and strict decrease in lam along the ladder.

    ``family`` needs ``member(lam)``, ``u1``, ``lambda_s(tau)`` and
    ``null_lambda``. Returns one report per law; the monotonicity report
    counts violations against a threshold of zero.
    """
    probes = [float(t) for t in tau_probe]
    ladder = sorted(float(x) for x in lambda_ladder)
    for t in probes:
        ls = family.lambda_s(t)
        for lo, hi in zip(ladder, ladder[1:]):
            if lo <= ls <= hi:
                raise PoleInLadder(f"singular lam={ls!r} at tau={t!r} lies in [{lo!r}, {hi!r}]")

    null = _member_values(family, family.null_lambda, probes)
    reports = [VerificationReport.build("limit_null", float(np.max(np.abs(null))), 0.0, 0, [], NULL_THRESHOLD)]

    u1 = np.array([family.u1.value(t) for t in probes])
    d1 = np.abs(_member_values(family, big[0], probes) - u1)
    d2 = np.abs(_member_values(family, big[1], probes) - u1)
    expected = big[1] / big[0]
    dev = float(np.max(np.abs(d1 / d2 / expected - 1.0)))
    reports.append(VerificationReport.build("limit_infinity", dev, 0.0, 0, [], RATIO_THRESHOLD))

    table = np.array([_member_values(family, lam, probes) for lam in ladder])
    violations = int(np.sum(np.diff(table, axis=0) >= 0.0)) if len(ladder) > 1 else 0
    reports.append(VerificationReport.build("monotonicity", float(violations), 0.0, 0, [], 0.0))
    return reports


def limit_suite(family, tau_probe, lambda_ladder, big=(1e3, 2e3)) -> VerificationReport:
    """All three limit laws folded into one report.

    The deviation of each law is divided by its own threshold (monotonicity
    contributes its violation count), so the combined report passes at
    threshold 1 exactly when every law does.
    """
    parts = limit_checks(family, tau_probe, lambda_ladder, big)
    scaled = [r.max_deviation / r.threshold if r.threshold > 0 else r.max_deviation for r in parts]
    return VerificationReport.build("limit_suite", max(scaled), 0.0, 0, [], 1.0)


# -- suite ------------------------------------------------------------------------------

def _guard(name, fn, threshold=0.0):
    try:
        out = fn()
    except (RiccatiFamError, ArithmeticError) as exc:
        return [VerificationReport.failure(name, exc, threshold)]
    return out if isinstance(out, list) else [out]


def _probes(family, grid, lams, margin, count=5):
    """Grid points regular for every lam needed by the limit suite and not straddled by lambda_s."""
    needed = sorted(set(lams) | {family.null_lambda, 1e3, 2e3})
    ladder = sorted(set(lams))
    curves = [family.member(l) for l in needed] + [family.u1]
    ok = []
    for t in grid:
        if any(any(abs(t - p) < margin for p in c.poles) or not c.is_regular(t) for c in curves):
            continue
        try:
            ls = family.lambda_s(t)
        except (ZeroDivisionError, ArithmeticError):
            continue
        if any(lo <= ls <= hi for lo, hi in zip(ladder, ladder[1:])):
            continue
        ok.append(float(t))
    if len(ok) <= count:
        return ok
    idx = np.linspace(0, len(ok) - 1, count).round().astype(int)
    return [ok[i] for i in idx]


def run_suite(
    family,
    lambdas: Sequence[float],
    grid: Sequence[float],
    cfg: IntegratorConfig | None = None,
    cross_threshold: float = CROSS_CHECK_THRESHOLD,
    margin: float | None = None,
) -> list[VerificationReport]:
    """Residual, integration, equivalence and limit checks for ``family`` over ``grid``."""
    grid = np.asarray(grid, dtype=float)
    a, b = float(grid[0]), float(grid[-1])
    margin = 0.02 * (b - a) if margin is None else margin
    eq, ode, u1 = family.equation, family.ode, family.u1
    reports: list[VerificationReport] = []

    for lam in lambdas:
        member = family.member(lam)
        poles = sorted(set(member.poles) | set(u1.poles))
        inside = [p for p in poles if a <= p <= b]
        far = [t for t in grid if all(abs(t - p) >= margin for p in inside)]
        skipped = len(grid) - len(far)

        def residual_report(member=member, far=far, skipped=skipped, inside=inside, lam=lam):
            sweep = max_residual(eq, member, far)
            first, _ = max_riccati_residual(ode, member, far)
            return VerificationReport.build(f"residual[lam={lam:g}]", first, sweep.max_abs,
                                            skipped + sweep.skipped, inside, RESIDUAL_THRESHOLD)

        reports += _guard(f"residual[lam={lam:g}]", residual_report, RESIDUAL_THRESHOLD)

        for lo, hi in pole_free_segments((a, b), inside, margin):
            tag = f"[lam={lam:g}][{lo:g},{hi:g}]"
            reports += _guard(
                f"cross_check{tag}",
                lambda lo=lo, hi=hi, m=member, tag=tag: cross_check(
                    m, eq, (lo, hi), cfg, cross_threshold, name=f"cross_check{tag}"),
                cross_threshold,
            )
            anchor = 0.5 * (lo + hi)
            w = member.value(anchor) - u1.value(anchor)
            if w == 0.0 or member.value(anchor) == 0.0:
                continue  # u1 itself or the null member: nothing Bernoulli-matchable to relabel
            lam_ref = 1.0 / w
            pts = np.linspace(lo, hi, 101)

            def equivalence(lo=lo, hi=hi, anchor=anchor, lam_ref=lam_ref, tag=tag):
                return equivalence_check(ode, u1, lam_ref, (lo, hi), anchor, form="quadrature",
                                         n_points=101, name=f"equivalence{tag}")

            def match(pts=pts, anchor=anchor, lam_ref=lam_ref, m=member, tag=tag, lo=lo, hi=hi):
                other = general_solution(ode, u1, lam_ref, anchor, form="quadrature").curve
                return family_match(m, other, list(pts), name=f"family_match{tag}")

            reports += _guard(f"equivalence{tag}", equivalence, EQUIVALENCE_THRESHOLD)
            reports += _guard(f"family_match{tag}", match, EQUIVALENCE_THRESHOLD)

    probes = _probes(family, grid, list(lambdas), margin)
    if probes:
        reports += _guard("limit_suite", lambda: limit_checks(family, probes, lambdas))
    else:
        reports.append(VerificationReport.failure("limit_suite", EmptyEffectiveGrid("no usable probe")))
    return reports
