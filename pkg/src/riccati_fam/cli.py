"""Command-line interface: ``riccati-fam factor | sample | verify | singular``.

Exit codes: 0 success, 1 verification failure (or no factorization found),
2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameter, RiccatiFamError
from .factorize import Branch, Factorization, check_factorization, factor_cubic_inverse, factor_equation
from .families import (
    EMDEN_LADDER,
    FISHER_LADDER,
    LIENARD_LADDER,
    CubicLienardParams,
    EmdenParams,
    FisherParams,
    Sign,
    preset,
)
from .lienard import LienardEquation, Polynomial
from .riccati import RiccatiFamily, bernoulli_family, reduce, singular_locus
from .verify import CROSS_CHECK_THRESHOLD, run_suite

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TOL_ENV = "RICCATI_FAM_TOL"
DEFAULT_COUNT = 200
DEFAULT_RANGES = {"emden": (0.1, 10.0), "fisher": (-5.0, 5.0), "lienard": (0.1, 5.0), "custom": (0.1, 5.0)}
DEFAULT_LADDERS = {"emden": EMDEN_LADDER, "fisher": FISHER_LADDER, "lienard": LIENARD_LADDER}


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    model: str
    params: dict = field(default_factory=dict)
    lambda_list: list[float] = field(default_factory=list)
    range: tuple[float, float, int] = (0.1, 5.0, DEFAULT_COUNT)
    tau0: float = 0.0
    output: str | None = None

    def __post_init__(self):
        start, stop, count = self.range
        if count < 2:
            raise UsageError("range count must be at least 2")
        if not start < stop:
            raise UsageError("range needs start < stop")
        if self.model == "custom" and not ("g" in self.params and "F" in self.params):
            raise UsageError("model custom requires --g and --F")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(*self.range[:2], self.range[2])


class Model(NamedTuple):
    family: object
    equation: LienardEquation
    factorizations: list[Factorization]
    describe: dict


# -- parsing ----------------------------------------------------------------------------

def _reals(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def _range(text: str) -> tuple[float, float, int | None]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected start:stop[:count], got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2]) if len(parts) == 3 else None
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    return start, stop, count


def _glue(argv: Sequence[str]) -> list[str]:
    """Join every ``--opt value`` pair into ``--opt=value``.

    All options here take a value, and gluing lets values such as
    ``-0.2,-1`` or ``-5:5`` through argparse's negative-number heuristics.
    """
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and tok != "--help" and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=("emden", "fisher", "lienard", "custom"), required=True)
    emden = common.add_argument_group("emden")
    emden.add_argument("--alpha", type=float)
    emden.add_argument("--beta", type=float)
    emden.add_argument("--branch", choices=("plus", "minus"), help="root of 2C a1^2 + g1 a1 + 1 = 0")
    emden.add_argument("--a1sqrtbeta", type=float, help="emden shortcut: the product a1*sqrt(beta)")
    fisher = common.add_argument_group("fisher")
    fisher.add_argument("--mu", type=float)
    fisher.add_argument("--sign", choices=("plus", "minus"), default="plus")
    lien = common.add_argument_group("lienard")
    for name in ("A", "B", "C", "a1"):
        lien.add_argument(f"--{name}", type=float)
    custom = common.add_argument_group("custom")
    custom.add_argument("--g", type=_reals, help="damping coefficients g0,g1")
    custom.add_argument("--F", type=_reals, help="force coefficients F0,F1,F2[,F3]")
    custom.add_argument("--K", type=float, help="Bernoulli constant of the particular solution")
    custom.add_argument("--tau-ref", type=float, help="lower limit of the family integrals")
    run = common.add_argument_group("run")
    run.add_argument("--lambdas", type=_reals)
    run.add_argument("--range", type=_range, help="start:stop[:count]")
    run.add_argument("--tau0", type=float, default=0.0)
    run.add_argument("--out")
    run.add_argument("--log-level", default="WARNING")

    parser = argparse.ArgumentParser(prog="riccati-fam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("factor", parents=[common], help="print the factorization(s)")
    sub.add_parser("sample", parents=[common], help="CSV of family members on a grid")
    sub.add_parser("verify", parents=[common], help="JSON verification reports")
    sub.add_parser("singular", parents=[common], help="pole positions of one member")
    return parser


def spec_from_args(ns: argparse.Namespace) -> RunSpec:
    keys = ("alpha", "beta", "branch", "a1sqrtbeta", "mu", "sign", "A", "B", "C", "a1", "g", "F", "K", "tau_ref")
    params = {k: getattr(ns, k) for k in keys if getattr(ns, k) is not None}
    start, stop = DEFAULT_RANGES[ns.model]
    count = DEFAULT_COUNT
    if ns.range is not None:
        start, stop, c = ns.range
        count = DEFAULT_COUNT if c is None else c
    lambdas = ns.lambdas if ns.lambdas is not None else list(DEFAULT_LADDERS.get(ns.model, ()))
    return RunSpec(ns.model, params, lambdas, (start, stop, count), ns.tau0, ns.out)


# -- model resolution ---------------------------------------------------------------------

def _need(params, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))
    return [params[n] for n in names]


def _branch(text: str | None) -> Branch | None:
    return None if text is None else {"plus": Branch.PLUS_ROOT, "minus": Branch.MINUS_ROOT}[text]


def _custom_family(spec: RunSpec, eq: LienardEquation, found: list[Factorization]):
    wanted = _branch(spec.params.get("branch"))
    chosen = [f for f in found if wanted is None or f.branch is wanted]
    if not chosen:
        raise InvalidParameter("no factorization on the requested branch")
    f = chosen[0]
    ode = reduce(f)
    K = spec.params.get("K", 0.0 if ode.c2 == 0.0 else 1.0)
    u1 = bernoulli_family(ode, K, spec.tau0)
    ref = spec.params.get("tau_ref")
    if ref is None:
        ref = next((float(t) for t in spec.grid if u1.is_regular(t)), None)
        if ref is None:
            raise InvalidParameter("particular solution has no regular point in the range")
    return RiccatiFamily(ode, u1, ref, equation=eq, name="custom"), {"K": K, "tau_ref": ref, "c1": ode.c1, "c2": ode.c2}


def resolve(spec: RunSpec, need_family: bool = True) -> Model:
    p, model = spec.params, spec.model
    if model == "emden":
        if "a1sqrtbeta" in p:
            params = EmdenParams.from_a1sqrtbeta(p["a1sqrtbeta"], beta=p.get("beta", 1.0), tau0=spec.tau0)
            found = [preset(params).factorization]
        else:
            alpha, beta = _need(p, "alpha", "beta")
            found = factor_cubic_inverse(0.0, alpha, 0.0, 0.0, beta)
            wanted = _branch(p.get("branch"))
            if wanted is not None:
                found = [f for f in found if f.branch is wanted]
            if not need_family:
                return Model(None, LienardEquation(Polynomial((0.0, alpha)), Polynomial((0.0, 0.0, 0.0, beta))),
                             found, {"model": model, "alpha": alpha, "beta": beta})
            if wanted is None:
                raise UsageError("--branch plus|minus is required with --alpha/--beta (or use --a1sqrtbeta)")
            params = EmdenParams(alpha, beta, wanted, tau0=spec.tau0)
        fam = preset(params)
        return Model(fam, fam.equation, found, {"model": model, **fam.describe()})
    if model == "fisher":
        (mu,) = _need(p, "mu")
        fam = preset(FisherParams(mu, _sign(p), tau0=spec.tau0))
        return Model(fam, fam.equation, [fam.factorization], {"model": model, **fam.describe()})
    if model == "lienard":
        A, B, C, a1 = _need(p, "A", "B", "C", "a1")
        fam = preset(CubicLienardParams(A, B, C, a1, tau0=spec.tau0))
        return Model(fam, fam.equation, [fam.factorization], {"model": model, **fam.describe()})
    g, F = _need(p, "g", "F")
    eq = LienardEquation(Polynomial(g), Polynomial(F))
    found = factor_equation(eq)
    desc = {"model": model, "g": str(eq.g), "F": str(eq.F)}
    if not need_family:
        return Model(None, eq, found, desc)
    fam, extra = _custom_family(spec, eq, found)
    desc.update(extra)
    return Model(fam, eq, found, desc)


def _sign(p) -> Sign:
    return Sign.PLUS if p.get("sign", "plus") == "plus" else Sign.MINUS


# -- output -----------------------------------------------------------------------------

@contextmanager
def _sink(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _num(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.17g}"


def _label(x: float) -> str:
    return f"{x:g}"


def _describe_line(desc: dict) -> str:
    return " ".join(f"{k}={_label(v) if isinstance(v, float) else v}" for k, v in desc.items())


# -- commands -----------------------------------------------------------------------------

def cmd_factor(spec: RunSpec, out) -> int:
    m = resolve(spec, need_family=False)
    print(f"equation: {m.equation}", file=out)
    print(f"factorizations: {len(m.factorizations)}", file=out)
    for i, f in enumerate(m.factorizations, 1):
        chk = check_factorization(m.equation, f)
        head = [f"[{i}]"]
        if f.branch is not None:
            head.append(f"branch={f.branch.value}")
        if f.a1 is not None:
            head.append(f"a1={f.a1:.12g}")
        if f.delta is not None:
            head.append(f"delta={f.delta:.12g}")
        print(" ".join(head), file=out)
        print(f"  phi1 = {f.phi1.as_polynomial()}", file=out)
        print(f"  phi2 = {f.phi2}", file=out)
        print(f"  g = {f.g}", file=out)
        print(f"  F = {f.F}", file=out)
        print(f"  damping_mismatch = {chk.damping_mismatch:.3e}", file=out)
        print(f"  force_mismatch = {chk.force_mismatch:.3e}", file=out)
        print(f"  passed = {str(chk.passed).lower()}", file=out)
    return EXIT_OK if m.factorizations else EXIT_FAIL


def cmd_sample(spec: RunSpec, out) -> int:
    m = resolve(spec)
    if not spec.lambda_list:
        raise UsageError("--lambdas is required for this model")
    grid = spec.grid
    curves = [m.family.member(lam) for lam in spec.lambda_list]
    print(f"# model: {spec.model}", file=out)
    print(f"# params: {_describe_line(m.describe)}", file=out)
    lo, hi = grid[0], grid[-1]
    for lam, c in zip(spec.lambda_list, curves):
        poles = " ".join(_num(p) for p in c.poles if lo <= p <= hi)
        print(f"# poles[lambda={_label(lam)}]: {poles}", file=out)
    print(",".join(["tau"] + [f"u_lambda_{_label(lam)}" for lam in spec.lambda_list]), file=out)
    for t in grid:
        row = [_num(t)]
        for c in curves:
            row.append(_num(c.value(t)) if c.is_regular(t) else "nan")
        print(",".join(row), file=out)
    return EXIT_OK


def _threshold() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return CROSS_CHECK_THRESHOLD
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def cmd_verify(spec: RunSpec, out) -> int:
    tol = _threshold()
    m = resolve(spec)
    if not spec.lambda_list:
        raise UsageError("--lambdas is required for this model")
    reports = run_suite(m.family, spec.lambda_list, spec.grid, cross_threshold=tol)
    for r in reports:
        print(r.to_json(), file=out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_singular(spec: RunSpec, out) -> int:
    if len(spec.lambda_list) != 1:
        raise UsageError("singular needs exactly one value in --lambdas")
    m = resolve(spec)
    fam = m.family
    (lam,) = spec.lambda_list
    a, b = spec.range[:2]
    if isinstance(fam, RiccatiFamily):
        locus = singular_locus(fam.ode, fam.u1, lam, (a, b), tau_ref=fam.tau_ref)
    else:
        locus = singular_locus(fam.ode, fam.u1, lam, (a, b), lambda_s=fam.lambda_s)
    for p in locus.pole_positions:
        p = 0.0 if abs(p) < 5e-13 else p
        print(f"{p:.12f}", file=out)
    return EXIT_OK


COMMANDS = {"factor": cmd_factor, "sample": cmd_sample, "verify": cmd_verify, "singular": cmd_singular}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(_glue(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=ns.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(ns)
        with _sink(spec.output) as out:
            return COMMANDS[ns.command](spec, out)
    except (UsageError, InvalidParameter) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RiccatiFamError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
