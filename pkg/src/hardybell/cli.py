"""Command-line front end: ``hardybell <command> ...``.

Exit statuses: 0 success (including infeasible-but-valid thresholds),
1 usage error, 2 I/O error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, _kernels
from .analysis import (
    DEFAULT_PB_LIST,
    FIGURE1_SERIES,
    default_alpha_grid,
    default_eta_grid,
    noise_curve,
    threshold_case1,
    threshold_case2,
    threshold_case3,
    violation_curve,
)
from .hardy import ALPHA_H, build_hardy_state, hardy_conditions, hardy_fraction
from .inequality import MAX_ENTANGLED_REFERENCE, EberhardVariant
from .lhv import verify_lhv_bound
from .montecarlo import (
    ERROR_METHOD,
    RNG_ALGORITHM,
    TrialConfig,
    UnobservedSettingPairError,
    analytic_count_level_ratio,
    analytic_ratio,
    empirical_eberhard,
    run_trials,
)
from .qm import BasisParams, EfficiencySet, NoiseMode, NoiseParams

OUTPUT_DIR_ENV = "HARDYBELL_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v: float) -> str:
    """9 significant digits, '.' decimal separator."""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def _unit_interval(name):
    def parse(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {s!r}")
        if not (0.0 <= v <= 1.0):
            raise argparse.ArgumentTypeError(f"{name} must lie in [0, 1], got {s}")
        return v

    return parse


def _float_list(name):
    def parse(s):
        items = [x for x in s.replace(" ", "").split(",") if x]
        if not items:
            raise argparse.ArgumentTypeError(f"{name} must not be empty")
        vals = [_unit_interval(name)(x) for x in items]
        return vals

    return parse


def _positive_int(s):
    try:
        v = int(float(s))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if v < 1 or v != float(s):
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {s}")
    return v


def _header(title: str, **params) -> list[str]:
    lines = [f"# {title} (hardybell {__version__}, kernels: {_kernels.backend_name()})"]
    for k, v in params.items():
        lines.append(f"# {k} = {v}")
    lines.append(
        f"# reference: ideal maximally-entangled four-setting violation (3+2*sqrt(2))/3 = "
        f"{MAX_ENTANGLED_REFERENCE:.6f}"
    )
    return lines


def _emit(text: str, output: str | None, default_name: str) -> None:
    path = None
    if output:
        path = Path(output)
    elif os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / default_name
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}", file=sys.stderr)


def _curve_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "series"])
    for p in points:
        w.writerow([fmt(p.x), fmt(p.y), p.series_label])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_hardy(args) -> int:
    params = BasisParams(args.alpha, args.phi)
    h = build_hardy_state(params)
    conds = hardy_conditions(h)
    frac = hardy_fraction(args.alpha)
    lines = _header("Hardy state", alpha=args.alpha, phi=args.phi)
    if not h.entangled:
        lines.append("warning: factorized state (alpha at the boundary), Hardy fraction vanishes")
    for name, c in (("A", h.coeff_a), ("B", h.coeff_b), ("C", h.coeff_c)):
        lines.append(f"{name} = {fmt(c.real)} {'+' if c.imag >= 0 else '-'} {fmt(abs(c.imag))}i")
    labels = ("P(a+,a+)", "P(a+,b-)", "P(b-,a+)", "P(b+,b+)")
    for lab, v in zip(labels, conds):
        lines.append(f"{lab} = {fmt(v)}")
    lines.append(f"hardy fraction = {fmt(frac)}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_threshold(args) -> int:
    if args.case == "case1":
        res = threshold_case1(args.alpha)
        extra = {}
    elif args.case == "case2":
        res = threshold_case2(args.alpha, args.eta_r)
        extra = {"eta_r": args.eta_r}
    else:
        res = threshold_case3(args.alpha, args.eta_b)
        extra = {"eta_b": args.eta_b}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["case", "parameter", "closed_form", "bisection", "feasible"])
        bis = "" if res.bisection_value is None else fmt(res.bisection_value)
        w.writerow([args.case, res.parameter_name, fmt(res.critical_value), bis, str(res.feasible).lower()])
        sys.stdout.write(buf.getvalue())
        return EXIT_OK
    lines = _header(f"threshold {args.case}", alpha=args.alpha, **extra)
    lines.append(f"critical {res.parameter_name} (closed form) = {fmt(res.critical_value)}")
    if res.bisection_value is not None:
        lines.append(f"critical {res.parameter_name} (bisection)   = {fmt(res.bisection_value)}")
    lines.append(f"feasible = {str(res.feasible).lower()}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_noise_curve(args) -> int:
    grid = args.eta_grid if args.eta_grid is not None else list(default_eta_grid())
    points = []
    for equal, alpha in FIGURE1_SERIES:
        points.extend(noise_curve(equal, alpha, grid))
    _emit(_curve_csv(points), args.output, "noise_curve.csv")
    return EXIT_OK


def cmd_violation_curve(args) -> int:
    grid = args.alpha_grid if args.alpha_grid is not None else list(default_alpha_grid())
    if any(a <= 0.0 for a in grid):
        raise UsageError("alpha grid values must lie in (0, 1]")
    points = violation_curve(args.eta, args.pb, grid)
    _emit(_curve_csv(points), args.output, "violation_curve.csv")
    return EXIT_OK


def _efficiencies(args) -> EfficiencySet:
    eta_a = args.eta_a if args.eta_a is not None else args.eta
    eta_b = args.eta_b if args.eta_b is not None else args.eta
    vals = {
        "eta_la": eta_a if args.eta_la is None else args.eta_la,
        "eta_ra": eta_a if args.eta_ra is None else args.eta_ra,
        "eta_lb": eta_b if args.eta_lb is None else args.eta_lb,
        "eta_rb": eta_b if args.eta_rb is None else args.eta_rb,
    }
    return EfficiencySet(**vals)


def cmd_simulate(args) -> int:
    if not 0.0 <= args.alpha <= 1.0:
        raise UsageError("--alpha must lie in [0, 1]")
    eff = _efficiencies(args)
    variant = EberhardVariant(args.variant)
    cfg = TrialConfig(
        n_trials=args.trials,
        hardy_alpha=args.alpha,
        eff=eff,
        noise=NoiseParams(args.pb, NoiseMode.StateMixture),
        seed=args.seed,
        phi=args.phi,
    )
    tally = run_trials(cfg, workers=args.workers)
    try:
        emp = empirical_eberhard(tally, variant)
    except UnobservedSettingPairError as e:
        raise UsageError(str(e))
    ana = analytic_ratio(cfg, variant)
    lines = _header(
        "simulate",
        alpha=args.alpha,
        phi=args.phi,
        efficiencies=f"la={eff.eta_la} ra={eff.eta_ra} lb={eff.eta_lb} rb={eff.eta_rb}",
        p_b=args.pb,
        sampling_noise_mode="mixture",
        trials=args.trials,
        seed=args.seed,
        rng=RNG_ALGORITHM,
        std_error=ERROR_METHOD,
        variant=variant.value,
    )
    se = "undefined" if math.isnan(emp.std_error) else fmt(emp.std_error)
    lines.append(f"empirical ratio = {fmt(emp.ratio)} +/- {se}")
    lines.append(f"analytic ratio  = {fmt(ana.ratio)}")
    if args.pb > 0.0:
        cl = analytic_count_level_ratio(cfg, variant)
        lines.append(f"analytic ratio (count-level background, six inequality entries) = {fmt(cl.ratio)}")
    if not math.isnan(emp.std_error) and emp.std_error > 0 and math.isfinite(ana.ratio):
        lines.append(f"deviation = {fmt((emp.ratio - ana.ratio) / emp.std_error)} sigma")
    lines.append(f"violated = {str(emp.result.violated).lower()}")
    print("\n".join(lines))
    if args.tally_csv:
        with open(args.tally_csv, "w", newline="") as fh:
            fh.write(tally.to_csv())
    return EXIT_OK


def cmd_verify_lhv(args) -> int:
    cert = verify_lhv_bound(allow_noclick=not args.no_noclick)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["left_A", "left_B", "right_A", "right_B", "ch_value", "eberhard_excess"])
        for r in cert.records:
            s = r.strategy
            w.writerow([o.name for o in s.left] + [o.name for o in s.right] + [fmt(r.ch_value), fmt(r.eberhard_excess)])
        sys.stdout.write(buf.getvalue())
    else:
        lines = _header("verify-lhv", noclick=not args.no_noclick)
        lines.append(cert.report())
        print("\n".join(lines))
    return EXIT_OK if cert.holds else EXIT_INVARIANT


# ---------------------------------------------------------------------------


class _DefaultsFormatter(argparse.ArgumentDefaultsHelpFormatter):
    """Show defaults, except ``None`` ones whose help already explains the fallback."""

    def _get_help_string(self, action):
        if action.default is None:
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hardybell", description="Hardy-state Eberhard inequality analysis.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    d = _DefaultsFormatter

    alpha = _unit_interval("alpha")

    h = sub.add_parser("hardy", help="Hardy-state coefficients and conditions", formatter_class=d)
    h.add_argument("--alpha", type=alpha, default=ALPHA_H, help="basis overlap alpha in [0, 1]")
    h.add_argument("--phi", type=float, default=0.0, help="relative phase (radians)")
    h.set_defaults(func=cmd_hardy)

    t = sub.add_parser("threshold", help="critical efficiency for Case 1/2/3", formatter_class=d)
    t.add_argument("case", choices=["case1", "case2", "case3"])
    t.add_argument("--alpha", type=alpha, default=ALPHA_H, help="basis overlap alpha in (0, 1]")
    t.add_argument("--eta-r", type=_unit_interval("eta-r"), default=1.0, help="right efficiency (case2)")
    t.add_argument("--eta-b", type=_unit_interval("eta-b"), default=1.0, help="b-measurement efficiency (case3)")
    t.add_argument("--format", choices=["text", "csv"], default="text")
    t.set_defaults(func=cmd_threshold)

    n = sub.add_parser("noise-curve", help="maximum tolerable background vs eta_a (CSV)", formatter_class=d)
    n.add_argument("--eta-grid", type=_float_list("eta-grid"), default=None,
                   help="comma-separated eta_a values (default 0 to 1 step 0.005)")
    n.add_argument("--output", "-o", default=None,
                   help=f"CSV path (default: ${OUTPUT_DIR_ENV}/noise_curve.csv, else stdout)")
    n.set_defaults(func=cmd_noise_curve)

    v = sub.add_parser("violation-curve", help="Case-1 violation V vs alpha (CSV)", formatter_class=d)
    v.add_argument("--eta", type=_unit_interval("eta"), default=0.9, help="common efficiency")
    v.add_argument("--pb", type=_float_list("pb"), default=list(DEFAULT_PB_LIST),
                   help="comma-separated background levels")
    v.add_argument("--alpha-grid", type=_float_list("alpha-grid"), default=None,
                   help="comma-separated alpha values (default 0.005 to 0.995 step 0.005)")
    v.add_argument("--output", "-o", default=None,
                   help=f"CSV path (default: ${OUTPUT_DIR_ENV}/violation_curve.csv, else stdout)")
    v.set_defaults(func=cmd_violation_curve)

    s = sub.add_parser("simulate", help="Monte Carlo Bell test", formatter_class=d)
    s.add_argument("--alpha", type=alpha, default=ALPHA_H)
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--eta", type=_unit_interval("eta"), default=1.0, help="common efficiency")
    s.add_argument("--eta-a", type=_unit_interval("eta-a"), default=None, help="a-measurement efficiency (both sides)")
    s.add_argument("--eta-b", type=_unit_interval("eta-b"), default=None, help="b-measurement efficiency (both sides)")
    for side in ("la", "ra", "lb", "rb"):
        s.add_argument(f"--eta-{side}", type=_unit_interval(f"eta-{side}"), default=None,
                       help=f"override eta_{side}")
    s.add_argument("--pb", type=_unit_interval("pb"), default=0.0, help="white-noise fraction")
    s.add_argument("--trials", type=_positive_int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--variant", choices=[v.value for v in EberhardVariant], default="main")
    s.add_argument("--tally-csv", default=None, help="write the tally as CSV to this path")
    s.set_defaults(func=cmd_simulate)

    lv = sub.add_parser("verify-lhv", help="enumerate deterministic local strategies", formatter_class=d)
    lv.add_argument("--no-noclick", action="store_true", help="restrict to perfect detection (16 strategies)")
    lv.add_argument("--format", choices=["text", "csv"], default="text")
    lv.set_defaults(func=cmd_verify_lhv)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:
        print(f"hardybell: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"hardybell: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
