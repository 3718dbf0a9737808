"""Batch command-line interface.

Verbs:
    approx   bootstrap approximations and write checkpoints
    certify  run the certification pipeline, write certificates
    digits   print certified digit strings from a certificate file
    plot     export rectangle-covering CSV data for one figure
    report   full pipeline plus digit files (certify + digits)

Flags map one-to-one onto RunConfig fields.  Only the worker count and the
scratch directory may come from the environment (RENORMCERT_WORKERS,
RENORMCERT_SCRATCH).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal
from pathlib import Path

from . import balls as fb
from . import pipeline as pl
from .errors import RenormcertError, StageFailure
from .rounding import Interval, RoundingContext

__all__ = ["main", "build_parser"]


def _default_workers() -> int:
    return int(os.environ.get("RENORMCERT_WORKERS", "1"))


def _default_scratch() -> str | None:
    return os.environ.get("RENORMCERT_SCRATCH")


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--degree", "-N", type=int, default=20,
                   help="polynomial truncation degree (default 20)")
    p.add_argument("--precision", "-P", type=int, default=30,
                   help="decimal digits in the significand (default 30)")
    p.add_argument("--rho", default="1e-8",
                   help="fixed-point ball radius as a decimal string")
    p.add_argument("--rho-delta", default=None,
                   help="parameter-scaling ball radius (default 10*rho)")
    p.add_argument("--rho-gamma", default=None,
                   help="noise-scaling ball radius (default 10*rho)")
    p.add_argument("--boundary-rects", "-M", type=int, default=64,
                   help="boundary covering rectangle count (default 64)")
    p.add_argument("--workers", type=int, default=_default_workers(),
                   help="worker processes for column bounds")
    p.add_argument("--targets", default="fixed_point,delta,gamma",
                   help="comma-separated subset of fixed_point,delta,gamma")
    p.add_argument("--output", "-o", default=None, help="output directory")
    p.add_argument("--checkpoint-dir", default=_default_scratch(),
                   help="directory for bootstrap checkpoints")


def _config_from_args(args) -> pl.RunConfig:
    return pl.RunConfig(
        degree=args.degree,
        precision=args.precision,
        rho=args.rho,
        rho_delta=args.rho_delta,
        rho_gamma=args.rho_gamma,
        boundary_rects=args.boundary_rects,
        workers=args.workers,
        targets=tuple(t.strip() for t in args.targets.split(",") if t.strip()),
        output_dir=args.output,
        checkpoint_dir=args.checkpoint_dir,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renormcert",
        description="Certified enclosures of the period-doubling universal constants")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("approx", help="bootstrap approximations and checkpoints")
    _add_config_flags(p)

    p = sub.add_parser("certify", help="run the certification pipeline")
    _add_config_flags(p)

    p = sub.add_parser("digits", help="print certified digits from a certificate")
    p.add_argument("certificate", help="path to a certificate_*.json file")
    p.add_argument("--plain", action="store_true",
                   help="print the plain digit string instead of the block layout")

    p = sub.add_parser("plot", help="export covering CSV for one figure")
    _add_config_flags(p)
    p.add_argument("--figure", required=True, choices=sorted(pl.FIGURES),
                   help="figure identifier")
    p.add_argument("--subdivisions", type=int, default=100,
                   help="graph subinterval count (fig1: boundary rectangles)")

    p = sub.add_parser("report", help="full pipeline: certificates, digits, report")
    _add_config_flags(p)

    return parser


def _cmd_approx(args) -> int:
    import dataclasses

    cfg = _config_from_args(args)
    if cfg.checkpoint_dir is None:
        cfg = dataclasses.replace(cfg, checkpoint_dir=cfg.output_dir or ".")
    from . import approx as ax
    from .balls import STANDARD_DISC

    g0_ball = pl._load_or_compute_ball(
        cfg, "g0", lambda: fb.ball_from_decimals(
            STANDARD_DISC, ax.approx_fixed_point(cfg.degree, cfg.precision),
            cfg.degree))
    g0 = [c.re.lo for c in g0_ball.coeffs]
    print(f"g0: degree {cfg.degree}, precision {cfg.precision}, G0(1) = {g0[0]}")
    for target in ("delta", "gamma"):
        if target not in cfg.targets:
            continue
        ball = pl._load_or_compute_ball(
            cfg, target + "0", lambda k=target: fb.ball_from_decimals(
                STANDARD_DISC, ax.approx_eigenpair(k, g0, cfg.precision)[0],
                cfg.degree))
        print(f"{target}0 = {ball.coeffs[0].re.lo}")
    print(f"checkpoints in {cfg.checkpoint_dir}")
    return 0


def _cmd_certify(args) -> int:
    cfg = _config_from_args(args)
    try:
        result = pl.run_pipeline(cfg)
    except StageFailure as exc:
        print(f"FAILED at stage {exc.stage}: {exc.__cause__}", file=sys.stderr)
        return 2
    for name, cert in result.certificates.items():
        print(f"{name}: PASS  rho={cert.rho}  epsilon={cert.epsilon}  kappa={cert.kappa}")
    for name, info in result.report["digits"].items():
        print(f"{name}: {info['count']} certified digits  {info['digits']}")
    if cfg.output_dir:
        print(f"outputs in {cfg.output_dir}")
    return 0


def _cmd_digits(args) -> int:
    data = json.loads(Path(args.certificate).read_text())
    payload = data.get("certificate", data)
    enclosures = payload.get("enclosures", {})
    if not enclosures:
        print("certificate has no enclosures (failed run?)", file=sys.stderr)
        return 2
    for name in sorted(enclosures):
        lo, hi = enclosures[name]
        text, count = pl.certified_digits(Interval(Decimal(lo), Decimal(hi)))
        print(f"{name}: {count} certified digits")
        print(text if args.plain else pl.format_digit_block(text), end="")
        print()
    return 0


def _cmd_plot(args) -> int:
    cfg = _config_from_args(args)
    try:
        result = pl.run_pipeline(cfg)
    except StageFailure as exc:
        print(f"FAILED at stage {exc.stage}: {exc.__cause__}", file=sys.stderr)
        return 2
    ctx = RoundingContext(cfg.precision)
    balls = {"G": result.balls.get("parameter") or result.balls["G0"],
             "V": result.balls.get("V0"), "W": result.balls.get("W0")}
    rows = pl.emit_plot_covering(ctx, args.figure, args.subdivisions, balls)
    out = Path(cfg.output_dir or ".") / f"{args.figure}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    pl.write_covering_csv(out, rows)
    print(f"{len(rows)} rectangles -> {out}")
    return 0


def _cmd_report(args) -> int:
    rc = _cmd_certify(args)
    return rc


_COMMANDS = {
    "approx": _cmd_approx,
    "certify": _cmd_certify,
    "digits": _cmd_digits,
    "plot": _cmd_plot,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except RenormcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
