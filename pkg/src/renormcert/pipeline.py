"""End-to-end orchestration: bootstrap, certify, extract digits, export coverings.

The pipeline order is fixed by the mathematics: the eigen problems take the
underlying map from a ball proven to contain the fixed point, so the
fixed-point certificate always runs first and its a-posteriori radius
epsilon/(1-kappa) (the tightest proven enclosure of the fixed point) is
used as the parameter-ball radius for both eigen certificates.

A single configured rho names the fixed-point ball radius; the eigen ball
radii default to one decade above it (they are separately configurable).
The movement bound of an eigen problem scales with the parameter-ball
radius times a problem constant of order 10**3..10**4, so eigen radii sit
above the fixed-point posterior radius by those factors; the certified
digit count for each eigenvalue is set directly by its own radius.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from decimal import Decimal
from pathlib import Path

from . import approx as ax
from . import balls as fb
from . import operators as op
from .contraction import (
    DeltaProblem,
    FixedPointProblem,
    GammaProblem,
    LinearMap,
    certify as _certify,
)
from .balls import FunctionBall, STANDARD_DISC
from .errors import (
    ConfigError,
    MissingCertificate,
    PipelineOrderError,
    RenormcertError,
    StageFailure,
)
from .rounding import Interval, Rectangle, RoundingContext, interval, rectangle

__all__ = [
    "RunConfig",
    "PipelineResult",
    "run_pipeline",
    "certified_digits",
    "format_digit_block",
    "emit_plot_covering",
    "write_covering_csv",
    "serialize_linear_map",
    "deserialize_linear_map",
    "FIGURES",
]

_TARGETS = ("fixed_point", "delta", "gamma")
REPORT_SCHEMA = "renormcert-report/1"


@dataclass(frozen=True)
class RunConfig:
    degree: int = 20
    precision: int = 30
    rho: str = "1e-8"
    rho_delta: str | None = None
    rho_gamma: str | None = None
    boundary_rects: int = 64
    workers: int = 1
    targets: tuple[str, ...] = _TARGETS
    output_dir: str | None = None
    checkpoint_dir: str | None = None

    def __post_init__(self):
        if self.degree < 4:
            raise ConfigError("degree must be >= 4")
        if self.precision < 15:
            raise ConfigError("precision must be >= 15 digits")
        if self.boundary_rects < 4 or self.boundary_rects % 4 != 0:
            raise ConfigError("boundary_rects must be >= 4 and divisible by 4")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for name in (self.rho, self.rho_delta, self.rho_gamma):
            if name is None:
                continue
            value = Decimal(name)
            if not value.is_finite() or value <= 0:
                raise ConfigError(f"radius {name!r} must be a positive number")
        unknown = set(self.targets) - set(_TARGETS)
        if unknown:
            raise ConfigError(f"unknown targets: {sorted(unknown)}")
        if not self.targets:
            raise ConfigError("at least one target required")
        if ("delta" in self.targets or "gamma" in self.targets) \
                and "fixed_point" not in self.targets:
            raise PipelineOrderError(
                "delta/gamma certification needs the fixed-point certificate")

    def rho_for(self, target: str) -> Decimal:
        if target == "fixed_point":
            return Decimal(self.rho)
        override = self.rho_delta if target == "delta" else self.rho_gamma
        if override is not None:
            return Decimal(override)
        return Decimal(self.rho) * 10

    def describe(self) -> dict:
        return {
            "degree": self.degree,
            "precision": self.precision,
            "rho": str(self.rho_for("fixed_point")),
            "rho_delta": str(self.rho_for("delta")),
            "rho_gamma": str(self.rho_for("gamma")),
            "boundary_rects": self.boundary_rects,
            "targets": list(self.targets),
        }


@dataclass
class PipelineResult:
    config: RunConfig
    report: dict
    certificates: dict = field(default_factory=dict)
    balls: dict = field(default_factory=dict)
    domain_extension: op.DomainExtensionResult | None = None


# -- checkpoints --------------------------------------------------------------

def serialize_linear_map(lam: LinearMap) -> str:
    lines = ["renormcert-lambda v1", f"dim {lam.dim}", f"tail {lam.tail_scalar}"]
    for row in lam.matrix:
        lines.append("row " + " ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def deserialize_linear_map(text: str) -> LinearMap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "renormcert-lambda v1":
        raise ConfigError("not a serialized linear map")
    tail = None
    rows = []
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        if key == "tail":
            tail = Decimal(rest)
        elif key == "row":
            rows.append(tuple(Decimal(x) for x in rest.split()))
    return LinearMap(tuple(rows), tail)


def _checkpoint_path(directory: str, name: str, cfg: RunConfig) -> Path:
    return Path(directory) / f"{name}_n{cfg.degree}_p{cfg.precision}.txt"


def _load_or_compute_ball(cfg: RunConfig, name: str, compute) -> FunctionBall:
    if cfg.checkpoint_dir:
        path = _checkpoint_path(cfg.checkpoint_dir, name, cfg)
        if path.exists():
            return fb.deserialize_ball(path.read_text())
    ball = compute()
    if cfg.checkpoint_dir:
        path = _checkpoint_path(cfg.checkpoint_dir, name, cfg)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(fb.serialize_ball(ball))
    return ball


def _load_or_compute_lambda(cfg: RunConfig, name: str, compute) -> LinearMap:
    if cfg.checkpoint_dir:
        path = _checkpoint_path(cfg.checkpoint_dir, name, cfg)
        if path.exists():
            return deserialize_linear_map(path.read_text())
    lam = compute()
    if cfg.checkpoint_dir:
        path = _checkpoint_path(cfg.checkpoint_dir, name, cfg)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_linear_map(lam))
    return lam


# -- digit extraction ----------------------------------------------------------

def certified_digits(enclosure: Interval) -> tuple[str, int]:
    """Longest decimal digit string valid for every member of the enclosure.

    Both endpoints must share the digit prefix when written out exactly;
    the count is the number of significant digits in that prefix.  Returns
    ("", 0) when no digit is certain.
    """
    lo, hi = enclosure.lo, enclosure.hi
    if lo == hi == 0:
        return "0", 1
    if lo < 0 < hi or lo == 0 or hi == 0:
        return "", 0
    sign = ""
    if hi < 0:
        sign = "-"
        lo, hi = hi.copy_abs(), lo.copy_abs()
    dlo, dhi = lo.as_tuple(), hi.as_tuple()
    adj_lo = dlo.exponent + len(dlo.digits) - 1
    adj_hi = dhi.exponent + len(dhi.digits) - 1
    if adj_lo != adj_hi:
        return "", 0
    adj = adj_lo
    width = max(len(dlo.digits), len(dhi.digits))
    a = list(dlo.digits) + [0] * (width - len(dlo.digits))
    b = list(dhi.digits) + [0] * (width - len(dhi.digits))
    prefix = []
    for da, db in zip(a, b):
        if da != db:
            break
        prefix.append(str(da))
    count = len(prefix)
    if count == 0:
        return "", 0
    digits = "".join(prefix)
    if adj < 0:
        text = sign + "0." + "0" * (-adj - 1) + digits
    elif count > adj:
        text = sign + digits[: adj + 1]
        if count > adj + 1:
            text += "." + digits[adj + 1:]
    else:
        mantissa = digits[0] + ("." + digits[1:] if count > 1 else "")
        text = f"{sign}{mantissa}e+{adj}"
    return text, count


def format_digit_block(digit_string: str, per_group: int = 10,
                       groups_per_line: int = 5) -> str:
    """Grouped layout: sign and integer part, then rows of digit groups."""
    body = digit_string
    sign = ""
    if body.startswith(("-", "+")):
        sign, body = body[0], body[1:]
    head, _, frac = body.partition(".")
    lines = [f"{sign or '+'}{head}."]
    groups = [frac[i:i + per_group] for i in range(0, len(frac), per_group)]
    for i in range(0, len(groups), groups_per_line):
        lines.append(" ".join(groups[i:i + groups_per_line]))
    return "\n".join(lines) + "\n"


# -- pipeline -----------------------------------------------------------------

def _stage(report, timings, name):
    class _StageTimer:
        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            timings[name] = round(time.perf_counter() - self.start, 6)
            if exc is not None:
                report["failed_stage"] = name
                report["failure"] = f"{type(exc).__name__}: {exc}"
            return False
    return _StageTimer()


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    """Bootstrap, verify domain extension, certify every requested target.

    On any stage failure a partial report (with the failed stage named) is
    written to the output directory before the error propagates wrapped in
    StageFailure.
    """
    ctx = RoundingContext(cfg.precision)
    domain = STANDARD_DISC
    n = cfg.degree
    report: dict = {"schema": REPORT_SCHEMA, "config": cfg.describe(),
                    "checksums": {}, "certificates": {}, "digits": {}}
    timings: dict = {}
    result = PipelineResult(config=cfg, report=report)
    try:
        with _stage(report, timings, "approx"):
            g0_ball = _load_or_compute_ball(
                cfg, "g0", lambda: fb.ball_from_decimals(
                    domain, ax.approx_fixed_point(n, cfg.precision), n))
            g0 = [c.re.lo for c in g0_ball.coeffs]
            lam_fixed = _load_or_compute_lambda(
                cfg, "lambda_fixed", lambda: ax.build_lambda(
                    "fixed_point", ax.approx_jacobian("fixed_point", g0, digits=cfg.precision),
                    cfg.precision))
            report["checksums"]["g0"] = fb.ball_checksum(g0_ball)
            eigen_data = {}
            for target, kind in (("delta", "delta_eigen"), ("gamma", "gamma_eigen")):
                if target not in cfg.targets:
                    continue
                x0_ball = _load_or_compute_ball(
                    cfg, target + "0", lambda k=target: fb.ball_from_decimals(
                        domain, ax.approx_eigenpair(k, g0, cfg.precision)[0], n))
                x0 = [c.re.lo for c in x0_ball.coeffs]
                lam = _load_or_compute_lambda(
                    cfg, "lambda_" + target, lambda k=kind, v=x0: ax.build_lambda(
                        k, ax.approx_jacobian(k, g0, v, digits=cfg.precision),
                        cfg.precision, lambda0=v[0]))
                eigen_data[target] = (x0_ball, lam)
                report["checksums"][target + "0"] = fb.ball_checksum(x0_ball)
            result.balls["G0"] = g0_ball

        with _stage(report, timings, "domain_extension"):
            rho_fixed = cfg.rho_for("fixed_point")
            g_ball = fb.inflate(ctx, g0_ball, rho_fixed)
            result.domain_extension = op.check_domain_extension(
                ctx, g_ball, cfg.boundary_rects)
            report["domain_extension"] = {
                "rectangles": cfg.boundary_rects, "passed": True}

        with _stage(report, timings, "fixed_point"):
            cert = _certify(ctx, FixedPointProblem(), g0_ball, lam_fixed,
                            rho_fixed, workers=cfg.workers,
                            config=_cert_config(cfg, "fixed_point",
                                                report["checksums"]))
            result.certificates["fixed_point"] = cert
            report["certificates"]["fixed_point"] = cert.to_payload()
            _record_digits(report, "a", cert.enclosures["a"])
            _record_digits(report, "alpha", cert.enclosures["alpha"])

        if eigen_data:
            with _stage(report, timings, "parameter_ball"):
                param = fb.inflate(ctx, g0_ball,
                                   result.certificates["fixed_point"].posterior_radius)
                tables = op.OperatorTables.build(ctx, op.precompute_shared(ctx, param))
                result.balls["parameter"] = param

        for target, problem_cls in (("delta", DeltaProblem), ("gamma", GammaProblem)):
            if target not in eigen_data:
                continue
            with _stage(report, timings, target):
                x0_ball, lam = eigen_data[target]
                problem = problem_cls(ctx, param, tables)
                cert = _certify(ctx, problem, x0_ball, lam, cfg.rho_for(target),
                                workers=cfg.workers,
                                config=_cert_config(cfg, target,
                                                    report["checksums"]))
                result.certificates[target] = cert
                result.balls["V0" if target == "delta" else "W0"] = x0_ball
                report["certificates"][target] = cert.to_payload()
                _record_digits(report, target, cert.enclosures[target])
    except RenormcertError as exc:
        report["timings"] = timings
        _write_outputs(cfg, result, partial=True)
        raise StageFailure(report.get("failed_stage", "unknown"), exc) from exc

    report["timings"] = timings
    _write_outputs(cfg, result, partial=False)
    return result


def _cert_config(cfg: RunConfig, target: str, checksums: dict) -> dict:
    return {"degree": cfg.degree, "precision": cfg.precision,
            "rho": str(cfg.rho_for(target)), "boundary_rects": cfg.boundary_rects,
            "input_checksums": dict(checksums)}


def _record_digits(report: dict, name: str, enclosure: Interval):
    text, count = certified_digits(enclosure)
    report["digits"][name] = {"digits": text, "count": count}


def _write_outputs(cfg: RunConfig, result: PipelineResult, partial: bool):
    if not cfg.output_dir:
        return
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = dict(result.report)
    report["partial"] = partial
    report["execution"] = {"workers": cfg.workers}
    (out / "report.json").write_text(json.dumps(report, indent=2, default=str))
    for name, cert in result.certificates.items():
        (out / f"certificate_{name}.json").write_text(
            json.dumps(cert.to_json_dict(), indent=2))
    for name, info in report.get("digits", {}).items():
        if info["count"]:
            (out / f"digits_{name}.txt").write_text(format_digit_block(info["digits"]))


# -- plot coverings ---------------------------------------------------------------

#: figure id -> (target, x-range, extension depth); None range means the
#: real section of the domain disc (or its preimage under the squaring map)
FIGURES = {
    "fig1": ("domain_extension", None, 0),
    "fig2a": ("G", None, 0),
    "fig2b": ("g", None, 0),
    "fig2c": ("G", ("-6", "10"), 4),
    "fig2d": ("g", ("-3.1", "3.1"), 4),
    "fig3a": ("V", None, 0),
    "fig3b": ("v", None, 0),
    "fig3c": ("V", ("-3", "8"), 4),
    "fig3d": ("v", ("-2.8", "2.8"), 4),
    "fig4a": ("W", ("-3", "8"), 4),
    "fig4b": ("w", ("-2.8", "2.8"), 4),
}


def _grid(ctx: RoundingContext, lo: Decimal, hi: Decimal, n: int) -> list[Decimal]:
    step = ctx.round_nearest(ctx.div_up(ctx.sub_up(hi, lo), Decimal(n)))
    pts = [lo]
    for j in range(1, n):
        pts.append(ctx.round_nearest(ctx.add_up(lo, ctx.mul_up(step, Decimal(j)))))
    pts.append(hi)
    return pts


def _default_range(ctx: RoundingContext, target: str) -> tuple[Decimal, Decimal]:
    c, r = STANDARD_DISC.center, STANDARD_DISC.radius
    if target.isupper():
        return ctx.sub_dn(c, r), ctx.add_up(c, r)
    edge = ctx.sqrt_dn(ctx.add_dn(c, r))
    return edge.copy_negate(), edge


def emit_plot_covering(ctx: RoundingContext, figure: str, subdivisions: int,
                       balls: dict) -> list[tuple[str, str, str, str, str]]:
    """Rows (label, x_lo, x_hi, y_lo, y_hi) covering the named figure's graphs.

    ``balls`` maps "G"/"V"/"W" to certified balls; fig1 uses the boundary
    coverings of the domain-extension check instead of a graph.
    """
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; known: {sorted(FIGURES)}")
    target, x_range, depth = FIGURES[figure]
    G = balls.get("G")
    if G is None:
        raise MissingCertificate("plot coverings need the certified fixed-point ball")
    if figure == "fig1":
        res = op.check_domain_extension(ctx, G, subdivisions)
        rows = []
        for label, rects in (("boundary", res.boundary), ("gamma1", res.gamma1),
                             ("gamma2", res.gamma2)):
            for rect in rects:
                rows.append((label, str(rect.re.lo), str(rect.re.hi),
                             str(rect.im.lo), str(rect.im.hi)))
        return rows
    key = target.upper()
    ball = balls.get(key)
    if ball is None:
        raise MissingCertificate(f"figure {figure} needs the certified {key} ball")
    if x_range is None:
        lo, hi = _default_range(ctx, target)
    else:
        lo, hi = Decimal(x_range[0]), Decimal(x_range[1])
    pts = _grid(ctx, lo, hi, subdivisions)
    rows = []
    for j in range(subdivisions):
        x = Rectangle(Interval(pts[j], pts[j + 1]), interval(0))
        if depth == 0 and target.isupper():
            val = fb.evaluate(ctx, ball, x)
        else:
            val = op.extend_recursive(ctx, target, x, depth, G=G,
                                      V=balls.get("V"), W=balls.get("W"))
        rows.append((target, str(pts[j]), str(pts[j + 1]),
                     str(val.re.lo), str(val.re.hi)))
    return rows


def write_covering_csv(path, rows) -> None:
    lines = ["label,x_lo,x_hi,y_lo,y_hi"]
    lines += [",".join(row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")
