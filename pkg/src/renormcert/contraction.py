"""Newton-like contraction certificates for the renormalisation problems.

For a residual map F with approximate zero x0, a frozen linear map Lam
approximating the inverse Jacobian turns F into the Newton-like operator

    Phi(x) = x - Lam F(x).

Once Lam is certified invertible, Phi has the same zeros as F.  A
certificate over the ball B(x0, rho) consists of

    epsilon >= ||Phi(x0) - x0||     (movement of the approximate zero)
    kappa   >= ||DPhi(x)||          (for every x in the ball)

with the contraction inequality epsilon < rho (1 - kappa) checked in
directed rounding; on success the ball contains a unique zero of F and the
certified constants follow from the coordinate functional phi(x) = x(c),
the constant basis coefficient.

The operator-norm bound for DPhi uses the maximum column-sum norm: columns
0..N are bounded one basis vector at a time (embarrassingly parallel, each
worker owning its private rounding context, merged in index order), and all
higher basis directions at once through a single ball of high-order
functions whose compositions are controlled by powers of the contraction
factors theta of the inner arguments.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from decimal import Decimal

from . import balls as fb
from .balls import FunctionBall, ball_checksum
from .errors import (
    CertificationFailed,
    ConfigError,
    DimensionMismatch,
    InversionUncertified,
    SingularJacobian,
    TailContractFailure,
)
from .operators import OperatorTables, SharedEvaluations, precompute_shared
from .rounding import IONE, Interval, Rectangle, RoundingContext, as_decimal, interval

__all__ = [
    "LinearMap",
    "identity_map",
    "lambda_norm_upper",
    "apply_lambda",
    "verify_lambda_invertible",
    "Problem",
    "FixedPointProblem",
    "DeltaProblem",
    "GammaProblem",
    "Certificate",
    "bound_epsilon",
    "bound_kappa_columns",
    "bound_kappa_tail",
    "certify",
]

_D0 = Decimal(0)
_D1 = Decimal(1)
_D2 = Decimal(2)


class LinearMap:
    """Frozen linear operator: a matrix on coefficients 0..N plus a scalar
    acting on every degree above N (and on high-order error content).

    Entries are exactly representable numbers, not intervals; rigour comes
    from applying them in interval arithmetic.
    """

    __slots__ = ("matrix", "tail_scalar", "_col_sums")

    def __init__(self, matrix, tail_scalar):
        self.matrix = tuple(tuple(as_decimal(x) for x in row) for row in matrix)
        n = len(self.matrix)
        if any(len(row) != n for row in self.matrix):
            raise ConfigError("linear map matrix must be square")
        self.tail_scalar = as_decimal(tail_scalar)
        self._col_sums = {}

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def col_sums(self, ctx: RoundingContext) -> tuple[Decimal, ...]:
        cached = self._col_sums.get(ctx.precision)
        if cached is None:
            cached = tuple(
                _sum_up(ctx, (self.matrix[i][k].copy_abs() for i in range(self.dim)))
                for k in range(self.dim))
            self._col_sums[ctx.precision] = cached
        return cached

    def __eq__(self, other):
        return (isinstance(other, LinearMap) and self.matrix == other.matrix
                and self.tail_scalar == other.tail_scalar)

    def __reduce__(self):
        return (LinearMap, (self.matrix, self.tail_scalar))


def identity_map(n: int, diagonal=_D1, tail_scalar=Decimal(-1)) -> LinearMap:
    d = as_decimal(diagonal)
    matrix = tuple(tuple(d if i == j else _D0 for j in range(n + 1)) for i in range(n + 1))
    return LinearMap(matrix, tail_scalar)


def _sum_up(ctx: RoundingContext, items) -> Decimal:
    total = _D0
    for x in items:
        total = ctx.add_up(total, x)
    return total


def lambda_norm_upper(ctx: RoundingContext, lam: LinearMap) -> Decimal:
    """Upper bound of the l1 operator norm: max column sum vs |tail|."""
    return max(max(lam.col_sums(ctx)), lam.tail_scalar.copy_abs())


def apply_lambda(ctx: RoundingContext, lam: LinearMap, f: FunctionBall) -> FunctionBall:
    """Apply the frozen map to a ball: matrix on the polynomial coefficients,
    |tail| on the high-order bound, full operator norm on the error bound
    (error content may sit at any degree)."""
    n = f.truncation
    if lam.dim != n + 1:
        raise DimensionMismatch(f"map dimension {lam.dim} vs ball degree {n}")
    coeffs = []
    for i in range(n + 1):
        row = lam.matrix[i]
        acc = fb.rectangle(0)
        for k in range(n + 1):
            if row[k] and ctx.mag1(f.coeffs[k]) != 0:
                acc = ctx.radd(acc, ctx.rscale(f.coeffs[k], row[k]))
        coeffs.append(acc)
    v_high = ctx.mul_up(f.v_high, lam.tail_scalar.copy_abs())
    v_err = ctx.mul_up(f.v_err, lambda_norm_upper(ctx, lam))
    return FunctionBall(f.domain, tuple(coeffs), v_high, v_err)


def verify_lambda_invertible(ctx: RoundingContext, lam: LinearMap) -> Decimal:
    """Certify invertibility: residual bound ||I - B M|| < 1 for a midpoint
    approximate inverse B, plus a nonzero tail scalar.  Returns the bound."""
    from .approx import mat_inv

    if lam.tail_scalar == 0:
        raise InversionUncertified("tail scalar is zero")
    n = lam.dim
    try:
        approx_inv = mat_inv([list(row) for row in lam.matrix], ctx.precision)
    except SingularJacobian as exc:
        raise InversionUncertified(f"approximate inversion failed: {exc}") from exc
    bound = _D0
    for j in range(n):
        col_sum = _D0
        for i in range(n):
            acc = interval(1 if i == j else 0)
            row = approx_inv[i]
            for k in range(n):
                if row[k] and lam.matrix[k][j]:
                    acc = ctx.isub(acc, ctx.imul(interval(row[k]), interval(lam.matrix[k][j])))
            col_sum = ctx.add_up(col_sum, acc.mag)
        bound = max(bound, col_sum)
    if bound >= 1:
        raise InversionUncertified(f"residual column bound {bound} >= 1")
    return bound


# -- problems ---------------------------------------------------------------------

class Problem:
    """A residual map F with directional-derivative machinery.

    Subclasses provide the residual, the per-basis-column derivative images
    DF(x) e_k valid over a whole ball, and the ingredients of the
    high-order tail bound: DF(x) f_H = A f_H + q f_H with the compositions
    inside A controlled by theta factors.
    """

    kind: str = "abstract"
    parameter_ball: FunctionBall | None = None

    def residual(self, ctx: RoundingContext, x: FunctionBall) -> FunctionBall:
        raise NotImplementedError

    def column_kernel(self, ctx: RoundingContext, x_ball: FunctionBall):
        raise NotImplementedError

    def directional(self, ctx: RoundingContext, x_ball: FunctionBall,
                    dx: FunctionBall) -> FunctionBall:
        raise NotImplementedError

    def tail_phi_factor(self, ctx: RoundingContext, x_ball: FunctionBall) -> Interval:
        raise NotImplementedError

    def tail_channels(self, ctx: RoundingContext, x_ball: FunctionBall):
        raise NotImplementedError

    def enclosures(self, ctx: RoundingContext, x0: FunctionBall, rho: Decimal,
                   posterior: Decimal | None) -> dict:
        return {}


def _phi(ctx: RoundingContext, x: FunctionBall) -> Interval:
    """Coordinate functional: the constant basis coefficient (real part)."""
    rect = fb.coefficient(ctx, x, 0)
    return rect.re


def _widened(ctx: RoundingContext, center: Interval, radius: Decimal) -> Interval:
    return Interval(ctx.sub_dn(center.lo, radius), ctx.add_up(center.hi, radius))


def _dt_tail_channels(ctx: RoundingContext, shared: SharedEvaluations):
    return (
        (ctx.mag1(shared.a_inv), shared.theta_squared),
        (fb.norm_upper(ctx, shared.factor16), shared.theta_affine),
    )


@dataclass
class _RenormKernel:
    """Picklable per-column engine shared by the three renormalisation kinds."""

    kind: str
    tables: OperatorTables
    x_ball: FunctionBall
    phi_x: Interval | None = None   # eigen kinds: phi over the x-ball

    def image(self, ctx: RoundingContext, k: int) -> FunctionBall:
        n = self.x_ball.truncation
        e_k = fb.basis_ball(self.x_ball.domain, n, k)
        if self.kind == "fixed_point":
            return fb.sub(ctx, self.tables.dt_basis_image(ctx, k), e_k)
        if self.kind == "delta_eigen":
            out = self.tables.dt_basis_image(ctx, k)
            if k == 0:
                out = fb.sub(ctx, out, self.x_ball)
            return fb.sub(ctx, out, fb.scale(ctx, self.phi_x, e_k))
        if self.kind == "gamma_eigen":
            out = self.tables.l_basis_image(ctx, k)
            if k == 0:
                out = fb.sub(ctx, out, fb.scale(ctx, ctx.iscale(self.phi_x, _D2), self.x_ball))
            return fb.sub(ctx, out, fb.scale(ctx, ctx.isqr(self.phi_x), e_k))
        raise ConfigError(f"unknown kernel kind {self.kind!r}")


class FixedPointProblem(Problem):
    """F(G) = T(G) - G."""

    kind = "fixed_point"

    def __init__(self):
        self._cache = None   # (ball, shared, tables)

    def _tables(self, ctx: RoundingContext, ball: FunctionBall) -> OperatorTables:
        if self._cache is not None and self._cache[0] is ball:
            return self._cache[1]
        tables = OperatorTables.build(ctx, precompute_shared(ctx, ball))
        self._cache = (ball, tables)
        return tables

    def residual(self, ctx, x):
        shared = precompute_shared(ctx, x, with_derivatives=False)
        t_of_x = fb.scale(ctx, shared.a_inv, shared.outer_comp)
        return fb.sub(ctx, t_of_x, x)

    def column_kernel(self, ctx, x_ball):
        return _RenormKernel("fixed_point", self._tables(ctx, x_ball), x_ball)

    def directional(self, ctx, x_ball, dx):
        tables = self._tables(ctx, x_ball)
        return fb.sub(ctx, tables.dt_apply(ctx, dx), dx)

    def tail_phi_factor(self, ctx, x_ball):
        return interval(-1)

    def tail_channels(self, ctx, x_ball):
        return _dt_tail_channels(ctx, self._tables(ctx, x_ball).shared)

    def enclosures(self, ctx, x0, rho, posterior):
        radius = rho if posterior is None else min(rho, posterior)
        a_enc = _widened(ctx, _phi(ctx, x0), radius)
        return {"a": a_enc, "alpha": ctx.idiv(IONE, a_enc)}


class _EigenProblem(Problem):
    """Shared machinery for the two nonlinear eigenproblems, in which the
    eigenvalue is encoded as the coordinate functional of the eigenfunction
    and the underlying map ranges over a ball proven to contain the fixed
    point."""

    phi_power = 1

    def __init__(self, ctx: RoundingContext, parameter_ball: FunctionBall,
                 tables: OperatorTables | None = None):
        self.parameter_ball = parameter_ball
        self.tables = tables if tables is not None else OperatorTables.build(
            ctx, precompute_shared(ctx, parameter_ball))

    def _operator_apply(self, ctx, dx):
        raise NotImplementedError

    def _operator_column(self, ctx, k):
        raise NotImplementedError

    def residual(self, ctx, x):
        phi_x = _phi(ctx, x)
        mult = phi_x if self.phi_power == 1 else ctx.isqr(phi_x)
        return fb.sub(ctx, self._operator_apply(ctx, x), fb.scale(ctx, mult, x))

    def column_kernel(self, ctx, x_ball):
        return _RenormKernel(self.kind, self.tables, x_ball, phi_x=_phi(ctx, x_ball))

    def directional(self, ctx, x_ball, dx):
        phi_x = _phi(ctx, x_ball)
        phi_dx = _phi(ctx, dx)
        out = self._operator_apply(ctx, dx)
        if self.phi_power == 1:
            out = fb.sub(ctx, out, fb.scale(ctx, phi_dx, x_ball))
            return fb.sub(ctx, out, fb.scale(ctx, phi_x, dx))
        out = fb.sub(ctx, out, fb.scale(ctx, ctx.imul(ctx.iscale(phi_x, _D2), phi_dx), x_ball))
        return fb.sub(ctx, out, fb.scale(ctx, ctx.isqr(phi_x), dx))

    def tail_phi_factor(self, ctx, x_ball):
        phi_x = _phi(ctx, x_ball)
        mult = phi_x if self.phi_power == 1 else ctx.isqr(phi_x)
        return ctx.ineg(mult)

    def enclosures(self, ctx, x0, rho, posterior):
        name = "delta" if self.phi_power == 1 else "gamma"
        return {name: _widened(ctx, _phi(ctx, x0), rho)}


class DeltaProblem(_EigenProblem):
    """F(V) = DT(G) V - phi(V) V with G over the parameter ball."""

    kind = "delta_eigen"
    phi_power = 1

    def _operator_apply(self, ctx, dx):
        return self.tables.dt_apply(ctx, dx)

    def tail_channels(self, ctx, x_ball):
        return _dt_tail_channels(ctx, self.tables.shared)


class GammaProblem(_EigenProblem):
    """F(W) = L(G) W - phi(W)**2 W with G over the parameter ball."""

    kind = "gamma_eigen"
    phi_power = 2

    def _operator_apply(self, ctx, dx):
        return self.tables.l_apply(ctx, dx)

    def tail_channels(self, ctx, x_ball):
        s = self.tables.shared
        return (
            (ctx.mag1(s.a_inv2), s.theta_squared),
            (fb.norm_upper(ctx, s.factor16_sq), s.theta_affine),
        )


# -- bounds -----------------------------------------------------------------------

def bound_epsilon(ctx: RoundingContext, problem: Problem, x0: FunctionBall,
                  lam: LinearMap) -> Decimal:
    """Upper bound of ||Lam F(x0)|| = ||Phi(x0) - x0||."""
    if x0.v_err != 0 or x0.v_high != 0:
        raise ConfigError("epsilon bound needs an exact center (no tail mass)")
    return fb.norm_upper(ctx, apply_lambda(ctx, lam, problem.residual(ctx, x0)))


def _column_bound(ctx: RoundingContext, kernel, lam: LinearMap, k: int) -> Decimal:
    image = kernel.image(ctx, k)
    moved = apply_lambda(ctx, lam, image)
    n = kernel.x_ball.truncation
    dphi = fb.sub(ctx, fb.basis_ball(kernel.x_ball.domain, n, k), moved)
    return fb.norm_upper(ctx, dphi)


_POOL_STATE: tuple | None = None


def _pool_init(kernel, lam, precision):
    global _POOL_STATE
    _POOL_STATE = (kernel, lam, RoundingContext(precision))


def _pool_column(k: int) -> Decimal:
    kernel, lam, ctx = _POOL_STATE
    return _column_bound(ctx, kernel, lam, k)


def bound_kappa_columns(ctx: RoundingContext, problem: Problem, x_ball: FunctionBall,
                        lam: LinearMap, workers: int = 1) -> list[Decimal]:
    """Bounds of ||DPhi(x) e_k|| for k = 0..N, valid over the whole ball.

    Columns are independent; with workers > 1 they are distributed over a
    process pool, each process holding a private rounding context, and the
    results are merged in index order so the output does not depend on the
    worker count.
    """
    kernel = problem.column_kernel(ctx, x_ball)
    n = x_ball.truncation
    if workers <= 1:
        return [_column_bound(ctx, kernel, lam, k) for k in range(n + 1)]
    from concurrent.futures import ProcessPoolExecutor

    chunk = max(1, (n + 1) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                             initargs=(kernel, lam, ctx.precision)) as pool:
        return list(pool.map(_pool_column, range(n + 1), chunksize=chunk))


def bound_kappa_tail(ctx: RoundingContext, problem: Problem, x_ball: FunctionBall,
                     lam: LinearMap) -> Decimal:
    """Bound of ||DPhi(x) f_H|| over all high-order f_H with ||f_H|| <= 1.

    With the domain centered at 1, f_H(1) = 0 and phi(f_H) = 0, so the
    derivative acts as DF f_H = A f_H + q f_H where the compositions inside
    A are bounded by theta**(N+1) without expanding f_H.  The frozen map
    sends pure high-order content to tail_scalar times itself, leaving

        ||DPhi f_H|| <= |1 - q t| + ||Lam|| ||A f_H||.
    """
    if x_ball.domain.center != 1:
        raise ConfigError("tail bound assumes domain center 1")
    n = x_ball.truncation
    q = problem.tail_phi_factor(ctx, x_ball)
    head = ctx.isub(IONE, ctx.iscale(q, lam.tail_scalar)).mag
    total = _D0
    for coeff_norm, theta in problem.tail_channels(ctx, x_ball):
        if theta >= 1:
            raise TailContractFailure(f"tail channel has theta = {theta} >= 1")
        total = ctx.add_up(total, ctx.mul_up(coeff_norm, ctx.pow_up(theta, n + 1)))
    return ctx.add_up(head, ctx.mul_up(lambda_norm_upper(ctx, lam), total))


# -- certificates ------------------------------------------------------------------

@dataclass
class Certificate:
    kind: str
    rho: Decimal
    epsilon: Decimal
    kappa: Decimal
    kappa_columns_max: Decimal
    kappa_tail: Decimal
    passed: bool
    posterior_radius: Decimal | None
    enclosures: dict
    posterior_enclosures: dict
    lambda_residual: Decimal
    config: dict = field(default_factory=dict)
    workers: int = 1
    wall_time: float = 0.0

    def certified_interval(self, name: str) -> Interval:
        return self.enclosures[name]

    def to_payload(self) -> dict:
        """Deterministic certificate content (no timing, no worker count)."""
        def enc(d):
            return {k: [str(v.lo), str(v.hi)] for k, v in d.items()}
        return {
            "kind": self.kind,
            "rho": str(self.rho),
            "epsilon": str(self.epsilon),
            "kappa": str(self.kappa),
            "kappa_columns_max": str(self.kappa_columns_max),
            "kappa_tail": str(self.kappa_tail),
            "passed": self.passed,
            "posterior_radius": None if self.posterior_radius is None else str(self.posterior_radius),
            "lambda_residual": str(self.lambda_residual),
            "enclosures": enc(self.enclosures),
            "posterior_enclosures": enc(self.posterior_enclosures),
            "config": self.config,
        }

    def to_json_dict(self) -> dict:
        return {
            "certificate": self.to_payload(),
            "execution": {"workers": self.workers, "wall_time_s": self.wall_time},
        }

    @staticmethod
    def enclosure_from_payload(payload: dict, name: str) -> Interval:
        lo, hi = payload["enclosures"][name]
        return Interval(Decimal(lo), Decimal(hi))


def certify(ctx: RoundingContext, problem: Problem, x0: FunctionBall, lam: LinearMap,
            rho, workers: int = 1, config: dict | None = None) -> Certificate:
    """Run the full contraction certificate for one problem.

    Requires the frozen map to be certified invertible first (done here),
    so the Newton-like operator has the same zeros as the residual map.
    The caller is responsible for the domain-extension verification on the
    ball, which is what makes the operator well-defined and differentiable
    there; the pipeline runs it before any certificate.  On success returns
    the certificate with the certified enclosures; on a failed contraction
    inequality raises CertificationFailed carrying the diagnostic
    certificate.  No retuning or retry happens here: rho and the precision
    are caller-chosen and failures are reported as data.
    """
    rho = as_decimal(rho)
    if rho <= 0:
        raise ConfigError("rho must be positive")
    started = time.perf_counter()
    lam_residual = verify_lambda_invertible(ctx, lam)
    ball = fb.inflate(ctx, x0, rho)
    epsilon = bound_epsilon(ctx, problem, x0, lam)
    columns = bound_kappa_columns(ctx, problem, ball, lam, workers)
    col_max = max(columns)
    tail = bound_kappa_tail(ctx, problem, ball, lam)
    kappa = max(col_max, tail)
    one_minus = ctx.sub_dn(_D1, kappa)
    passed = bool(kappa < 1 and epsilon < ctx.mul_dn(rho, one_minus))
    posterior = ctx.div_up(epsilon, one_minus) if (passed and one_minus > 0) else None
    cert = Certificate(
        kind=problem.kind,
        rho=rho,
        epsilon=epsilon,
        kappa=kappa,
        kappa_columns_max=col_max,
        kappa_tail=tail,
        passed=passed,
        posterior_radius=posterior,
        enclosures=problem.enclosures(ctx, x0, rho, posterior) if passed else {},
        posterior_enclosures=(problem.enclosures(ctx, x0, posterior, posterior)
                              if passed and posterior is not None else {}),
        lambda_residual=lam_residual,
        config=dict(config or {}),
        workers=workers,
        wall_time=time.perf_counter() - started,
    )
    if not passed:
        raise CertificationFailed(
            f"{problem.kind}: epsilon={epsilon} not below rho(1-kappa) "
            f"with rho={rho}, kappa={kappa}", certificate=cert)
    return cert
