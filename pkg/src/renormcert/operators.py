"""Rigorous renormalisation operators on function balls.

Implements the doubling operator for even maps written through X = x**2,

    T(G)(X) = a**-1 G(Q(G(Q(a) X))),   a = G(1),  Q(w) = w**2,

its Frechet derivative (four terms, including the variations of the
normalisation a), the noise-scaling operator

    L(G) W(X) = a**-2 (G'(Q(G(a**2 X))) 2 G(a**2 X))**2 W(a**2 X)
              + a**-2 W(Q(G(a**2 X))),

the boundary-covering verification that the inner compositions map the
closed domain disc strictly inside itself (which makes the operator
well-defined, differentiable, and its derivative compact on the ball), and
recursive evaluation of the certified functions outside the disc for
plotting.

Shared subexpressions (a, G(a**2 X), its square, the composed derivative
factors) are computed once per input ball and reused by every operator
application, including the per-basis-column images used for the
contraction bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from . import balls as fb
from .balls import Disc, FunctionBall, PowerTable
from .errors import (
    CompositionContractFailure,
    ConfigError,
    ContainmentFailure,
    DepthExceeded,
    DivisionByZeroRectangle,
    NormalizationSingular,
)
from .rounding import Interval, Rectangle, RoundingContext, interval, rectangle

__all__ = [
    "SharedEvaluations",
    "precompute_shared",
    "apply_T",
    "apply_DT",
    "apply_L",
    "OperatorTables",
    "boundary_cover",
    "check_domain_extension",
    "DomainExtensionResult",
    "extend_recursive",
]

_D0 = Decimal(0)
_D1 = Decimal(1)
_D2 = Decimal(2)
_ONE_POINT = rectangle(1)


@dataclass(frozen=True)
class SharedEvaluations:
    """Subexpression enclosures valid for every G in the input ball."""

    source: FunctionBall
    a: Rectangle
    a2: Rectangle
    a_inv: Rectangle
    a_inv2: Rectangle
    affine: FunctionBall          # X -> a**2 X
    inner: FunctionBall           # G(a**2 X)
    squared: FunctionBall         # Q(G(a**2 X))
    outer_comp: FunctionBall      # G(Q(G(a**2 X)))
    theta_affine: Decimal
    theta_squared: Decimal
    deriv_outer: FunctionBall | None = None   # G'(Q(G(a**2 X)))
    deriv_inner: FunctionBall | None = None   # G'(a**2 X)
    factor16: FunctionBall | None = None      # a**-1 G'(Q(G(a**2 X))) 2 G(a**2 X)
    factor16_sq: FunctionBall | None = None
    factor17: FunctionBall | None = None      # factor16 * G'(a**2 X) * 2 a X

    @property
    def domain(self) -> Disc:
        return self.source.domain


def _named(subexpression: str):
    def wrap(exc: CompositionContractFailure) -> CompositionContractFailure:
        return CompositionContractFailure(
            f"{subexpression}: {exc}", subexpression=subexpression)
    return wrap


def precompute_shared(ctx: RoundingContext, G: FunctionBall,
                      with_derivatives: bool = True) -> SharedEvaluations:
    """Evaluate every shared subexpression once for the whole ball."""
    n = G.truncation
    domain = G.domain
    a = fb.evaluate(ctx, G, _ONE_POINT)
    try:
        a_inv = ctx.rdiv(rectangle(1), a)
    except DivisionByZeroRectangle as exc:
        raise NormalizationSingular(f"a = G(1) = {a} may contain zero") from exc
    a2 = ctx.rsqr(a)
    a_inv2 = ctx.rsqr(a_inv)
    affine = fb.affine_arg(ctx, domain, n, a2)
    try:
        inner = fb.compose(ctx, G, affine)
    except CompositionContractFailure as exc:
        raise _named("G(a2 X)")(exc) from exc
    squared = fb.mul(ctx, inner, inner)
    try:
        outer_comp = fb.compose(ctx, G, squared)
    except CompositionContractFailure as exc:
        raise _named("G(Q(G(a2 X)))")(exc) from exc
    kwargs = {}
    if with_derivatives:
        try:
            deriv_outer = fb.compose_derivative(ctx, G, squared)
        except CompositionContractFailure as exc:
            raise _named("G'(Q(G(a2 X)))")(exc) from exc
        try:
            deriv_inner = fb.compose_derivative(ctx, G, affine)
        except CompositionContractFailure as exc:
            raise _named("G'(a2 X)")(exc) from exc
        factor16 = fb.scale(ctx, a_inv,
                            fb.mul(ctx, deriv_outer, fb.scale(ctx, _D2, inner)))
        two_a_x = fb.affine_arg(ctx, domain, n, ctx.rscale(a, _D2))
        kwargs = dict(
            deriv_outer=deriv_outer,
            deriv_inner=deriv_inner,
            factor16=factor16,
            factor16_sq=fb.mul(ctx, factor16, factor16),
            factor17=fb.mul(ctx, fb.mul(ctx, factor16, deriv_inner), two_a_x),
        )
    return SharedEvaluations(
        source=G, a=a, a2=a2, a_inv=a_inv, a_inv2=a_inv2,
        affine=affine, inner=inner, squared=squared, outer_comp=outer_comp,
        theta_affine=fb.theta(ctx, affine), theta_squared=fb.theta(ctx, squared),
        **kwargs)


def apply_T(ctx: RoundingContext, G: FunctionBall | None = None,
            shared: SharedEvaluations | None = None) -> FunctionBall:
    """Enclosure of T(G) for every member of the ball."""
    if shared is None:
        if G is None:
            raise ConfigError("apply_T needs a ball or shared evaluations")
        shared = precompute_shared(ctx, G, with_derivatives=False)
    return fb.scale(ctx, shared.a_inv, shared.outer_comp)


def _delta_a_terms(ctx: RoundingContext, shared: SharedEvaluations,
                   da: Rectangle) -> FunctionBall:
    s = ctx.rneg(ctx.rmul(shared.a_inv2, da))
    out = fb.scale(ctx, s, shared.outer_comp)
    return fb.add(ctx, out, fb.scale(ctx, da, shared.factor17))


def apply_DT(ctx: RoundingContext, shared: SharedEvaluations, dG: FunctionBall,
             simplified: bool = False) -> FunctionBall:
    """Directional derivative of T, enclosing the action for every G in the ball.

    ``simplified`` drops the two terms carrying the variation of a = G(1);
    that variant is for non-rigorous spectrum estimates only and is never
    used while certifying.
    """
    if shared.factor16 is None:
        raise ConfigError("shared evaluations lack derivative factors")
    t15 = fb.scale(ctx, shared.a_inv, fb.compose(ctx, dG, shared.squared))
    t16 = fb.mul(ctx, shared.factor16, fb.compose(ctx, dG, shared.affine))
    out = fb.add(ctx, t15, t16)
    if simplified:
        return out
    da = fb.evaluate(ctx, dG, _ONE_POINT)
    if ctx.mag1(da) != 0:
        out = fb.add(ctx, out, _delta_a_terms(ctx, shared, da))
    return out


def apply_L(ctx: RoundingContext, shared: SharedEvaluations,
            W: FunctionBall) -> FunctionBall:
    """Enclosure of the noise-scaling operator applied to W, for every G."""
    if shared.factor16_sq is None:
        raise ConfigError("shared evaluations lack derivative factors")
    t1 = fb.mul(ctx, shared.factor16_sq, fb.compose(ctx, W, shared.affine))
    t2 = fb.scale(ctx, shared.a_inv2, fb.compose(ctx, W, shared.squared))
    return fb.add(ctx, t1, t2)


@dataclass(frozen=True)
class OperatorTables:
    """Power tables of the two composition arguments for fast column images.

    e_k composed with an argument is the k-th tabulated power, so each
    basis-column image of the derivative (or of the noise operator) costs
    one ball product instead of a full Horner pass.  Requires the domain
    center at 1, where e_k(1) = 0 for k >= 1 and the normalisation
    variation acts on column 0 only.
    """

    shared: SharedEvaluations
    table_affine: PowerTable
    table_squared: PowerTable

    @classmethod
    def build(cls, ctx: RoundingContext, shared: SharedEvaluations) -> "OperatorTables":
        if shared.domain.center != 1:
            raise ConfigError("column tables assume domain center 1")
        return cls(shared=shared,
                   table_affine=fb.power_table(ctx, shared.affine),
                   table_squared=fb.power_table(ctx, shared.squared))

    def dt_basis_image(self, ctx: RoundingContext, k: int) -> FunctionBall:
        s = self.shared
        out = fb.scale(ctx, s.a_inv, self.table_squared.powers[k])
        out = fb.add(ctx, out, fb.mul(ctx, s.factor16, self.table_affine.powers[k]))
        if k == 0:
            out = fb.add(ctx, out, _delta_a_terms(ctx, s, _ONE_POINT))
        return out

    def l_basis_image(self, ctx: RoundingContext, k: int) -> FunctionBall:
        s = self.shared
        out = fb.mul(ctx, s.factor16_sq, self.table_affine.powers[k])
        return fb.add(ctx, out, fb.scale(ctx, s.a_inv2, self.table_squared.powers[k]))

    def dt_apply(self, ctx: RoundingContext, dG: FunctionBall) -> FunctionBall:
        s = self.shared
        t15 = fb.scale(ctx, s.a_inv, self.table_squared.compose(ctx, dG))
        t16 = fb.mul(ctx, s.factor16, self.table_affine.compose(ctx, dG))
        out = fb.add(ctx, t15, t16)
        da = fb.evaluate(ctx, dG, _ONE_POINT)
        if ctx.mag1(da) != 0:
            out = fb.add(ctx, out, _delta_a_terms(ctx, s, da))
        return out

    def l_apply(self, ctx: RoundingContext, W: FunctionBall) -> FunctionBall:
        s = self.shared
        t1 = fb.mul(ctx, s.factor16_sq, self.table_affine.compose(ctx, W))
        t2 = fb.scale(ctx, s.a_inv2, self.table_squared.compose(ctx, W))
        return fb.add(ctx, t1, t2)


# -- domain extension -----------------------------------------------------------

#: parametrisation switch between shallow and steep quarter-arcs; any value
#: in [sqrt(1/2), 1) keeps every slice's aspect ratio below ~1.14
_ARC_SPLIT = Decimal("0.75")


def _circle_slices(ctx: RoundingContext, q: int):
    """q+1 grid points from -_ARC_SPLIT to _ARC_SPLIT (exact endpoints).

    Only self-consistency matters: adjacent slices share the same computed
    point, so the union covers the full range whatever the rounding."""
    t = _ARC_SPLIT
    neg_t = t.copy_negate()
    step = ctx.round_nearest(ctx.div_up(ctx.mul_up(_D2, t), Decimal(q)))
    pts = [neg_t]
    for j in range(1, q):
        pts.append(ctx.round_nearest(
            ctx.add_up(neg_t, ctx.mul_up(step, Decimal(j)))))
    pts.append(t)
    return pts


def boundary_cover(ctx: RoundingContext, domain: Disc, m: int) -> list[Rectangle]:
    """Cover of the boundary circle by m axis-aligned rectangles.

    Quarter-arcs are parametrised by the shallow coordinate: the top and
    bottom arcs by x, the left and right arcs by y, with the companion
    coordinate bounded through rigorous square roots.  No trigonometric
    primitive is needed and the union provably contains the circle.
    """
    if m < 4 or m % 4 != 0:
        raise ConfigError("boundary covering needs m >= 4 divisible by 4")
    q = m // 4
    c, r = domain.center, domain.radius
    pts = _circle_slices(ctx, q)
    rects = []

    def companion_bounds(lo: Decimal, hi: Decimal) -> tuple[Decimal, Decimal]:
        seg = Interval(lo, hi)
        big = ctx.mul_up(seg.mag, seg.mag)
        small = ctx.mul_dn(seg.mig, seg.mig)
        low2 = ctx.sub_dn(_D1, big)
        if low2 < 0:
            low2 = _D0
        return ctx.sqrt_dn(low2), ctx.sqrt_up(ctx.sub_up(_D1, small))

    for j in range(q):
        xlo, xhi = pts[j], pts[j + 1]
        ylo, yhi = companion_bounds(xlo, xhi)
        re = Interval(ctx.add_dn(c, ctx.mul_dn(r, xlo)), ctx.add_up(c, ctx.mul_up(r, xhi)))
        im_top = Interval(ctx.mul_dn(r, ylo), ctx.mul_up(r, yhi))
        rects.append(Rectangle(re, im_top))
        rects.append(Rectangle(re, Interval(im_top.hi.copy_negate(),
                                            im_top.lo.copy_negate())))
    for j in range(q):
        ylo, yhi = pts[j], pts[j + 1]
        xlo, xhi = companion_bounds(ylo, yhi)
        im = Interval(ctx.mul_dn(r, ylo), ctx.mul_up(r, yhi))
        re_right = Interval(ctx.add_dn(c, ctx.mul_dn(r, xlo)), ctx.add_up(c, ctx.mul_up(r, xhi)))
        rects.append(Rectangle(re_right, im))
        re_left = Interval(ctx.sub_dn(c, ctx.mul_up(r, xhi)), ctx.sub_up(c, ctx.mul_dn(r, xlo)))
        rects.append(Rectangle(re_left, im))
    return rects


@dataclass(frozen=True)
class DomainExtensionResult:
    passed: bool
    boundary: tuple[Rectangle, ...]
    gamma1: tuple[Rectangle, ...]
    gamma2: tuple[Rectangle, ...]


def check_domain_extension(ctx: RoundingContext, G: FunctionBall,
                           m: int) -> DomainExtensionResult:
    """Verify that both inner composition images stay strictly inside the disc.

    For every rectangle z of the boundary cover and every G in the ball,
    checks |a**2 z - c| < r and |Q(G(a**2 z)) - c| < r with strict
    representable comparisons; a maximum-modulus argument then extends the
    boundary containment to the whole closed disc.  Returns the coverings
    for plotting, or raises ContainmentFailure naming the first offending
    rectangle and which of the two checks failed.
    """
    # only a**2 is needed here, so a wide ball can still reach the checks
    a2 = ctx.rsqr(fb.evaluate(ctx, G, _ONE_POINT))
    domain = G.domain
    c_rect = rectangle(domain.center)
    r = domain.radius
    boundary = boundary_cover(ctx, domain, m)
    gamma1, gamma2 = [], []
    for idx, z in enumerate(boundary):
        w1 = ctx.rmul(a2, z)
        if ctx.rabs(ctx.rsub(w1, c_rect)).hi >= r:
            raise ContainmentFailure(
                f"boundary rectangle {idx}: a**2 z not strictly inside the disc",
                index=idx, equation=1, rectangle=w1)
        gamma1.append(w1)
        w2 = ctx.rsqr(fb.evaluate(ctx, G, w1))
        if ctx.rabs(ctx.rsub(w2, c_rect)).hi >= r:
            raise ContainmentFailure(
                f"boundary rectangle {idx}: Q(G(a**2 z)) not strictly inside the disc",
                index=idx, equation=2, rectangle=w2)
        gamma2.append(w2)
    return DomainExtensionResult(True, tuple(boundary), tuple(gamma1), tuple(gamma2))


# -- recursive extension beyond the disc ------------------------------------------

def _as_rectangle(x) -> Rectangle:
    if isinstance(x, Rectangle):
        return x
    if isinstance(x, Interval):
        return Rectangle(x, interval(0))
    return rectangle(x)


def extend_recursive(ctx: RoundingContext, target: str, x, depth: int, *,
                     G: FunctionBall, V: FunctionBall | None = None,
                     W: FunctionBall | None = None) -> Rectangle:
    """Evaluate a certified function at x, outside the disc if necessary.

    Inside the closed disc this is direct ball evaluation.  Outside, the
    fixed-point relation G(X) = a**-1 G(Q(G(a**2 X))) and the eigenproblem
    relations (the derivative applied to V equals phi(V) V, the noise
    operator applied to W equals phi(W)**2 W) are unwound recursively, up
    to ``depth`` levels, pulling arguments back toward the disc.  Lowercase
    targets are the even originals: g(x) = G(x**2), and likewise for v, w.

    This is a plotting aid; enclosures can be wide and derivative values
    are only available where the composed arguments land inside the disc.
    """
    z = _as_rectangle(x)
    if target in ("g", "v", "w"):
        return extend_recursive(ctx, target.upper(), ctx.rsqr(z), depth, G=G, V=V, W=W)
    if target not in ("G", "V", "W"):
        raise ConfigError(f"unknown extension target {target!r}")
    ball = {"G": G, "V": V, "W": W}[target]
    if ball is None:
        raise ConfigError(f"target {target} needs its ball")

    domain = G.domain
    c_rect = rectangle(domain.center)
    a = fb.evaluate(ctx, G, _ONE_POINT)
    a_inv = ctx.rdiv(rectangle(1), a)
    a_inv2 = ctx.rsqr(a_inv)
    a2 = ctx.rsqr(a)
    two = rectangle(2)

    def inside(zz: Rectangle) -> bool:
        return ctx.rabs(ctx.rsub(zz, c_rect)).hi <= domain.radius

    def go(kind: str, zz: Rectangle, d: int) -> Rectangle:
        tball = {"G": G, "V": V, "W": W}[kind]
        if inside(zz):
            return fb.evaluate(ctx, tball, zz)
        if d <= 0:
            raise DepthExceeded(f"{kind} at {zz}: recursion depth exhausted")
        arg1 = ctx.rmul(a2, zz)
        y = go("G", arg1, d - 1)
        u2 = ctx.rsqr(y)
        if kind == "G":
            return ctx.rmul(a_inv, go("G", u2, d - 1))
        # derivative values are needed at the pulled-back arguments
        gp_u2 = fb.evaluate_derivative(ctx, G, u2) if inside(u2) else None
        if gp_u2 is None:
            raise DepthExceeded(f"{kind} at {zz}: composed argument left the disc")
        chain = ctx.rmul(ctx.rmul(a_inv, gp_u2), ctx.rmul(two, y))
        if kind == "V":
            lam = fb.evaluate(ctx, V, _ONE_POINT)
            lam_inv = ctx.rdiv(rectangle(1), lam)
            t14 = ctx.rneg(ctx.rmul(ctx.rmul(a_inv2, lam), go("G", u2, d - 1)))
            t15 = ctx.rmul(a_inv, go("V", u2, d - 1))
            t16 = ctx.rmul(chain, go("V", arg1, d - 1))
            gp_a1 = fb.evaluate_derivative(ctx, G, arg1)
            t17 = ctx.rmul(ctx.rmul(chain, gp_a1),
                           ctx.rmul(ctx.rmul(two, zz), ctx.rmul(a, lam)))
            total = ctx.radd(ctx.radd(t14, t15), ctx.radd(t16, t17))
            return ctx.rmul(lam_inv, total)
        gam = fb.evaluate(ctx, W, _ONE_POINT)
        gam2_inv = ctx.rdiv(rectangle(1), ctx.rsqr(gam))
        t1 = ctx.rmul(ctx.rsqr(chain), go("W", arg1, d - 1))
        t2 = ctx.rmul(a_inv2, go("W", u2, d - 1))
        return ctx.rmul(gam2_inv, ctx.radd(t1, t2))

    return go(target, z, depth)
