"""Shared test utilities: reference digits, random sampling, member oracles."""

from __future__ import annotations

import decimal
import random
from decimal import Decimal

from renormcert import balls as fb
from renormcert.rounding import Interval, Rectangle, RoundingContext, interval, rectangle

# Published high-precision reference values for the universal constants
# (first 60 fractional/significant digits; used as prefix oracles).
REF_A = "-0.399535280523134489857580468633693719433544280466952727517073"
REF_ALPHA = "-2.50290787509589282228390287321821578638127137672714997733619"
REF_DELTA = "4.66920160910299067185320382046620161725818557747576863274565"
REF_GAMMA = "6.61903651081792804532380890514746660143644298809101198088905"


def digit_match_count(text: str, reference: str) -> int:
    """Number of leading significant digits of ``text`` matching ``reference``."""
    def canon(s):
        s = s.lstrip("+-").replace(".", "").lstrip("0")
        return s
    if (text.strip().startswith("-")) != (reference.strip().startswith("-")):
        return 0
    a, b = canon(text), canon(reference)
    n = 0
    for ca, cb in zip(a, b):
        if ca != cb:
            break
        n += 1
    return n


def rand_decimal(rng: random.Random, scale: float = 4.0) -> Decimal:
    """Random decimal with a few digits, roughly in [-scale, scale]."""
    return Decimal(rng.randint(-int(scale * 1000), int(scale * 1000))) / Decimal(1000)


def rand_interval(rng: random.Random, scale: float = 4.0) -> Interval:
    a, b = rand_decimal(rng, scale), rand_decimal(rng, scale)
    if a > b:
        a, b = b, a
    return Interval(a, b)


def rand_subinterval(rng: random.Random, x: Interval) -> Interval:
    w = x.hi - x.lo
    if w == 0:
        return x
    f1, f2 = sorted((rng.random(), rng.random()))
    lo = x.lo + w * Decimal(str(round(f1, 6)))
    hi = x.lo + w * Decimal(str(round(f2, 6)))
    if lo > hi:
        lo, hi = hi, lo
    return Interval(min(max(lo, x.lo), x.hi), min(max(hi, x.lo), x.hi))


def sample_point(rng: random.Random, x: Interval) -> Decimal:
    w = x.hi - x.lo
    return x.lo + w * Decimal(str(round(rng.random(), 8)))


def contains_with_slack(outer: Interval, value: Decimal, slack: str = "0") -> bool:
    s = Decimal(slack)
    return outer.lo - s <= value <= outer.hi + s


# -- function-ball member sampling ------------------------------------------------


def rand_poly_ball(rng: random.Random, domain, n: int, degree: int,
                   coeff_scale: float = 1.0) -> fb.FunctionBall:
    """Random exact polynomial ball of the given degree (<= n)."""
    coeffs = [rand_decimal(rng, coeff_scale) for _ in range(degree + 1)]
    return fb.ball_from_decimals(domain, coeffs, n)


def sample_member(rng: random.Random, ball: fb.FunctionBall,
                  tail_degrees: int = 4) -> dict[int, Decimal]:
    """A concrete member function: polynomial coefficients inside the
    rectangles plus random tail mass below the v_high / v_err budgets.
    Returned as a degree -> coefficient map (real functions only)."""
    member: dict[int, Decimal] = {}
    for k, ck in enumerate(ball.coeffs):
        member[k] = sample_point(rng, ck.re)
    n = ball.truncation
    if ball.v_high > 0:
        budget = ball.v_high * Decimal(str(round(rng.random(), 6)))
        degrees = rng.sample(range(n + 1, n + 1 + tail_degrees + 3), tail_degrees)
        for d in degrees:
            part = budget * Decimal(str(round(rng.random(), 6))) / tail_degrees
            member[d] = member.get(d, Decimal(0)) + (part if rng.random() < 0.5 else -part)
    if ball.v_err > 0:
        budget = ball.v_err * Decimal(str(round(rng.random(), 6)))
        degrees = rng.sample(range(0, n + 1 + tail_degrees), tail_degrees)
        for d in degrees:
            part = budget * Decimal(str(round(rng.random(), 6))) / tail_degrees
            member[d] = member.get(d, Decimal(0)) + (part if rng.random() < 0.5 else -part)
    return member


def eval_member(member: dict[int, Decimal], z: Decimal, domain, digits: int) -> Decimal:
    """Evaluate a member at a real point in round-to-nearest arithmetic."""
    with decimal.localcontext(decimal.Context(prec=digits)):
        u = (z - domain.center) / domain.radius
        top = max(member)
        acc = Decimal(0)
        for k in range(top, -1, -1):
            acc = acc * u + member.get(k, Decimal(0))
        return acc


def eval_member_derivative(member: dict[int, Decimal], z: Decimal, domain,
                           digits: int) -> Decimal:
    with decimal.localcontext(decimal.Context(prec=digits)):
        deriv = {k - 1: Decimal(k) * c / domain.radius for k, c in member.items() if k > 0}
        if not deriv:
            return Decimal(0)
        u = (z - domain.center) / domain.radius
        top = max(deriv)
        acc = Decimal(0)
        for k in range(top, -1, -1):
            acc = acc * u + deriv.get(k, Decimal(0))
        return acc


def member_product(a: dict[int, Decimal], b: dict[int, Decimal],
                   digits: int) -> dict[int, Decimal]:
    with decimal.localcontext(decimal.Context(prec=digits)):
        out: dict[int, Decimal] = {}
        for i, ai in a.items():
            for j, bj in b.items():
                out[i + j] = out.get(i + j, Decimal(0)) + ai * bj
        return out


def domain_points(rng: random.Random, domain, count: int) -> list[Decimal]:
    """Random real points of the closed domain interval."""
    lo = domain.center - domain.radius
    hi = domain.center + domain.radius
    return [sample_point(rng, Interval(lo, hi)) for _ in range(count)]
