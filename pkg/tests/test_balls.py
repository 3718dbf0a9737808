import random
from decimal import Decimal

import pytest

from helpers import (
    REF_A,
    domain_points,
    eval_member,
    eval_member_derivative,
    member_product,
    rand_poly_ball,
    sample_member,
)
from renormcert import balls as fb
from renormcert.errors import (
    CompositionContractFailure,
    DomainMismatch,
    IndexBeyondTruncation,
    PointOutsideDomain,
)
from renormcert.rounding import RoundingContext, interval, rectangle

ctx = RoundingContext(30)
DOM = fb.STANDARD_DISC
N = 8


def test_norm_examples():
    f = fb.ball_from_decimals(DOM, ["1", "-2"], N)
    f = fb.FunctionBall(f.domain, f.coeffs, Decimal("0.5"), Decimal(0))
    assert fb.norm_upper(ctx, f) == Decimal("3.5")
    assert fb.norm_upper(ctx, fb.zero_ball(DOM, N)) == 0
    for k in range(N + 1):
        assert fb.norm_upper(ctx, fb.basis_ball(DOM, N, k)) == 1


def test_linear_ops():
    f = rand_poly_ball(random.Random(0), DOM, N, 5)
    z = fb.add(ctx, f, fb.zero_ball(DOM, N))
    assert all(z.coeffs[k].re == f.coeffs[k].re for k in range(N + 1))
    e2 = fb.basis_ball(DOM, N, 2)
    d = fb.sub(ctx, e2, e2)
    assert fb.norm_upper(ctx, d) == 0
    # f + (-1)*f contains zero with doubled tail budgets
    g = fb.inflate(ctx, f, "0.25")
    s = fb.add(ctx, g, fb.scale(ctx, Decimal(-1), g))
    assert all(s.coeffs[k].re.contains(0) for k in range(N + 1))
    assert s.v_err == Decimal("0.5")


def test_domain_mismatch():
    f = fb.one_ball(DOM, N)
    g = fb.one_ball(DOM, N + 1)
    with pytest.raises(DomainMismatch):
        fb.add(ctx, f, g)
    h = fb.one_ball(fb.Disc(Decimal(0), Decimal(1)), N)
    with pytest.raises(DomainMismatch):
        fb.mul(ctx, f, h)


def test_mul_basis():
    e1 = fb.basis_ball(DOM, N, 1)
    p = fb.mul(ctx, e1, e1)
    assert p.coeffs[2].re == interval(1)
    assert p.v_high == 0 and p.v_err == 0
    one = fb.one_ball(DOM, N)
    f = rand_poly_ball(random.Random(1), DOM, N, 6)
    q = fb.mul(ctx, f, one)
    assert all(q.coeffs[k].re.contains_interval(f.coeffs[k].re) for k in range(N + 1))


def test_mul_spill_goes_high():
    # degree-5 times degree-5 at N=8: degrees 9, 10 spill into v_high only
    rng = random.Random(2)
    f = rand_poly_ball(rng, DOM, N, 5)
    g = rand_poly_ball(rng, DOM, N, 5)
    p = fb.mul(ctx, f, g)
    assert p.v_high > 0
    assert p.v_err == 0
    # within-truncation product stays exact: degree 2 * degree 3 at N=8
    p2 = fb.mul(ctx, rand_poly_ball(rng, DOM, N, 2), rand_poly_ball(rng, DOM, N, 3))
    assert p2.v_high == 0 and p2.v_err == 0


def test_mul_sampling_oracle():
    rng = random.Random(3)
    for _ in range(12):
        f = rand_poly_ball(rng, DOM, N, 5)
        g = rand_poly_ball(rng, DOM, N, 5)
        p = fb.mul(ctx, f, g)
        fm, gm = sample_member(rng, f), sample_member(rng, g)
        hm = member_product(fm, gm, 120)
        for z in domain_points(rng, DOM, 10):
            val = eval_member(hm, z, DOM, 120)
            out = fb.evaluate(ctx, p, rectangle(z))
            assert out.re.contains(val), (z, val, out)


def test_norm_submultiplicative():
    rng = random.Random(4)
    for _ in range(50):
        f = fb.inflate(ctx, rand_poly_ball(rng, DOM, N, 4), "0.01")
        g = fb.inflate(ctx, rand_poly_ball(rng, DOM, N, 4), "0.02")
        lhs = fb.norm_upper(ctx, fb.mul(ctx, f, g))
        rhs = ctx.mul_up(fb.norm_upper(ctx, f), fb.norm_upper(ctx, g))
        assert lhs <= rhs * Decimal("1.000000000000000001")


def test_theta_values():
    ident = fb.affine_arg(ctx, DOM, N, 1)
    assert fb.theta(ctx, ident) == 1
    assert fb.theta(ctx, fb.const_ball(DOM, N, 1)) == 0
    # affine argument with the published scaling constant squared
    a = Decimal(REF_A[:22])
    a2 = ctx.mul_up(a, a)
    th = fb.theta(ctx, fb.affine_arg(ctx, DOM, N, a2))
    assert Decimal("0.4957") < th < Decimal("0.4959")


def test_affine_arg_coeffs():
    ident = fb.affine_arg(ctx, DOM, N, 1)
    assert ident.coeffs[0].re == interval(1)
    assert ident.coeffs[1].re == interval("2.5")
    zero = fb.affine_arg(ctx, DOM, N, 0)
    assert fb.norm_upper(ctx, zero) == 0
    a = Decimal(REF_A[:22])
    a2 = ctx.mul_up(a, a)
    aff = fb.affine_arg(ctx, DOM, N, a2)
    assert str(aff.coeffs[0].re.lo)[:9] == "0.1596284"
    assert str(aff.coeffs[1].re.lo)[:9] == "0.3990711"


def test_compose_basics():
    rng = random.Random(5)
    h = rand_poly_ball(rng, DOM, N, 3, coeff_scale=0.4)
    e1 = fb.basis_ball(DOM, N, 1)
    c = fb.compose(ctx, e1, h)
    u = fb.normalized_argument(ctx, h)
    assert all(c.coeffs[k].re == u.coeffs[k].re for k in range(N + 1))
    ident = fb.affine_arg(ctx, DOM, N, 1)
    f = rand_poly_ball(rng, DOM, N, 4)
    cf = fb.compose(ctx, f, ident)
    for k in range(N + 1):
        assert cf.coeffs[k].re.contains_interval(f.coeffs[k].re)


def test_compose_contract_failure():
    f = fb.inflate(ctx, fb.basis_ball(DOM, N, 2), "0.1")
    ident = fb.affine_arg(ctx, DOM, N, 1)  # theta == 1
    with pytest.raises(CompositionContractFailure):
        fb.compose(ctx, f, ident)
    # pure polynomial composition tolerates theta == 1
    fb.compose(ctx, fb.basis_ball(DOM, N, 2), ident)


def test_compose_sampling_oracle():
    rng = random.Random(6)
    for _ in range(10):
        f = rand_poly_ball(rng, DOM, N, 4)
        s = Decimal(rng.randint(100, 350)) / Decimal(1000)
        h = fb.affine_arg(ctx, DOM, N, s)
        comp = fb.compose(ctx, f, h)
        fm, hm = sample_member(rng, f), {0: s * DOM.center, 1: s * DOM.radius}
        for z in domain_points(rng, DOM, 10):
            inner = eval_member(hm, z, DOM, 120)
            val = eval_member(fm, inner, DOM, 120)
            out = fb.evaluate(ctx, comp, rectangle(z))
            assert out.re.contains(val), (z, val, out)


def test_compose_derivative_basics():
    e2 = fb.basis_ball(DOM, N, 2)
    d = fb.compose_derivative(ctx, e2, fb.const_ball(DOM, N, 1))
    assert fb.norm_upper(ctx, d) == 0
    ident = fb.affine_arg(ctx, DOM, N, 1)
    h = fb.scale(ctx, Decimal("0.3"), ident)
    d2 = fb.compose_derivative(ctx, ident, h)
    assert d2.coeffs[0].re.contains(1)
    assert all(ctx.mag1(c) == 0 for c in d2.coeffs[1:])


def test_compose_derivative_sampling_oracle():
    rng = random.Random(7)
    for _ in range(10):
        f = rand_poly_ball(rng, DOM, N, 4)
        s = Decimal(rng.randint(100, 350)) / Decimal(1000)
        h = fb.affine_arg(ctx, DOM, N, s)
        comp = fb.compose_derivative(ctx, f, h)
        fm = sample_member(rng, f)
        hm = {0: s * DOM.center, 1: s * DOM.radius}
        for z in domain_points(rng, DOM, 10):
            inner = eval_member(hm, z, DOM, 120)
            val = eval_member_derivative(fm, inner, DOM, 120)
            out = fb.evaluate(ctx, comp, rectangle(z))
            assert out.re.contains(val), (z, val, out)


def test_eval_basics():
    for k in range(1, N + 1):
        out = fb.evaluate(ctx, fb.basis_ball(DOM, N, k), rectangle(1))
        assert out.re.contains(0) and out.re.mag == 0
    one = fb.one_ball(DOM, N)
    out = fb.evaluate(ctx, one, rectangle("3.2"))
    assert out.re.contains(1)
    with pytest.raises(PointOutsideDomain):
        fb.evaluate(ctx, one, rectangle("3.6"))


def test_eval_isotonic_in_argument():
    rng = random.Random(8)
    f = fb.inflate(ctx, rand_poly_ball(rng, DOM, N, 5), "0.001")
    big = rectangle(interval("0.5", "1.5"))
    small = rectangle(interval("0.7", "1.2"))
    out_b = fb.evaluate(ctx, f, big)
    out_s = fb.evaluate(ctx, f, small)
    assert out_b.re.contains_interval(out_s.re)


def test_coefficient():
    e3 = fb.basis_ball(DOM, N, 3)
    assert fb.coefficient(ctx, e3, 3).re == interval(1)
    assert fb.coefficient(ctx, e3, 0).re == interval(0)
    with pytest.raises(IndexBeyondTruncation):
        fb.coefficient(ctx, e3, N + 1)
    g = fb.inflate(ctx, e3, "0.5")
    c0 = fb.coefficient(ctx, g, 0)
    assert c0.re == interval("-0.5", "0.5")


def test_inflate():
    f = rand_poly_ball(random.Random(9), DOM, N, 3)
    assert fb.inflate(ctx, f, 0) == f
    u = fb.inflate(ctx, fb.zero_ball(DOM, N), 1)
    assert fb.norm_upper(ctx, u) == 1


def test_serialization_roundtrip():
    rng = random.Random(10)
    f = fb.inflate(ctx, rand_poly_ball(rng, DOM, N, 6), "1e-9")
    text = fb.serialize_ball(f)
    g = fb.deserialize_ball(text)
    assert g == f
    assert fb.serialize_ball(g) == text


def test_power_table_matches_compose():
    # both routes are enclosures of the same composition; they must agree on
    # every sampled member value even though their widths differ slightly
    rng = random.Random(12)
    h = rand_poly_ball(rng, DOM, N, 3, coeff_scale=0.3)
    table = fb.power_table(ctx, h)
    f = fb.inflate(ctx, rand_poly_ball(rng, DOM, N, 5), "0.001")
    via_table = table.compose(ctx, f)
    direct = fb.compose(ctx, f, h)
    for z in domain_points(rng, DOM, 20):
        a = fb.evaluate(ctx, via_table, rectangle(z))
        b = fb.evaluate(ctx, direct, rectangle(z))
        mid = ctx.imid(b.re)
        assert a.re.lo <= mid <= a.re.hi
    for _ in range(10):
        fm = sample_member(rng, f)
        hm = sample_member(rng, h)
        for z in domain_points(rng, DOM, 5):
            inner = eval_member(hm, z, DOM, 120)
            val = eval_member(fm, inner, DOM, 120)
            assert fb.evaluate(ctx, via_table, rectangle(z)).re.contains(val)
