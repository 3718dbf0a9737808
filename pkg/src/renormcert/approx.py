"""Non-rigorous multi-precision numerics that bootstrap the certifier.

Produces the approximate fixed point G0, the approximate eigenpairs for the
parameter-scaling and noise-scaling problems, and the frozen linear maps
used by the Newton-like certification operators.  Everything here runs in
round-to-nearest decimal arithmetic inside a local context; no rounding
state is shared with the directed-rounding side.

Polynomials are plain lists of Decimal coefficients in the scaled-monomial
basis e_k(z) = ((z - c)/r)**k of a disc (c, r), truncated at degree N.
"""

from __future__ import annotations

import decimal
from decimal import Decimal

import numpy as np

from .balls import Disc, STANDARD_DISC
from .errors import (
    ConfigError,
    EigenSelectionAmbiguous,
    NewtonDivergence,
    SingularJacobian,
)

__all__ = [
    "default_seed",
    "approx_fixed_point",
    "dt_matrix",
    "l_matrix",
    "approx_jacobian",
    "approx_eigenpair",
    "build_lambda",
    "t_apply",
    "dt_apply",
    "mat_inv",
    "lu_solve",
    "poly_eval",
]

_D0 = Decimal(0)
_D1 = Decimal(1)
_D2 = Decimal(2)

#: classical starting guess g(x) ~ 1 - 1.5276 x**2, written for G(X).
_SEED_QUADRATIC = Decimal("-1.5276")

#: literature hint used only to pick the parameter-scaling eigenvalue
#: out of the bootstrap spectrum; rigor comes from the certificate.
_DELTA_HINT = 4.669


def _context(digits: int) -> decimal.Context:
    return decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)


def default_seed(domain: Disc = STANDARD_DISC) -> list[Decimal]:
    """Affine seed for the fixed-point Newton iteration: G(X) = 1 + q(X - ...)."""
    c, r = domain.center, domain.radius
    return [_D1 + _SEED_QUADRATIC * c, _SEED_QUADRATIC * r]


# -- dense polynomial helpers (assume a decimal context is active) -----------

def _pad(f: list[Decimal], n: int) -> list[Decimal]:
    if len(f) > n + 1:
        return f[: n + 1]
    return f + [_D0] * (n + 1 - len(f))


def p_add(f, g):
    return [a + b for a, b in zip(f, g)]

def p_sub(f, g):
    return [a - b for a, b in zip(f, g)]

def p_scale(s, f):
    return [s * a for a in f]


def p_mul(f, g, n: int):
    out = [_D0] * (n + 1)
    for i, fi in enumerate(f):
        if not fi:
            continue
        if i > n:
            break
        for j, gj in enumerate(g):
            k = i + j
            if k > n:
                break
            if gj:
                out[k] += fi * gj
    return out


def p_deriv(f, r: Decimal):
    n = len(f) - 1
    out = [Decimal(k + 1) * f[k + 1] / r for k in range(n)]
    return out + [_D0]


def poly_eval(f, x, domain: Disc = STANDARD_DISC):
    """Evaluate at a point by Horner in the scaled basis."""
    u = (x - domain.center) / domain.radius
    acc = f[-1]
    for k in range(len(f) - 2, -1, -1):
        acc = acc * u + f[k]
    return acc


def _normalize_arg(h, domain: Disc, n: int):
    u = list(_pad(h, n))
    u[0] = (u[0] - domain.center) / domain.radius
    inv = _D1 / domain.radius
    for k in range(1, n + 1):
        u[k] = u[k] * inv
    return u


def _power_list(u, n: int):
    powers = [_pad([_D1], n), list(u)]
    for _ in range(2, n + 1):
        powers.append(p_mul(powers[-1], u, n))
    return powers


def _table_compose(f, powers, n: int):
    out = [_D0] * (n + 1)
    for k, fk in enumerate(f):
        if not fk:
            continue
        pk = powers[k]
        for i in range(n + 1):
            if pk[i]:
                out[i] += fk * pk[i]
    return out


class _MidShared:
    """Midpoint analogue of the shared operator evaluations."""

    def __init__(self, g, domain: Disc, n: int):
        c, r = domain.center, domain.radius
        self.domain, self.n = domain, n
        g = _pad(g, n)
        self.a = poly_eval(g, _D1, domain)
        if not self.a:
            raise NewtonDivergence("normalisation a = G(1) vanished")
        self.a2 = self.a * self.a
        self.ainv = _D1 / self.a
        self.ainv2 = self.ainv * self.ainv
        affine = _pad([self.a2 * c, self.a2 * r], n)
        self.up1 = _power_list(_normalize_arg(affine, domain, n), n)
        self.inner = _table_compose(g, self.up1, n)
        self.squared = p_mul(self.inner, self.inner, n)
        self.up2 = _power_list(_normalize_arg(self.squared, domain, n), n)
        self.outer = _table_compose(g, self.up2, n)
        gd = p_deriv(g, r)
        self.deriv_outer = _table_compose(gd, self.up2, n)
        self.deriv_inner = _table_compose(gd, self.up1, n)
        two_inner = p_scale(_D2 * self.ainv, self.inner)
        self.c16 = p_mul(self.deriv_outer, two_inner, n)
        self.c16sq = p_mul(self.c16, self.c16, n)
        x_poly = _pad([c, r], n)
        self.factor17 = p_mul(p_mul(self.c16, self.deriv_inner, n),
                              p_scale(_D2 * self.a, x_poly), n)


def t_apply(g, domain: Disc = STANDARD_DISC, n: int | None = None, digits: int = 30):
    """T(G) truncated to degree n, in round-to-nearest arithmetic."""
    if n is None:
        n = len(g) - 1
    with decimal.localcontext(_context(digits)):
        shared = _MidShared(g, domain, n)
        return p_scale(shared.ainv, shared.outer)


def dt_apply(g, dg, domain: Disc = STANDARD_DISC, n: int | None = None,
             digits: int = 30, simplified: bool = False):
    """Directional derivative of T at g in direction dg, truncated."""
    if n is None:
        n = len(g) - 1
    with decimal.localcontext(_context(digits)):
        s = _MidShared(g, domain, n)
        dg = _pad(dg, n)
        da = poly_eval(dg, _D1, domain)
        out = p_scale(s.ainv, _table_compose(dg, s.up2, n))
        out = p_add(out, p_mul(s.c16, _table_compose(dg, s.up1, n), n))
        if da and not simplified:
            out = p_add(out, p_scale(-s.ainv2 * da, s.outer))
            out = p_add(out, p_scale(da, s.factor17))
        return out


def dt_matrix(g, domain: Disc = STANDARD_DISC, n: int | None = None, digits: int = 30):
    """Matrix of the truncated derivative of T at g, columns DT(g) e_k."""
    if n is None:
        n = len(g) - 1
    with decimal.localcontext(_context(digits)):
        s = _MidShared(g, domain, n)
        cols = []
        for k in range(n + 1):
            col = p_scale(s.ainv, s.up2[k])
            col = p_add(col, p_mul(s.c16, s.up1[k], n))
            if k == 0:
                # e_0(1) = 1: the normalisation-variation terms act
                col = p_add(col, p_scale(-s.ainv2, s.outer))
                col = p_add(col, s.factor17)
            cols.append(col)
        return [[cols[k][i] for k in range(n + 1)] for i in range(n + 1)]


def l_matrix(g, domain: Disc = STANDARD_DISC, n: int | None = None, digits: int = 30):
    """Matrix of the truncated noise-scaling operator at g."""
    if n is None:
        n = len(g) - 1
    with decimal.localcontext(_context(digits)):
        s = _MidShared(g, domain, n)
        cols = []
        for k in range(n + 1):
            col = p_mul(s.c16sq, s.up1[k], n)
            col = p_add(col, p_scale(s.ainv2, s.up2[k]))
            cols.append(col)
        return [[cols[k][i] for k in range(n + 1)] for i in range(n + 1)]


# -- dense linear algebra ------------------------------------------------------

def lu_factor(a):
    """In-place LU with partial pivoting; returns (lu, perm)."""
    n = len(a)
    lu = [row[:] for row in a]
    perm = list(range(n))
    for col in range(n):
        pivot = max(range(col, n), key=lambda i: abs(lu[i][col]))
        if not lu[pivot][col]:
            raise SingularJacobian(f"zero pivot in column {col}")
        if pivot != col:
            lu[pivot], lu[col] = lu[col], lu[pivot]
            perm[pivot], perm[col] = perm[col], perm[pivot]
        inv = _D1 / lu[col][col]
        for i in range(col + 1, n):
            factor = lu[i][col] * inv
            lu[i][col] = factor
            if factor:
                row_i, row_c = lu[i], lu[col]
                for j in range(col + 1, n):
                    if row_c[j]:
                        row_i[j] -= factor * row_c[j]
    return lu, perm


def _lu_solve_factored(lu, perm, b):
    n = len(lu)
    x = [b[perm[i]] for i in range(n)]
    for i in range(n):
        row = lu[i]
        s = x[i]
        for j in range(i):
            if row[j] and x[j]:
                s -= row[j] * x[j]
        x[i] = s
    for i in range(n - 1, -1, -1):
        row = lu[i]
        s = x[i]
        for j in range(i + 1, n):
            if row[j] and x[j]:
                s -= row[j] * x[j]
        x[i] = s / row[i]
    return x


def lu_solve(a, b, digits: int = 30):
    with decimal.localcontext(_context(digits)):
        lu, perm = lu_factor(a)
        return _lu_solve_factored(lu, perm, b)


def mat_inv(a, digits: int = 30):
    with decimal.localcontext(_context(digits)):
        n = len(a)
        lu, perm = lu_factor(a)
        cols = []
        for k in range(n):
            e = [_D0] * n
            e[k] = _D1
            cols.append(_lu_solve_factored(lu, perm, e))
        return [[cols[k][i] for k in range(n)] for i in range(n)]


def _mat_vec(a, v):
    return [sum((row[j] * v[j] for j in range(len(v)) if v[j]), _D0) for row in a]


def _sup_norm(v):
    return max((abs(x) for x in v), default=_D0)


# -- fixed point ----------------------------------------------------------------

def _newton_fixed_point_stage(g, domain, n, digits, tol, max_iter=50):
    g = _pad(g, n)
    if abs(poly_eval(g, _D1, domain)) < Decimal("0.05"):
        raise NewtonDivergence("seed normalisation G(1) too close to zero")
    identity = [[_D1 if i == j else _D0 for j in range(n + 1)] for i in range(n + 1)]
    for _ in range(max_iter):
        shared = _MidShared(g, domain, n)
        t_of_g = p_scale(shared.ainv, shared.outer)
        residual = p_sub(t_of_g, g)
        if _sup_norm(residual) < tol:
            return g
        jac = dt_matrix(g, domain, n, digits)
        jac = [[jac[i][j] - identity[i][j] for j in range(n + 1)] for i in range(n + 1)]
        lu, perm = lu_factor(jac)
        delta = _lu_solve_factored(lu, perm, [-x for x in residual])
        g = p_add(g, delta)
    raise NewtonDivergence(f"no convergence below {tol} in {max_iter} iterations")


def _stage_ladder(n: int) -> list[int]:
    if n <= 20:
        return [n]
    stages, m = [], 20
    while m < n:
        stages.append(m)
        m = min(2 * m, n)
    stages.append(n)
    return stages


def approx_fixed_point(n: int, digits: int, seed=None,
                       domain: Disc = STANDARD_DISC) -> list[Decimal]:
    """Polynomial approximation to the fixed point, residual below 10**-(digits-6).

    Bootstraps deterministically: Newton from the classical quadratic-map
    seed at degree min(n, 20), then continuation through doubling degrees.
    """
    if n < 2:
        raise ConfigError("need truncation degree >= 2")
    if digits < 10:
        raise ConfigError("need at least 10 digits")
    with decimal.localcontext(_context(digits)):
        g = list(seed) if seed is not None else default_seed(domain)
        tol = Decimal(10) ** -(digits - 6)
        for stage_n in _stage_ladder(n):
            g = _newton_fixed_point_stage(g, domain, stage_n, digits, tol)
        return g


# -- eigenpairs -------------------------------------------------------------------

def _to_float_matrix(m):
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def _select_delta(values):
    candidates = [(abs(v.real - _DELTA_HINT), v) for v in values
                  if abs(v) > 1 and abs(v.imag) < 1e-6]
    if not candidates:
        raise EigenSelectionAmbiguous("no real eigenvalue outside the unit disc")
    candidates.sort(key=lambda t: t[0])
    if len(candidates) > 1 and abs(candidates[0][0] - candidates[1][0]) < 1e-3:
        raise EigenSelectionAmbiguous(
            f"two candidates near the target: {candidates[0][1]}, {candidates[1][1]}")
    return candidates[0][1].real


def _select_dominant(values):
    ordered = sorted(values, key=lambda v: -abs(v))
    top = ordered[0]
    if abs(top.imag) > 1e-6 * abs(top):
        raise EigenSelectionAmbiguous(f"dominant eigenvalue not real: {top}")
    if len(ordered) > 1 and abs(abs(ordered[0]) - abs(ordered[1])) < 1e-6 * abs(top):
        raise EigenSelectionAmbiguous("dominant eigenvalue not isolated")
    return top.real


def _eigen_newton(matrix, vec, phi_power: int, digits: int, max_iter=50):
    """Polish (x, lambda = x[0]) for M x = phi(x)**p x with phi(x) = x[0]."""
    n = len(vec) - 1
    tol = Decimal(10) ** -(digits - 6)
    for _ in range(max_iter):
        lam = vec[0]
        lam_p = lam ** phi_power
        mx = _mat_vec(matrix, vec)
        residual = [mx[i] - lam_p * vec[i] for i in range(n + 1)]
        if _sup_norm(residual) < tol * max(_D1, _sup_norm(vec)):
            return vec
        dlam = Decimal(phi_power) * lam ** (phi_power - 1)
        jac = [row[:] for row in matrix]
        for i in range(n + 1):
            jac[i][i] -= lam_p
            jac[i][0] -= dlam * vec[i]
        lu, perm = lu_factor(jac)
        delta = _lu_solve_factored(lu, perm, [-x for x in residual])
        vec = [vec[i] + delta[i] for i in range(n + 1)]
    raise NewtonDivergence("eigenpair polish did not converge")


def approx_eigenpair(kind: str, g0, digits: int,
                     domain: Disc = STANDARD_DISC) -> tuple[list[Decimal], Decimal]:
    """Approximate eigenfunction and eigenvalue, normalised so coeff0 = eigenvalue.

    kind 'delta': eigenvalue of the derivative of T nearest the known
    parameter-scaling constant among those outside the unit disc.
    kind 'gamma': square root of the dominant eigenvalue of the noise
    operator; the returned scalar is that root.
    """
    n = len(g0) - 1
    if kind == "delta":
        matrix = dt_matrix(g0, domain, n, digits)
        phi_power = 1
    elif kind == "gamma":
        matrix = l_matrix(g0, domain, n, digits)
        phi_power = 2
    else:
        raise ConfigError(f"unknown eigenpair kind {kind!r}")
    mf = _to_float_matrix(matrix)
    values, vectors = np.linalg.eig(mf)
    if kind == "delta":
        lam = _select_delta(values)
        target = lam
    else:
        lam = _select_dominant(values)
        if lam <= 0:
            raise EigenSelectionAmbiguous("dominant noise eigenvalue not positive")
        target = float(np.sqrt(lam))
    idx = int(np.argmin(np.abs(values - lam)))
    vec_f = vectors[:, idx].real
    if abs(vec_f[0]) < 1e-12:
        raise EigenSelectionAmbiguous("eigenvector has vanishing constant coefficient")
    with decimal.localcontext(_context(digits)):
        vec = [Decimal(repr(float(x))) for x in vec_f]
        scale_to = Decimal(repr(float(target))) / vec[0]
        vec = [x * scale_to for x in vec]
        vec = _eigen_newton(matrix, vec, phi_power, digits)
        return vec, vec[0]


# -- jacobians and the frozen linear map -------------------------------------------

def approx_jacobian(kind: str, g0, x0=None, digits: int = 30,
                    domain: Disc = STANDARD_DISC):
    """Truncated Jacobian of the residual map for the given problem kind.

    fixed_point: derivative of T minus identity, at g0.
    delta_eigen/gamma_eigen: operator matrix minus the eigenvalue terms,
    including the rank-one normalisation coupling, at x0.
    """
    n = len(g0) - 1
    with decimal.localcontext(_context(digits)):
        if kind == "fixed_point":
            jac = dt_matrix(g0, domain, n, digits)
            for i in range(n + 1):
                jac[i][i] -= _D1
            return jac
        if x0 is None:
            raise ConfigError("eigen jacobians need the approximate eigenfunction")
        x0 = _pad(list(x0), n)
        lam = x0[0]
        if kind == "delta_eigen":
            jac = dt_matrix(g0, domain, n, digits)
            dlam = _D1
            lam_p = lam
        elif kind == "gamma_eigen":
            jac = l_matrix(g0, domain, n, digits)
            dlam = _D2 * lam
            lam_p = lam * lam
        else:
            raise ConfigError(f"unknown problem kind {kind!r}")
        for i in range(n + 1):
            jac[i][i] -= lam_p
            jac[i][0] -= dlam * x0[i]
        return jac


_TAIL_SCALARS = {"fixed_point": "minus_one", "delta_eigen": "inv", "gamma_eigen": "inv_sq"}


def build_lambda(kind: str, jac, digits: int = 30, lambda0: Decimal | None = None):
    """Frozen linear map approximating the inverse Jacobian.

    Matrix block: rounded midpoint inverse of the truncated Jacobian.  Tail
    scalar: -1 for the fixed point (the derivative of T decays on high
    degrees, so the Jacobian is near minus identity there), -1/lambda0 for
    the parameter-scaling problem and -1/lambda0**2 for the noise problem.
    """
    from .contraction import LinearMap

    if kind not in _TAIL_SCALARS:
        raise ConfigError(f"unknown problem kind {kind!r}")
    with decimal.localcontext(_context(digits)):
        inv = mat_inv(jac, digits)
        if kind == "fixed_point":
            tail = -_D1
        else:
            if lambda0 is None:
                raise ConfigError("eigen kinds need lambda0 for the tail scalar")
            tail = -_D1 / lambda0 if kind == "delta_eigen" else -_D1 / (lambda0 * lambda0)
        matrix = tuple(tuple(+x for x in row) for row in inv)
        return LinearMap(matrix=matrix, tail_scalar=tail)
