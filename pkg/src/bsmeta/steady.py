"""Shooting construction of the stationary states.

The stationary problem

    eps*(h(u)u_x)_x = f(u)_x - f'(u),   u(0) = u(ell) = 0,

is solved by integrating the associated Cauchy problem u(0) = 0, u_x(0) =
alpha as the first-order system

    u_x = v,   eps*h(u)*v_x = -eps*h'(u)*v^2 + f'(u)*v - f'(u),

with a classical fourth-order one-step scheme at fixed step.  For slopes
below the critical value the trajectory returns to zero after a length
L(alpha); root-finding L(alpha) = ell on the initial slope yields the
positive state, and the remaining branches (negative, one-zero, N-zero) are
assembled from it by reflection and gluing, which is exact for even h since
the equation is autonomous in x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from bsmeta.model import (
    GridFunction,
    ModelFunctions,
    NoSolutionError,
    ProblemSpec,
    UnsupportedModelError,
    alpha_bar,
    existence_threshold,
)

__all__ = [
    "ShootOutcome",
    "ShootResult",
    "BranchKind",
    "SteadyState",
    "LengthMapResult",
    "shoot",
    "length_map",
    "solve_positive",
    "solve_negative",
    "solve_one_zero",
    "solve_n_zero",
    "epsilon_sweep",
    "boundary_slope_scaling",
    "clear_cache",
]

EVENT_TOL = 1e-10
ROOT_TOL = 1e-9
GLUE_TOL = 1e-4


class ShootOutcome(Enum):
    RETURN_AT = "return"
    MONOTONE_ESCAPE = "escape"
    DIVERGED = "diverged"


@dataclass
class ShootResult:
    """Outcome of one Cauchy-problem integration from slope alpha."""

    outcome: ShootOutcome
    alpha: float
    L: float | None
    trajectory: GridFunction
    # raw integration nodes, for dense resampling by the solvers
    xs: np.ndarray
    us: np.ndarray
    vs: np.ndarray
    v_end: float | None = None

    def spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.xs, self.us, self.vs)


class BranchKind(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ONE_ZERO_MINUS = "one_zero_minus"
    ONE_ZERO_PLUS = "one_zero_plus"
    N_ZERO = "n_zero"


@dataclass
class SteadyState:
    """A stationary solution on the uniform grid, tagged with its branch."""

    kind: BranchKind
    u: GridFunction
    epsilon: float
    alpha_star: float
    boundary_slopes: tuple[float, float]
    max_abs: float
    n_zeros: int = 0

    @property
    def label(self) -> str:
        if self.kind is BranchKind.N_ZERO:
            return f"n_zero:{self.n_zeros}"
        return self.kind.value


def _scalar_funcs(model: ModelFunctions):
    """Scalar-fast h, h', f' for the integration hot loop."""
    if model.name_h == "const":
        h = lambda u: 1.0
        dh = lambda u: 0.0
    elif model.name_h == "gauss":
        h = lambda u: math.exp(-u * u)
        dh = lambda u: -2.0 * u * math.exp(-u * u)
    elif model.name_h == "mullins":
        h = lambda u: 1.0 / (1.0 + u * u)
        dh = lambda u: -2.0 * u / (1.0 + u * u) ** 2
    else:
        h, dh = model.h, model.dh
    if model.name_f == "quadratic":
        df = lambda u: u
    else:
        df = model.df
    return h, dh, df


def _hermite_eval(x0, x1, u0, u1, v0, v1, x):
    s = (x - x0) / (x1 - x0)
    dx = x1 - x0
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * u0 + h10 * dx * v0 + h01 * u1 + h11 * dx * v1


def _march(v0: float, spec: ProblemSpec, step: float, horizon: float,
           sgn: float = 1.0):
    """RK4 march of u' = v, eps*h(u)*v' = -eps*h'(u)*v^2 + s*f'(u)*(v - s).

    s = +1 is the shooting Cauchy problem read left to right; s = -1 is the
    same trajectory traversed from the right endpoint (the substitution
    x -> ell - x flips the sign of the convective terms).  Returns the raw
    outcome together with the stored nodes and, for a returning trajectory,
    the refined crossing length and the slope there.
    """
    eps = spec.epsilon
    h, dh, df = _scalar_funcs(spec.model)
    radius = 1.5 * spec.model.R

    def rhs(u, v):
        dfu = sgn * df(u)
        return v, (-eps * dh(u) * v * v + dfu * (v - sgn)) / (eps * h(u))

    nmax = int(math.ceil(horizon / step)) + 1
    xs = np.empty(nmax + 1)
    us = np.empty(nmax + 1)
    vs = np.empty(nmax + 1)
    x, u, v = 0.0, 0.0, v0
    xs[0], us[0], vs[0] = x, u, v
    monotone = True
    k = 0
    crossing = None
    for k in range(1, nmax + 1):
        k1u, k1v = rhs(u, v)
        k2u, k2v = rhs(u + 0.5 * step * k1u, v + 0.5 * step * k1v)
        k3u, k3v = rhs(u + 0.5 * step * k2u, v + 0.5 * step * k2v)
        k4u, k4v = rhs(u + step * k3u, v + step * k3v)
        un = u + step / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        vn = v + step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        xn = x + step
        xs[k], us[k], vs[k] = xn, un, vn
        if vn <= 0.0:
            monotone = False
        if un <= 0.0 and u > 0.0 and xn > step:
            crossing = (x, xn, u, un, v, vn)
            break
        if abs(un) > radius:
            outcome = (ShootOutcome.MONOTONE_ESCAPE if monotone
                       else ShootOutcome.DIVERGED)
            return outcome, xs[:k + 1].copy(), us[:k + 1].copy(), vs[:k + 1].copy(), None, None
        x, u, v = xn, un, vn
    else:
        outcome = (ShootOutcome.MONOTONE_ESCAPE if monotone
                   else ShootOutcome.DIVERGED)
        return outcome, xs[:k + 1].copy(), us[:k + 1].copy(), vs[:k + 1].copy(), None, None

    xa, xb, ua, ub, va, vb = crossing
    lo, hi = xa, xb
    while hi - lo > EVENT_TOL:
        midx = 0.5 * (lo + hi)
        if _hermite_eval(xa, xb, ua, ub, va, vb, midx) > 0.0:
            lo = midx
        else:
            hi = midx
    L = 0.5 * (lo + hi)
    # derivative of the Hermite interpolant at the crossing
    dd = 1e-7 * (xb - xa)
    v_end = (_hermite_eval(xa, xb, ua, ub, va, vb, min(L + dd, xb))
             - _hermite_eval(xa, xb, ua, ub, va, vb, L - dd)) / (min(L + dd, xb) - (L - dd))
    xs_out = np.append(xs[:k], L)
    us_out = np.append(us[:k], 0.0)
    vs_out = np.append(vs[:k], v_end)
    return ShootOutcome.RETURN_AT, xs_out, us_out, vs_out, float(L), float(v_end)


def shoot(alpha: float, spec: ProblemSpec, step: float | None = None,
          horizon: float | None = None) -> ShootResult:
    """Integrate the shooting Cauchy problem from initial slope alpha.

    Fixed-step classical RK4; the first down-crossing u = 0 past the first
    step is refined by bisection on the cubic Hermite dense output of the
    crossing step, to an event tolerance of 1e-10.  A trajectory whose
    derivative stays positive up to the horizon (or until it leaves the
    validity radius while still monotone) is an escape.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    step = spec.ell / 1e4 if step is None else step
    horizon = 4.0 * spec.ell if horizon is None else horizon
    if horizon < 4.0 * spec.ell:
        raise ValueError("horizon must be at least 4*ell")
    outcome, xs, us, vs, L, v_end = _march(alpha, spec, step, horizon)
    traj = _resample(xs, us, vs, spec.n_cells)
    return ShootResult(outcome, alpha, L, traj, xs, us, vs, v_end=v_end)


def _resample(xs, us, vs, n_cells) -> GridFunction:
    spline = CubicHermiteSpline(xs, us, vs)
    ell = float(xs[-1])
    xq = np.linspace(0.0, ell, n_cells + 1)
    return GridFunction(ell=ell, values=spline(xq))


@dataclass
class LengthMapResult:
    points: list[tuple[float, float]]
    escapes: list[float]
    monotone_violations: list[tuple[float, float]]

    @property
    def monotone(self) -> bool:
        return not self.monotone_violations


def length_map(alphas, spec: ProblemSpec, step: float | None = None,
               tol: float = 1e-8) -> LengthMapResult:
    """Return-length L(alpha) over a sorted slope sweep, skipping escapes.

    Monotonicity of the resulting L sequence is asserted at the given
    tolerance; violations are collected and reported, not silently accepted.
    """
    alphas = list(alphas)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be sorted strictly increasing")
    abar = alpha_bar(spec.epsilon, spec.model)
    if alphas and (alphas[0] <= 0 or alphas[-1] >= abar):
        raise ValueError(f"alphas must lie in (0, {abar:g})")
    points: list[tuple[float, float]] = []
    escapes: list[float] = []
    for a in alphas:
        res = shoot(a, spec, step=step)
        if res.outcome is ShootOutcome.RETURN_AT:
            points.append((a, res.L))
        else:
            escapes.append(a)
    violations = [(a1, a2) for (a1, l1), (a2, l2) in zip(points, points[1:])
                  if l2 <= l1 + tol]
    if violations:
        warnings.warn(f"L(alpha) monotonicity violated at {violations}")
    return LengthMapResult(points=points, escapes=escapes,
                           monotone_violations=violations)


def _extend_bracket(g, alo: float, spec: ProblemSpec) -> tuple[float, float]:
    """Grow the slope bracket past the closed-form critical value.

    alo returns with L < ell.  March upward until an escape (or an L above
    ell) is seen, then shrink the upper end by bisection until both bracket
    ends sit in the returning region with a sign change of L - ell.
    """
    ahi = None
    a, da = alo, max(1e-3, 0.01 * alo)
    for _ in range(200):
        a = a + da
        val = g(a)
        if not math.isfinite(val) or val > 0.0:
            ahi = a
            break
        alo = a
    if ahi is None:
        raise NoSolutionError(
            f"no escape or L > ell found up to alpha = {a:g}"
        )
    # shrink until the upper end is a returning trajectory
    for _ in range(200):
        if math.isfinite(g(ahi)):
            return alo, ahi
        mid = 0.5 * (alo + ahi)
        val = g(mid)
        if not math.isfinite(val) or val > 0.0:
            ahi = mid
        else:
            alo = mid
        if ahi - alo < 1e-13:
            break
    raise NoSolutionError(
        "L(alpha) jumps from below ell straight to escape; "
        f"no root bracket found near alpha = {alo:g}"
    )


def _solve_positive_backward(spec: ProblemSpec, step: float | None) -> SteadyState:
    """Positive state by shooting from the right endpoint.

    Forward shooting is exponentially ill-conditioned in eps: the root slope
    approaches the escape boundary like exp(-c/eps) and below eps ~ 0.02 it
    is no longer representable in double precision.  The boundary layer sits
    at x = ell, so integrating the reversed system from (u, u_x) = (0, beta)
    at the right end is the stable direction; the unknown becomes the (steep)
    right slope beta < 0 and L(beta) = ell is well-conditioned.
    """
    step = spec.ell / 1e4 if step is None else step
    horizon = 4.0 * spec.ell

    def gback(q0: float):
        out = _march(q0, spec, step, horizon, sgn=-1.0)
        return out if out[0] is ShootOutcome.RETURN_AT else None

    # geometric scan on the reversed initial slope q0 = -beta
    qlo, glo = None, None
    q = 1.0
    for _ in range(60):
        res = gback(q)
        if res is not None and res[4] < spec.ell:
            qlo, glo = q, res
            break
        q *= 0.5
    if qlo is None:
        raise NoSolutionError("backward shooting found no short returning arc")
    qhi = None
    q = qlo * 2.0
    for _ in range(60):
        res = gback(q)
        if res is None or res[4] > spec.ell:
            qhi = q
            break
        qlo, glo = q, res
        q *= 2.0
    if qhi is None:
        raise NoSolutionError("backward shooting found no arc longer than ell")

    def g(q0: float) -> float:
        res = gback(q0)
        return (res[4] - spec.ell) if res is not None else 10.0 * spec.ell

    qstar = brentq(g, qlo, qhi, xtol=1e-15, rtol=8.9e-16)
    out = gback(qstar)
    if out is None or abs(out[4] - spec.ell) > ROOT_TOL:
        raise NoSolutionError(
            "backward root refinement failed: "
            f"|L - ell| = {abs((out[4] if out else np.nan) - spec.ell):.3g}"
        )
    _, ys, ws, qs, Lb, q_end = out
    xs = (spec.ell - ys)[::-1]
    us = ws[::-1]
    vs = -qs[::-1]
    xs[0] = 0.0
    spline = CubicHermiteSpline(xs, us, vs)
    xq = np.linspace(0.0, spec.ell, spec.n_cells + 1)
    values = spline(xq)
    values[0] = 0.0
    values[-1] = 0.0
    alpha_star = float(-q_end)
    return SteadyState(kind=BranchKind.POSITIVE,
                       u=GridFunction(ell=spec.ell, values=values),
                       epsilon=spec.epsilon, alpha_star=alpha_star,
                       boundary_slopes=(alpha_star, float(-qstar)),
                       max_abs=float(np.max(np.abs(values))))


_SOLVE_CACHE: dict = {}


def clear_cache() -> None:
    _SOLVE_CACHE.clear()


def solve_positive(spec: ProblemSpec, step: float | None = None) -> SteadyState:
    """The positive steady state, by root-finding L(alpha) = ell.

    An initial scan of 32 slopes in (1e-3, abar*(1 - 1e-3)) looks for a
    bracket of L(alpha) - ell.  The closed-form critical slope is only a
    local (convexity-at-zero) criterion and in practice returning
    trajectories persist slightly above it while L blows up at the actual
    escape boundary; when the scan stays below ell, the bracket is therefore
    extended past abar up to the first observed escape.  Brent refinement
    drives |L - ell| below 1e-9.  If the scan finds more than one sign change
    the extra roots are reported (the positive state is assumed unique).
    """
    key = None
    if spec.model.is_builtin:
        key = ("pos", spec.model.cache_key(), spec.epsilon, spec.ell,
               spec.n_cells, step)
        if key in _SOLVE_CACHE:
            return _SOLVE_CACHE[key]
    eps_max = existence_threshold(spec.model, spec.ell)
    if spec.epsilon >= eps_max:
        raise NoSolutionError(
            f"epsilon = {spec.epsilon:g} >= nonexistence threshold "
            f"{eps_max:g}: only the trivial steady state exists"
        )
    try:
        state = _solve_positive_forward(spec, step)
    except NoSolutionError as exc:
        if getattr(exc, "definite", False):
            raise
        state = _solve_positive_backward(spec, step)
    if key is not None:
        _SOLVE_CACHE[key] = state
    return state


def _solve_positive_forward(spec: ProblemSpec, step: float | None) -> SteadyState:
    abar = alpha_bar(spec.epsilon, spec.model)
    lo, hi = 1e-3, abar * (1.0 - 1e-3)
    scan = np.linspace(lo, hi, 32)
    gvals = []
    for a in scan:
        res = shoot(a, spec, step=step)
        gvals.append(res.L - spec.ell if res.outcome is ShootOutcome.RETURN_AT
                     else np.inf)
    gvals = np.array(gvals)
    finite = np.isfinite(gvals)
    signchg = [i for i in range(len(scan) - 1)
               if finite[i] and finite[i + 1] and gvals[i] * gvals[i + 1] <= 0.0]

    def g(a: float) -> float:
        res = shoot(a, spec, step=step)
        if res.outcome is not ShootOutcome.RETURN_AT:
            return math.inf
        return res.L - spec.ell

    if signchg:
        if len(signchg) > 1:
            warnings.warn(
                f"L(alpha) = ell has {len(signchg)} candidate roots in the "
                "scan; using the first (positive state assumed unique)"
            )
        i = signchg[0]
        blo, bhi = scan[i], scan[i + 1]
    elif finite.any() and np.max(gvals[finite]) < 0.0:
        blo, bhi = _extend_bracket(g, float(scan[finite][-1]), spec)
    elif finite.any() and np.min(gvals[finite]) > 0.0:
        # L(alpha) is increasing with L(0+) = pi*sqrt(eps*h(0)/f''(0)); if
        # even the shortest return exceeds ell, no positive state exists on
        # this interval (definite: do not try the backward fallback)
        exc = NoSolutionError(
            f"no positive steady state on ell = {spec.ell:g}: every return "
            f"length exceeds ell (shortest scanned "
            f"{float(np.min(gvals[finite]) + spec.ell):.4g}; the small-slope "
            f"limit is pi*sqrt(eps*h(0)/f''(0)))"
        )
        exc.definite = True
        raise exc
    else:
        lrange = (float(np.min(gvals[finite] + spec.ell)),
                  float(np.max(gvals[finite] + spec.ell))) if finite.any() else None
        raise NoSolutionError(
            f"bracketing failed for L(alpha) = ell = {spec.ell:g}; "
            f"scanned L range: {lrange}"
        )

    # near blow-up dL/dalpha is huge, so alpha must be resolved to the ulp
    alpha_star = brentq(g, blo, bhi, xtol=1e-15, rtol=8.9e-16)
    # one-ulp polish: with dL/dalpha of order 1e7 near the blow-up, the
    # best representable alpha may still miss ell by a few ulp*dL/dalpha
    candidates = [alpha_star, np.nextafter(alpha_star, 0.0),
                  np.nextafter(alpha_star, np.inf)]
    shots = [(abs(gv), a) for a in candidates
             if math.isfinite(gv := g(a))]
    _, alpha_star = min(shots)
    res = shoot(alpha_star, spec, step=step)
    slope_limit = 4.0 * abs(g(np.nextafter(alpha_star, np.inf))
                            - g(np.nextafter(alpha_star, 0.0)))
    tol = max(ROOT_TOL, slope_limit if math.isfinite(slope_limit) else ROOT_TOL)
    if res.outcome is not ShootOutcome.RETURN_AT or abs(res.L - spec.ell) > tol:
        raise NoSolutionError(
            f"root refinement failed: |L - ell| = "
            f"{abs((res.L or np.nan) - spec.ell):.3g} > {tol:g}"
        )
    xq = np.linspace(0.0, spec.ell, spec.n_cells + 1)
    values = res.spline()(xq)
    values[0] = 0.0
    values[-1] = 0.0
    u = GridFunction(ell=spec.ell, values=values)
    return SteadyState(kind=BranchKind.POSITIVE, u=u, epsilon=spec.epsilon,
                       alpha_star=float(alpha_star),
                       boundary_slopes=(float(alpha_star), float(res.v_end)),
                       max_abs=float(np.max(np.abs(values))))


def solve_negative(spec: ProblemSpec, step: float | None = None) -> SteadyState:
    """The negative steady state -u_pos(ell - x); requires even h."""
    if not spec.model.h_even():
        raise UnsupportedModelError(
            "negative branch needs a symmetric diffusion h(u) = h(-u)"
        )
    pos = solve_positive(spec, step=step)
    values = -pos.u.values[::-1]
    u = GridFunction(ell=spec.ell, values=values)
    # d/dx[-u_pos(ell-x)] = u_pos'(ell-x)
    return SteadyState(kind=BranchKind.NEGATIVE, u=u, epsilon=spec.epsilon,
                       alpha_star=pos.alpha_star,
                       boundary_slopes=(pos.boundary_slopes[1],
                                        pos.boundary_slopes[0]),
                       max_abs=pos.max_abs)


def _half_positive(spec: ProblemSpec, parts: int, step: float | None):
    if spec.n_cells % parts:
        raise ValueError(f"n_cells must be divisible by {parts} for this branch")
    sub = ProblemSpec(epsilon=spec.epsilon, ell=spec.ell / parts,
                      model=spec.model, n_cells=spec.n_cells // parts)
    return solve_positive(sub, step=step)


def solve_one_zero(sign: str, spec: ProblemSpec,
                   step: float | None = None) -> SteadyState:
    """Steady state with a single zero, pinned at ell/2 by the C^1 matching.

    sign "minus": negative on (0, ell/2), positive on (ell/2, ell);
    sign "plus" is the mirror image.  Each half is the positive solution of
    the half-length problem, translated and reflected (the stationary
    equation is autonomous in x, and h must be even for the reflection).
    """
    if sign not in ("minus", "plus"):
        raise ValueError("sign must be 'minus' or 'plus'")
    if not spec.model.h_even():
        raise UnsupportedModelError(
            "one-zero branches need a symmetric diffusion h(u) = h(-u)"
        )
    eps_max = existence_threshold(spec.model, spec.ell / 2.0)
    if spec.epsilon >= eps_max:
        raise NoSolutionError(
            f"epsilon = {spec.epsilon:g} >= half-length threshold {eps_max:g}"
        )
    half = _half_positive(spec, 2, step)
    uh = half.u.values
    if sign == "minus":
        values = np.concatenate([-uh[::-1], uh[1:]])
        kind = BranchKind.ONE_ZERO_MINUS
        slopes = (half.boundary_slopes[1], half.boundary_slopes[1])
    else:
        values = np.concatenate([uh, -uh[::-1][1:]])
        kind = BranchKind.ONE_ZERO_PLUS
        slopes = (half.boundary_slopes[0], half.boundary_slopes[0])
    u = GridFunction(ell=spec.ell, values=values)
    _check_glue(u, [spec.n_cells // 2])
    return SteadyState(kind=kind, u=u, epsilon=spec.epsilon,
                       alpha_star=half.alpha_star, boundary_slopes=slopes,
                       max_abs=half.max_abs, n_zeros=1)


def _check_glue(u: GridFunction, joints: list[int]) -> None:
    """One-sided slope mismatch at each glue node must stay below tolerance."""
    dx = u.dx
    v = u.values
    for j in joints:
        left = (3 * v[j] - 4 * v[j - 1] + v[j - 2]) / (2 * dx)
        right = (-3 * v[j] + 4 * v[j + 1] - v[j + 2]) / (2 * dx)
        if abs(left - right) > GLUE_TOL:
            raise NoSolutionError(
                f"derivative jump {abs(left - right):.3g} at glue node {j} "
                f"exceeds {GLUE_TOL:g}"
            )


def solve_n_zero(N: int, spec: ProblemSpec, first_sign: str = "minus",
                 step: float | None = None) -> SteadyState:
    """Steady state with N interior zeros on the uniform partition.

    N+1 alternating arcs of length ell/(N+1); the equal-length partition is
    forced by the C^1 matching at the interior zeros.  Requires
    eps < gamma*(ell/2^N/pi)^2.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if first_sign not in ("minus", "plus"):
        raise ValueError("first_sign must be 'minus' or 'plus'")
    if N == 0:
        return (solve_negative(spec, step=step) if first_sign == "minus"
                else solve_positive(spec, step=step))
    if N == 1:
        return solve_one_zero(first_sign, spec, step=step)
    if not spec.model.h_even():
        raise UnsupportedModelError(
            "multi-zero branches need a symmetric diffusion h(u) = h(-u)"
        )
    eps_max = existence_threshold(spec.model, spec.ell / 2 ** N)
    if spec.epsilon >= eps_max:
        raise NoSolutionError(
            f"epsilon = {spec.epsilon:g} >= N-zero threshold {eps_max:g}"
        )
    parts = N + 1
    half = _half_positive(spec, parts, step)
    uh = half.u.values
    sign = -1.0 if first_sign == "minus" else 1.0
    pieces = []
    for j in range(parts):
        arc = uh if sign > 0 else -uh[::-1]
        pieces.append(arc if j == 0 else arc[1:])
        sign = -sign
    values = np.concatenate(pieces)
    u = GridFunction(ell=spec.ell, values=values)
    m = spec.n_cells // parts
    _check_glue(u, [m * j for j in range(1, parts)])
    first = first_sign == "minus"
    slopes_half = half.boundary_slopes
    return SteadyState(kind=BranchKind.N_ZERO, u=u, epsilon=spec.epsilon,
                       alpha_star=half.alpha_star,
                       boundary_slopes=(slopes_half[1] if first else slopes_half[0],
                                        slopes_half[1] if (first == (N % 2 == 0)) else slopes_half[0]),
                       max_abs=half.max_abs, n_zeros=N)


_KIND_SOLVERS = {
    BranchKind.POSITIVE: lambda spec, step: solve_positive(spec, step=step),
    BranchKind.NEGATIVE: lambda spec, step: solve_negative(spec, step=step),
    BranchKind.ONE_ZERO_MINUS: lambda spec, step: solve_one_zero("minus", spec, step=step),
    BranchKind.ONE_ZERO_PLUS: lambda spec, step: solve_one_zero("plus", spec, step=step),
}


def epsilon_sweep(epsilons, kind: BranchKind, spec_template: ProblemSpec,
                  step: float | None = None) -> list[SteadyState]:
    """Solve the requested branch over a sorted increasing list of viscosities."""
    epsilons = list(epsilons)
    if any(b <= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilons must be sorted increasing")
    solver = _KIND_SOLVERS[kind]
    return [solver(spec_template.with_(epsilon=e), step) for e in epsilons]


def boundary_slope_scaling(epsilons, spec_template: ProblemSpec,
                           step: float | None = None) -> list[tuple[float, float]]:
    """The products eps * u'_{+}(ell-) over a viscosity sweep.

    The boundary slope of the positive state behaves like -1/eps, so the
    products sit in a fixed negative window; the window is measured, not
    prescribed.
    """
    out = []
    for e in epsilons:
        st = solve_positive(spec_template.with_(epsilon=e), step=step)
        out.append((e, e * st.boundary_slopes[1]))
    return out
