"""Diffusion/flux function pairs, structural assumptions and the stationary operator.

The equation under study is

    u_t = eps*(h(u)*u_x)_x - f(u)_x + f'(u),

where h is a positive diffusion coefficient with h'(u)*u <= 0 on a validity
interval [-R, R], and f is a convex flux with f(0) = f'(0) = 0 and odd
derivative.  This module holds the built-in (h, f) families, a sampled
validator for those structural conditions, the critical shooting slope, the
nonexistence threshold in eps, and a second-order discretization of the
stationary operator

    L u = -eps*(h(u)*u_x)_x + f'(u)*u_x - f'(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ModelFunctions",
    "ProblemSpec",
    "GridFunction",
    "AssumptionReport",
    "ConditionCheck",
    "EvaluationError",
    "UnsupportedModelError",
    "NoSolutionError",
    "validate_assumptions",
    "alpha_bar",
    "existence_threshold",
    "apply_L",
    "builtin_model",
    "H_NAMES",
    "F_NAMES",
]


class EvaluationError(ValueError):
    """A model function returned a non-finite value at some sample point."""


class UnsupportedModelError(ValueError):
    """The requested construction needs structure the model does not have."""


class NoSolutionError(ValueError):
    """No nontrivial steady state exists for the requested parameters."""


@dataclass(frozen=True)
class ModelFunctions:
    """A diffusion/flux pair (h, f) with derivatives and validity radius.

    All structural assumptions of the problem live here: h(u) >= h0 > 0 and
    h'(u)*u <= 0 on [-R, R]; f(0) = f'(0) = 0, f'' > 0 and f'(-u) = -f'(u).
    The fields d2h0 and d2f0 are the values h''(0) and f''(0), used by the
    critical-slope formula.
    """

    h: Callable[[float], float]
    dh: Callable[[float], float]
    d2h0: float
    f: Callable[[float], float]
    df: Callable[[float], float]
    d2f0: float
    R: float = 1.0
    name_h: str = "custom"
    name_f: str = "custom"
    # f'' as a callable; used by the implicit Jacobian. Defaults to a central
    # difference of df when not supplied analytically.
    d2f: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.R <= 0:
            raise ValueError("validity radius R must be positive")

    def d2f_eval(self, u):
        if self.d2f is not None:
            return self.d2f(u)
        step = 1e-6 * max(1.0, float(np.max(np.abs(u))) if np.ndim(u) else abs(u))
        return (self.df(u + step) - self.df(u - step)) / (2.0 * step)

    def h_even(self, samples: int = 64, tol: float = 1e-10) -> bool:
        """Sampled check of h(u) = h(-u) on [0, R]."""
        u = np.linspace(0.0, self.R, samples)
        return bool(np.max(np.abs(self.h(u) - self.h(-u))) <= tol)

    @property
    def is_builtin(self) -> bool:
        return self.name_h in H_NAMES and self.name_f in F_NAMES

    def cache_key(self):
        """Hashable identity, usable only for built-in pairs."""
        return (self.name_h, self.name_f, self.R)


def _finite_diff(fn: Callable[[float], float]) -> Callable[[float], float]:
    def deriv(u):
        step = 1e-6 * np.maximum(1.0, np.abs(u))
        return (fn(u + step) - fn(u - step)) / (2.0 * step)

    return deriv


_H_BUILTINS = {
    "const": (lambda u: np.ones_like(np.asarray(u, dtype=float)), lambda u: np.zeros_like(np.asarray(u, dtype=float)), 0.0),
    "gauss": (lambda u: np.exp(-(u ** 2)), lambda u: -2.0 * u * np.exp(-(u ** 2)), -2.0),
    "mullins": (lambda u: 1.0 / (1.0 + u ** 2), lambda u: -2.0 * u / (1.0 + u ** 2) ** 2, -2.0),
}

_F_BUILTINS = {
    "quadratic": (lambda u: 0.5 * u ** 2, lambda u: np.asarray(u, dtype=float) + 0.0, 1.0, lambda u: np.ones_like(np.asarray(u, dtype=float))),
}

H_NAMES = tuple(_H_BUILTINS)
F_NAMES = tuple(_F_BUILTINS)


def builtin_model(h_name: str, f_name: str = "quadratic", R: float = 1.0) -> ModelFunctions:
    """Construct one of the built-in (h, f) pairs.

    h_name is one of "const", "gauss" (exp(-u^2)) or "mullins" (1/(1+u^2));
    the only built-in flux is "quadratic" (u^2/2).
    """
    if h_name not in _H_BUILTINS:
        raise UnsupportedModelError(
            f"unknown diffusion {h_name!r}; supported: {', '.join(H_NAMES)}"
        )
    if f_name not in _F_BUILTINS:
        raise UnsupportedModelError(
            f"unknown flux {f_name!r}; supported: {', '.join(F_NAMES)}"
        )
    h, dh, d2h0 = _H_BUILTINS[h_name]
    f, df, d2f0, d2f = _F_BUILTINS[f_name]
    return ModelFunctions(
        h=h, dh=dh, d2h0=d2h0, f=f, df=df, d2f0=d2f0, R=R,
        name_h=h_name, name_f=f_name, d2f=d2f,
    )


def custom_model(
    h: Callable[[float], float],
    f: Callable[[float], float],
    R: float = 1.0,
    name_h: str = "custom",
    name_f: str = "custom",
    dh: Callable[[float], float] | None = None,
    df: Callable[[float], float] | None = None,
) -> ModelFunctions:
    """Wrap user-supplied h and f; missing derivatives are central differences."""
    dh = dh if dh is not None else _finite_diff(h)
    df = df if df is not None else _finite_diff(f)
    step = 1e-4
    d2h0 = (h(step) - 2.0 * h(0.0) + h(-step)) / step ** 2
    d2f0 = (f(step) - 2.0 * f(0.0) + f(-step)) / step ** 2
    return ModelFunctions(h=h, dh=dh, d2h0=float(d2h0), f=f, df=df,
                          d2f0=float(d2f0), R=R, name_h=name_h, name_f=name_f)


@dataclass(frozen=True)
class ProblemSpec:
    """Viscosity, domain length, model and grid resolution for one problem."""

    epsilon: float
    ell: float
    model: ModelFunctions
    n_cells: int = 400

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.ell <= 0:
            raise ValueError("ell must be positive")
        if self.n_cells < 16:
            raise ValueError("n_cells must be at least 16")

    @property
    def dx(self) -> float:
        return self.ell / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.ell, self.n_cells + 1)

    def with_(self, **kwargs) -> "ProblemSpec":
        params = dict(epsilon=self.epsilon, ell=self.ell, model=self.model,
                      n_cells=self.n_cells)
        params.update(kwargs)
        return ProblemSpec(**params)


@dataclass
class GridFunction:
    """A function sampled at the uniform nodes x_i = i*ell/n, i = 0..n."""

    ell: float
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 4:
            raise ValueError("need at least 2 interior nodes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def dx(self) -> float:
        return self.ell / self.n

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.ell, self.values.size)

    def __call__(self, xq) -> np.ndarray:
        return np.interp(xq, self.x, self.values)

    def central_derivative(self) -> np.ndarray:
        """Centered first difference, one-sided at the endpoints."""
        return np.gradient(self.values, self.dx)


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    worst_u: float
    worst_value: float


@dataclass(frozen=True)
class AssumptionReport:
    checks: tuple[ConditionCheck, ...]
    K: float
    h_min: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> ConditionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _worst(u: np.ndarray, violation: np.ndarray) -> tuple[float, float]:
    k = int(np.argmax(violation))
    return float(u[k]), float(violation[k])


def validate_assumptions(model: ModelFunctions, samples: int = 256) -> AssumptionReport:
    """Check the structural conditions on h and f on a sampled grid of [-R, R].

    Conditions checked: positivity of h, the sign condition h'(u)*u <= 0,
    f(0) = f'(0) = 0 with f'' > 0 and odd f', the derived sign f'(u)*u > 0,
    and the linear bound f'(u) <= K*u on (0, 0.9*R] with K fitted as the
    maximum sampled ratio f'(u)/u.
    """
    if samples < 8:
        raise ValueError("need at least 8 samples")
    u = np.linspace(-model.R, model.R, samples)
    tol = 1e-10

    hv = np.asarray(model.h(u), dtype=float)
    dhv = np.asarray(model.dh(u), dtype=float)
    dfv = np.asarray(model.df(u), dtype=float)
    for name, vals in (("h", hv), ("h'", dhv), ("f'", dfv)):
        if not np.all(np.isfinite(vals)):
            bad = u[~np.isfinite(vals)][0]
            raise EvaluationError(f"{name} is non-finite at u = {bad:.6g}")

    checks = []

    # h(u) >= h0 > 0 and h'(u)*u <= 0
    wu, wv = _worst(u, -hv)
    checks.append(ConditionCheck("h_positive", bool(np.min(hv) > tol), wu, -wv))
    sign_h = dhv * u
    wu, wv = _worst(u, sign_h)
    checks.append(ConditionCheck("h_sign", bool(np.max(sign_h) <= tol), wu, wv))

    # f(0) = f'(0) = 0
    f0 = float(model.f(0.0))
    df0 = float(model.df(0.0))
    checks.append(ConditionCheck("f_origin",
                                 abs(f0) <= tol and abs(df0) <= tol, 0.0,
                                 max(abs(f0), abs(df0))))

    # f'' > 0 via finite differences of df
    step = 1e-6 * np.maximum(1.0, np.abs(u))
    d2fv = (model.df(u + step) - model.df(u - step)) / (2.0 * step)
    wu, wv = _worst(u, -d2fv)
    checks.append(ConditionCheck("f_convex", bool(np.min(d2fv) > tol), wu, -wv))

    # f'(-u) = -f'(u)
    odd = np.abs(np.asarray(model.df(-u)) + dfv)
    wu, wv = _worst(u, odd)
    checks.append(ConditionCheck("f_odd_derivative", bool(np.max(odd) <= 1e-8), wu, wv))

    # f'(u)*u > 0 away from the origin
    mask = np.abs(u) > 1e-3 * model.R
    sign_f = dfv[mask] * u[mask]
    wu, wv = _worst(u[mask], -sign_f)
    checks.append(ConditionCheck("f_sign", bool(np.min(sign_f) > 0.0), wu, -wv))

    # fitted K of the linear bound on (0, A], A = 0.9*R
    A = 0.9 * model.R
    up = np.linspace(A / samples, A, samples)
    K = float(np.max(np.asarray(model.df(up)) / up))

    return AssumptionReport(checks=tuple(checks), K=K, h_min=float(np.min(hv)))


def alpha_bar(epsilon: float, model: ModelFunctions) -> float:
    """Critical shooting slope 2 / (1 + sqrt(1 - 4*eps*h''(0)/f''(0))).

    Initial slopes at or above this value give monotone trajectories that
    never return to zero; below it the trajectory comes back after a finite
    length.  Equals 1 for constant diffusion and tends to 1 as eps -> 0.
    """
    disc = 1.0 - 4.0 * epsilon * model.d2h0 / model.d2f0
    if disc < 0.0:
        raise NoSolutionError(
            f"epsilon = {epsilon:g} too large for this model: "
            f"discriminant {disc:g} < 0"
        )
    return 2.0 / (1.0 + math.sqrt(disc))


def existence_threshold(model: ModelFunctions, ell: float,
                        samples: int = 256) -> float:
    """Value of eps above which only the trivial steady state exists.

    Returns gamma * ell^2 / pi^2 with gamma = K/m, K the fitted linear-bound
    constant and m the sampled minimum of h on [-R, R].  The minimum over the
    full validity interval is a conservative surrogate for the minimum along
    the (unknown) solution.
    """
    report = validate_assumptions(model, samples)
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        raise UnsupportedModelError(f"model violates assumptions: {failed}")
    return report.K / report.h_min * ell ** 2 / math.pi ** 2


def apply_L(u: GridFunction, spec: ProblemSpec) -> GridFunction:
    """Residual of the stationary operator L at the interior nodes.

    L u = -eps*(h(u)u_x)_x + f'(u)u_x - f'(u), discretized with the
    conservative second-order stencil h_{i+1/2} = h((u_i + u_{i+1})/2) for the
    diffusion and a centered first difference for u_x.  Endpoint entries of
    the returned grid function are zero.
    """
    v = u.values
    if v.size != spec.n_cells + 1:
        raise ValueError("grid function does not live on the problem's grid")
    m = spec.model
    dx = spec.dx
    mid = 0.5 * (v[:-1] + v[1:])
    hm = np.asarray(m.h(mid), dtype=float)
    diff = (hm[1:] * (v[2:] - v[1:-1]) - hm[:-1] * (v[1:-1] - v[:-2])) / dx ** 2
    ux = (v[2:] - v[:-2]) / (2.0 * dx)
    dfv = np.asarray(m.df(v[1:-1]), dtype=float)
    res = np.zeros_like(v)
    res[1:-1] = -spec.epsilon * diff + dfv * ux - dfv
    return GridFunction(ell=u.ell, values=res)
