"""
Click Curve Fitting Service

Fits the constrained logistic growth model

    h(x) = s/(1+exp(-t*x+p)) - q,    q = s/(1+exp(p))  (so h(0) = 0)

and three saturating baselines to a click-vs-eCPM-cost curve by damped
Gauss-Newton least squares:

    power              y = a * x^b,         0 < b <= 1
    Michaelis-Menten   y = a*x / (1 + b*x), b > 0
    negative exp       y = a * (1 - e^(-b*x)), b > 0

Nearest-neighbour and linear-interpolation predictors are kept alongside
for comparison; fitting them just stores the curve.

Fitting runs on data scaled to max cost = max clicks = 1 so that the
damping term acts evenly on all parameters; results are mapped back to
the original units.
"""

import logging
import math
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import expit

from app.errors import (
    DegenerateData,
    EmptyLandscape,
    InvalidParams,
    NonFiniteFit,
    OutOfRange,
    TooFewPoints,
)
from app.models.fit import FitConfig, FitResult, ModelKind, SigmoidParams
from app.models.observation import ClickCostCurve

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
ParamsLike = Union[SigmoidParams, Mapping[str, float]]

# Parameter bounds in original units
S_BOUNDS = (1e-6, 1e12)
T_BOUNDS = (1e-6, 1e6)
P_BOUNDS = (-50.0, 50.0)
POSITIVE_FLOOR = 1e-12

LAMBDA_MIN = 1e-15
LAMBDA_MAX = 1e16
LAMBDA_SHRINK = 0.5
LAMBDA_GROW = 10.0
# scaled SSE per point below which a fit is an exact match
ZERO_SSE_PER_POINT = 1e-24


# ============================================
# MODEL FAMILIES
# ============================================

class _Family:
    """Value, slope and Jacobian of one parametric family over a theta vector."""

    kind: ModelKind
    names: Tuple[str, ...]

    def value(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def initial_guess(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounds(self, x_scale: float, y_scale: float) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def unscale(self, theta: np.ndarray, x_scale: float, y_scale: float) -> np.ndarray:
        raise NotImplementedError

    def validate(self, theta: np.ndarray) -> None:
        if not np.all(np.isfinite(theta)):
            raise InvalidParams(f"{self.kind.value} parameters must be finite: {theta}")

    def to_params(self, theta: np.ndarray) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.names, theta)}

    def from_params(self, params: ParamsLike) -> np.ndarray:
        if isinstance(params, SigmoidParams):
            params = params.as_dict()
        try:
            theta = np.array([float(params[name]) for name in self.names])
        except KeyError as e:
            raise InvalidParams(f"{self.kind.value} parameters missing {e}") from e
        self.validate(theta)
        return theta


class _Sigmoid(_Family):
    kind = ModelKind.SIGMOID
    names = ("s", "t", "p")

    def value(self, theta, x):
        s, t, p = theta
        return s * (expit(t * x - p) - expit(-p))

    def derivative(self, theta, x):
        s, t, p = theta
        z = t * x - p
        return s * t * expit(z) * expit(-z)

    def second_derivative(self, theta, x):
        s, t, p = theta
        z = t * x - p
        return s * t * t * expit(z) * expit(-z) * (expit(-z) - expit(z))

    def jacobian(self, theta, x):
        s, t, p = theta
        z = t * x - p
        bell = expit(z) * expit(-z)
        bell0 = expit(p) * expit(-p)
        d_s = expit(z) - expit(-p)
        d_t = s * x * bell
        d_p = s * (bell0 - bell)
        return np.column_stack([d_s, d_t, d_p])

    def initial_guess(self, x, y):
        y_max = float(np.max(y))
        s0 = 1.05 * y_max
        x_mid = _cost_at_level(x, y, 0.5 * y_max)
        x10 = _cost_at_level(x, y, 0.1 * y_max)
        x90 = _cost_at_level(x, y, 0.9 * y_max)
        t0 = max(4.0 / (x90 - x10), 1e-3) if x90 > x10 else 4.0 / max(float(np.max(x)), 1e-12)
        p0 = t0 * x_mid
        return np.array([s0, t0, p0])

    def bounds(self, x_scale, y_scale):
        lo = np.array([S_BOUNDS[0] / y_scale, T_BOUNDS[0] * x_scale, P_BOUNDS[0]])
        hi = np.array([S_BOUNDS[1] / y_scale, T_BOUNDS[1] * x_scale, P_BOUNDS[1]])
        return lo, hi

    def unscale(self, theta, x_scale, y_scale):
        s, t, p = theta
        return np.array([s * y_scale, t / x_scale, p])

    def validate(self, theta):
        super().validate(theta)
        if theta[0] <= 0 or theta[1] <= 0:
            raise InvalidParams(f"sigmoid needs s > 0 and t > 0, got s={theta[0]}, t={theta[1]}")

    def to_params(self, theta):
        params = super().to_params(theta)
        params["q"] = SigmoidParams(s=params["s"], t=params["t"], p=params["p"]).q
        return params


class _Power(_Family):
    kind = ModelKind.POWER
    names = ("alpha", "beta")

    def value(self, theta, x):
        a, b = theta
        return a * np.power(x, b)

    def derivative(self, theta, x):
        a, b = theta
        with np.errstate(divide="ignore"):
            return a * b * np.power(x, b - 1.0)

    def jacobian(self, theta, x):
        a, b = theta
        xb = np.power(x, b)
        log_x = np.log(x, out=np.zeros_like(x), where=x > 0)
        return np.column_stack([xb, a * xb * log_x])

    def initial_guess(self, x, y):
        mask = (x > 0) & (y > 0)
        if np.count_nonzero(mask) >= 2 and np.ptp(x[mask]) > 0:
            b, log_a = np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)
        else:
            b, log_a = 0.5, math.log(float(np.max(y)))
        return np.array([math.exp(log_a), min(max(b, 1e-3), 1.0)])

    def bounds(self, x_scale, y_scale):
        return np.array([POSITIVE_FLOOR, 1e-6]), np.array([np.inf, 1.0])

    def unscale(self, theta, x_scale, y_scale):
        a, b = theta
        return np.array([a * y_scale / x_scale ** b, b])

    def validate(self, theta):
        super().validate(theta)
        if theta[0] <= 0 or not 0 < theta[1] <= 1:
            raise InvalidParams(f"power needs alpha > 0 and 0 < beta <= 1, got {theta}")


class _MichaelisMenten(_Family):
    kind = ModelKind.MICHAELIS_MENTEN
    names = ("alpha", "beta")

    def value(self, theta, x):
        a, b = theta
        return a * x / (1.0 + b * x)

    def derivative(self, theta, x):
        a, b = theta
        return a / (1.0 + b * x) ** 2

    def jacobian(self, theta, x):
        a, b = theta
        denom = 1.0 + b * x
        return np.column_stack([x / denom, -a * x * x / denom ** 2])

    def initial_guess(self, x, y):
        y_max = float(np.max(y))
        half = max(_cost_at_level(x, y, 0.5 * y_max), 1e-6)
        b0 = 1.0 / half
        return np.array([1.2 * y_max * b0, b0])

    def bounds(self, x_scale, y_scale):
        return np.array([POSITIVE_FLOOR, 1e-9]), np.array([np.inf, np.inf])

    def unscale(self, theta, x_scale, y_scale):
        a, b = theta
        return np.array([a * y_scale / x_scale, b / x_scale])

    def validate(self, theta):
        super().validate(theta)
        if theta[0] <= 0 or theta[1] <= 0:
            raise InvalidParams(f"Michaelis-Menten needs alpha > 0 and beta > 0, got {theta}")


class _NegExp(_Family):
    kind = ModelKind.NEG_EXP
    names = ("alpha", "beta")

    def value(self, theta, x):
        a, b = theta
        return -a * np.expm1(-b * x)

    def derivative(self, theta, x):
        a, b = theta
        return a * b * np.exp(-b * x)

    def jacobian(self, theta, x):
        a, b = theta
        return np.column_stack([-np.expm1(-b * x), a * x * np.exp(-b * x)])

    def initial_guess(self, x, y):
        y_max = float(np.max(y))
        half = max(_cost_at_level(x, y, 0.5 * y_max), 1e-6)
        return np.array([1.2 * y_max, math.log(2.0) / half])

    def bounds(self, x_scale, y_scale):
        return np.array([POSITIVE_FLOOR, 1e-9]), np.array([np.inf, np.inf])

    def unscale(self, theta, x_scale, y_scale):
        a, b = theta
        return np.array([a * y_scale, b / x_scale])

    def validate(self, theta):
        super().validate(theta)
        if theta[0] <= 0 or theta[1] <= 0:
            raise InvalidParams(f"negative exponential needs alpha > 0 and beta > 0, got {theta}")


FAMILIES: Dict[ModelKind, _Family] = {
    family.kind: family
    for family in (_Sigmoid(), _Power(), _MichaelisMenten(), _NegExp())
}


def _family(kind: ModelKind) -> _Family:
    try:
        return FAMILIES[ModelKind(kind)]
    except KeyError:
        raise InvalidParams(f"{ModelKind(kind).value} has no parametric form") from None


def _as_x(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise OutOfRange("eCPM cost must be >= 0")
    return arr


def _scalar_or_array(values: np.ndarray, x: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(x) == 0 else values


def _cost_at_level(x: np.ndarray, y: np.ndarray, level: float) -> float:
    """Cost where the running max of clicks first reaches `level`, linearly interpolated."""
    running = np.maximum.accumulate(y)
    idx = int(np.argmax(running >= level))
    if idx == 0:
        return float(x[0] * level / running[0]) if running[0] > 0 else float(x[0])
    x0, x1 = x[idx - 1], x[idx]
    y0, y1 = running[idx - 1], running[idx]
    if y1 == y0:
        return float(x1)
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))


# ============================================
# EVALUATION
# ============================================

def eval_model(kind: ModelKind, params: ParamsLike, x: ArrayLike) -> ArrayLike:
    """
    Model value at eCPM cost `x` (scalar or array).

    Raises:
        InvalidParams: parameters violate the kind's invariants
    """
    family = _family(kind)
    theta = family.from_params(params)
    xs = _as_x(x)
    return _scalar_or_array(family.value(theta, xs), x)


def eval_derivative(kind: ModelKind, params: ParamsLike, x: ArrayLike) -> ArrayLike:
    """Analytic dClick/deCPM_cost; non-negative for every family."""
    family = _family(kind)
    theta = family.from_params(params)
    xs = _as_x(x)
    return _scalar_or_array(family.derivative(theta, xs), x)


def eval_second_derivative(params: ParamsLike, x: ArrayLike) -> ArrayLike:
    """Second derivative of the sigmoid; positive left of p/t, negative right of it."""
    family = FAMILIES[ModelKind.SIGMOID]
    theta = family.from_params(params)
    xs = _as_x(x)
    return _scalar_or_array(family.second_derivative(theta, xs), x)


def jacobian(kind: ModelKind, params: ParamsLike, xs) -> np.ndarray:
    """
    Partial derivatives of the model at each x with respect to its free parameters.

    For the sigmoid the free parameters are (s, t, p); q is substituted as
    s/(1+exp(p)), so the x = 0 row is identically zero.
    """
    family = _family(kind)
    theta = family.from_params(params)
    x = _as_x(xs)
    if x.ndim != 1 or x.size == 0:
        raise TooFewPoints("jacobian needs a non-empty 1-D list of costs")
    return family.jacobian(theta, x)


def h(params: SigmoidParams, x: ArrayLike) -> ArrayLike:
    """Shorthand for the sigmoid value."""
    return eval_model(ModelKind.SIGMOID, params, x)


def h_prime(params: SigmoidParams, x: ArrayLike) -> ArrayLike:
    """Shorthand for the sigmoid slope."""
    return eval_derivative(ModelKind.SIGMOID, params, x)


# ============================================
# NON-PARAMETRIC PREDICTORS
# ============================================

def predict_baseline(kind: ModelKind, curve: ClickCostCurve, x: float) -> float:
    """
    Nearest-neighbour or linear-interpolation click prediction at cost `x`.

    Nearest neighbour breaks distance ties toward the lower cost; linear
    interpolation refuses to extrapolate beyond the observed costs.
    """
    if not curve.pairs:
        raise EmptyLandscape("click curve has no points")
    costs = np.asarray(curve.costs, dtype=float)
    clicks = np.asarray(curve.clicks, dtype=float)
    kind = ModelKind(kind)

    if kind is ModelKind.NEAREST_NEIGHBOR:
        # argmin keeps the first (lowest-cost) of equally distant points
        return float(clicks[int(np.argmin(np.abs(costs - x)))])

    if kind is ModelKind.LINEAR_INTERP:
        if x < costs[0] or x > costs[-1]:
            raise OutOfRange(f"cost {x} outside observed range [{costs[0]}, {costs[-1]}]")
        return float(np.interp(x, costs, clicks))

    raise InvalidParams(f"{kind.value} is not a non-parametric predictor")


def predict(fit_result: FitResult, x: float) -> float:
    """Click prediction of any fitted kind at cost `x`."""
    if fit_result.kind.parametric:
        return float(eval_model(fit_result.kind, fit_result.params, x))
    if fit_result.support is None:
        raise EmptyLandscape(f"{fit_result.kind.value} fit carries no data")
    return predict_baseline(fit_result.kind, fit_result.support, x)


# ============================================
# FITTING
# ============================================

def fit(kind: ModelKind, curve: ClickCostCurve, config: Optional[FitConfig] = None) -> FitResult:
    """
    Fit a click model to a click-vs-cost curve.

    Each iteration solves (J^T J + lambda*I) dtheta = J^T dy. Damping halves
    after an accepted step and grows tenfold after an uphill one, which is
    rejected. Iteration stops once |S_new - S|/|S| <= xi, or after
    max_iterations. The best parameters seen are returned.

    Raises:
        TooFewPoints: fewer than K+1 points for K free parameters
        DegenerateData: all costs equal, or all clicks equal
        NonFiniteFit: the model overflowed; `.result` holds the last finite iterate
    """
    config = config or FitConfig()
    kind = ModelKind(kind)
    n = len(curve.pairs)
    if n < kind.n_free + 1:
        raise TooFewPoints(f"{kind.value} needs at least {kind.n_free + 1} points, got {n}")

    if not kind.parametric:
        return FitResult(kind=kind, sse=0.0, iterations=0, converged=True, n_points=n, support=curve)

    x = np.asarray(curve.costs, dtype=float)
    y = np.asarray(curve.clicks, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DegenerateData("costs and clicks must be non-negative")
    if np.ptp(x) == 0:
        raise DegenerateData(f"all {n} costs are identical")
    if np.ptp(y) == 0:
        raise DegenerateData(f"all {n} click values are identical")

    family = FAMILIES[kind]
    x_scale = float(np.max(x))
    y_scale = float(np.max(y))
    xn = x / x_scale
    yn = y / y_scale
    lo, hi = family.bounds(x_scale, y_scale)
    theta = np.clip(family.initial_guess(xn, yn), lo, hi)

    theta, sse, iterations, converged = _damped_gauss_newton(
        family.value, family.jacobian, xn, yn, theta, lo, hi, config,
        on_overflow=lambda th, s, it: _result(kind, family, th, s, it, False, n, x_scale, y_scale),
    )
    result = _result(kind, family, theta, sse, iterations, converged, n, x_scale, y_scale)
    logger.debug(f"{kind.value} fit: sse={result.sse:.6g}, iterations={iterations}, "
                 f"converged={converged}")
    return result


def _result(kind, family, theta, sse_scaled, iterations, converged, n, x_scale, y_scale) -> FitResult:
    params = family.to_params(family.unscale(theta, x_scale, y_scale))
    return FitResult(
        kind=kind,
        params=params,
        sse=float(sse_scaled) * y_scale ** 2,
        iterations=iterations,
        converged=converged,
        n_points=n,
    )


def _damped_gauss_newton(
    model: Callable[[np.ndarray, np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    y: np.ndarray,
    theta: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    config: FitConfig,
    on_overflow: Callable,
) -> Tuple[np.ndarray, float, int, bool]:
    """Core iteration; returns (theta, sse, iterations, converged)."""
    residual = y - model(theta, x)
    sse = float(residual @ residual)
    if not math.isfinite(sse):
        raise NonFiniteFit("initial guess overflows", result=None)

    lam = config.damping0
    identity = np.eye(theta.size)
    sse_floor = ZERO_SSE_PER_POINT * x.size

    for iteration in range(1, config.max_iterations + 1):
        if sse <= sse_floor:
            return theta, sse, iteration - 1, True

        J = jac(theta, x)
        if not np.all(np.isfinite(J)):
            raise NonFiniteFit(
                f"jacobian overflowed at iteration {iteration}",
                result=on_overflow(theta, sse, iteration - 1),
            )
        normal = J.T @ J
        gradient = J.T @ residual

        accepted = False
        while lam <= LAMBDA_MAX:
            try:
                step = cho_solve(cho_factor(normal + lam * identity), gradient)
            except (LinAlgError, ValueError):
                lam *= LAMBDA_GROW
                continue
            candidate = np.clip(theta + step, lo, hi)
            cand_residual = y - model(candidate, x)
            cand_sse = float(cand_residual @ cand_residual)
            if math.isfinite(cand_sse) and cand_sse <= sse:
                accepted = True
                break
            lam *= LAMBDA_GROW

        if not accepted:
            # no descent direction left at any damping: S no longer changes
            return theta, sse, iteration, True

        change = abs(sse - cand_sse) / sse
        step_damping = lam
        theta, residual, sse = candidate, cand_residual, cand_sse
        lam = max(lam * LAMBDA_SHRINK, LAMBDA_MIN)
        # only steps taken at or below the initial damping may end the iteration
        if change <= config.xi and step_damping <= config.damping0:
            return theta, sse, iteration, True

    return theta, sse, config.max_iterations, False
