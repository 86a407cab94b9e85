"""
Evaluation Metrics Service

Prediction errors (MAPE, RMSE), the naive per-point gradient baseline and
its derivative gain ratio, landscape elasticities at a bid, and the lift
ratios of a proposed operating point over the current one.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from app.errors import (
    LengthMismatch,
    OutOfRange,
    TooFewPoints,
    ZeroActual,
    ZeroCostSpan,
    ZeroCurrent,
    ZeroDenominator,
    ZeroDerivative,
)
from app.models.evaluation import LiftRatios, Theorem1Quantities
from app.models.fit import FitResult
from app.models.observation import BidLandscape, ClickCostCurve
from app.models.recommendation import Recommendation
from app.services.curvefit import h_prime
from app.services.landscape import clicks_at, ecpm_cost_at, win_rate_at

logger = logging.getLogger(__name__)

STENCIL_DELTA = 0.001
SLOPE_TIE_RTOL = 1e-12


# ============================================
# PREDICTION ERRORS
# ============================================

def _paired(actual: Sequence[float], predicted: Sequence[float]):
    y = np.asarray(actual, dtype=float)
    y_hat = np.asarray(predicted, dtype=float)
    if y.ndim != 1 or y.shape != y_hat.shape:
        raise LengthMismatch(f"lengths differ: {y.size} actual vs {y_hat.size} predicted")
    if y.size == 0:
        raise LengthMismatch("no values to compare")
    return y, y_hat


def mape(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Mean absolute percentage error, as a ratio (0.1 = 10%)."""
    y, y_hat = _paired(actual, predicted)
    zeros = np.flatnonzero(y == 0)
    if zeros.size:
        raise ZeroActual(int(zeros[0]))
    return float(np.mean(np.abs(y - y_hat) / np.abs(y)))


def rmse(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Root mean squared error."""
    y, y_hat = _paired(actual, predicted)
    return float(np.sqrt(np.mean((y_hat - y) ** 2)))


# ============================================
# EMPIRICAL DERIVATIVES
# ============================================

def _forward_slopes(curve: ClickCostCurve) -> np.ndarray:
    costs = np.asarray(curve.costs, dtype=float)
    clicks = np.asarray(curve.clicks, dtype=float)
    spans = np.diff(costs)
    if np.any(spans == 0):
        i = int(np.flatnonzero(spans == 0)[0])
        raise ZeroCostSpan(f"points {i} and {i + 1} share cost {costs[i]}")
    return np.diff(clicks) / spans


def naive_inflection(curve: ClickCostCurve) -> float:
    """
    Cost of the steepest observed rise.

    Computes the forward difference for every adjacent pair and returns the
    left cost of the steepest pair; equal slopes go to the lower cost.
    """
    if len(curve) < 2:
        raise TooFewPoints(f"naive inflection needs 2 points, got {len(curve)}")
    slopes = _forward_slopes(curve)
    peak = slopes.max()
    best = int(np.argmax(slopes >= peak - SLOPE_TIE_RTOL * abs(peak)))
    return float(curve.costs[best])


def empirical_derivative(curve: ClickCostCurve, cost: float) -> float:
    """
    Raw-data slope at `cost`: the forward difference of the pair bracketing it.

    A cost on a grid point takes the pair starting there; the last point
    uses the final pair.
    """
    if len(curve) < 2:
        raise TooFewPoints(f"empirical derivative needs 2 points, got {len(curve)}")
    costs = curve.costs
    if cost < costs[0] or cost > costs[-1]:
        raise OutOfRange(f"cost {cost} outside curve range [{costs[0]}, {costs[-1]}]")
    slopes = _forward_slopes(curve)
    i = int(np.searchsorted(costs, cost, side="right")) - 1
    return float(slopes[min(i, len(slopes) - 1)])


def diff_r(curve: ClickCostCurve, naive_cost: float, cf_cost: float) -> float:
    """Relative derivative change (d_naive - d_cf)/d_naive on the raw curve."""
    d_naive = empirical_derivative(curve, naive_cost)
    if d_naive == 0:
        raise ZeroDerivative(f"empirical derivative at naive cost {naive_cost} is zero")
    d_cf = empirical_derivative(curve, cf_cost)
    return (d_naive - d_cf) / d_naive


# ============================================
# ELASTICITIES
# ============================================

def theorem1(
    landscape: BidLandscape,
    bid: float,
    delta: float = STENCIL_DELTA,
    fit_result: Optional[FitResult] = None,
) -> Theorem1Quantities:
    """
    Elasticities of clicks and spend at `bid`.

        alpha = (dClick/Click) / (dCost/Cost)
        beta  = (dClick/Click) / (dSpend/Spend)
        gamma = dClick / dCost

    Differences use a symmetric stencil of +-delta around the bid. dSpend
    follows the product rule on Spend = Click x Cost / (1000 x CTR), which
    makes alpha = beta/(1 - beta) an identity on the stencil. The gamma
    lower bound is alpha x M x winrate(bid) / bid_CPC with M = impressions/1000.

    When a sigmoid fit is supplied, `model_gamma` is its slope at the
    landscape cost of the bid.

    Raises:
        ZeroDenominator: Click, Spend, cost or the cost difference is zero
    """
    if delta <= 0 or bid - delta <= 0:
        raise OutOfRange(f"stencil [{bid - delta}, {bid + delta}] must stay above zero")

    click = clicks_at(landscape, bid)
    cost = ecpm_cost_at(landscape, bid)
    per_mille = 1.0 / (1000.0 * landscape.ctr)
    spend = click * cost * per_mille
    if click <= 0 or cost <= 0 or spend <= 0:
        raise ZeroDenominator(
            f"[{landscape.campaign_id}] click={click}, cost={cost}, spend={spend} at bid {bid}"
        )

    d_click = clicks_at(landscape, bid + delta) - clicks_at(landscape, bid - delta)
    d_cost = ecpm_cost_at(landscape, bid + delta) - ecpm_cost_at(landscape, bid - delta)
    if d_cost == 0:
        raise ZeroDenominator(f"[{landscape.campaign_id}] eCPM cost is flat around bid {bid}")
    d_spend = (d_cost * click + d_click * cost) * per_mille

    click_rate = d_click / click
    alpha = click_rate / (d_cost / cost)
    beta = click_rate / (d_spend / spend)
    gamma = d_click / d_cost

    bid_cpc = bid * per_mille
    m = landscape.impressions / 1000.0
    lower = alpha * m * win_rate_at(landscape, bid) / bid_cpc

    model_gamma = None
    if fit_result is not None:
        model_gamma = float(h_prime(fit_result.sigmoid(), cost))

    return Theorem1Quantities(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        lower_bound_gamma=lower,
        model_gamma=model_gamma,
    )


# ============================================
# LIFT
# ============================================

def lift_ratios(current: Recommendation, proposed: Recommendation) -> LiftRatios:
    """Bid, click and click-yield increase ratios, plus the click yield at both points."""
    if current.bid_star_ecpm <= 0:
        raise ZeroCurrent(f"[{current.campaign_id}] current bid is zero")
    if current.predicted_clicks <= 0:
        raise ZeroCurrent(f"[{current.campaign_id}] current clicks are zero")
    cyr_lift = None
    if current.click_yield > 0:
        cyr_lift = (proposed.click_yield - current.click_yield) / current.click_yield
    return LiftRatios(
        bir=(proposed.bid_star_ecpm - current.bid_star_ecpm) / current.bid_star_ecpm,
        cir=(proposed.predicted_clicks - current.predicted_clicks) / current.predicted_clicks,
        cyr_current=current.click_yield,
        cyr_proposed=proposed.click_yield,
        cyr_lift=cyr_lift,
    )
