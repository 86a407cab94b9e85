"""
Bid Recommendation Service

Turns a fitted click-vs-cost sigmoid into a recommended operating point:

1. locate the inflection point x* = p/t, where dClick/deCPM_cost peaks
2. cap the cost so predicted spend stays within budget (lattice binary search)
3. map the cost back to a bid on the landscape, and to a CPC bid

Strategies: no-opt (0), mc (1), mc90 (2), ip (3), ip90 (4).
"""

import logging
import math
from typing import Callable, Tuple

from scipy.optimize import brentq

from app.errors import EmptyLandscape, InvalidParams, NotConverged, OutOfRange, ZeroCtr
from app.models.fit import FitResult, ModelKind, SigmoidParams
from app.models.observation import BidLandscape
from app.models.recommendation import (
    BidMapping,
    BudgetConstraint,
    Recommendation,
    Strategy,
)
from app.services.curvefit import h, h_prime
from app.services.landscape import ecpm_cost_at

logger = logging.getLogger(__name__)

COST_STEP = 0.001
BUDGET_RTOL = 1e-3
DERIVATIVE_FRACTION = 0.9
CLICK_FRACTION = 0.9
ROOT_XTOL = 1e-12

SpendCurve = Callable[[float], float]


def inflection_cost(params: SigmoidParams) -> float:
    """
    Cost where the sigmoid's slope peaks.

    h''(x) = 0 where exp(-t*x+p) = 1, i.e. x* = p/t. With p <= 0 the peak
    lies at or left of the origin and 0 is returned.
    """
    if params.t <= 0:
        raise InvalidParams(f"t must be > 0, got {params.t}")
    return max(params.p / params.t, 0.0)


def binary_search_cost(
    spend_curve: SpendCurve,
    upper: float,
    budget: float,
    step: float = COST_STEP,
    rtol: float = BUDGET_RTOL,
) -> float:
    """
    Largest cost in [0, upper] whose spend stays within budget.

    Searches the `step` lattice with the min/max-cost loop: an overspent
    midpoint moves max_cost one step below it, an affordable one moves
    min_cost one step above. An affordable midpoint within `rtol` of the
    budget ends the search early when the next lattice point is already
    over budget. If even cost 0 overspends, 0 is returned.
    """
    if upper <= 0:
        raise OutOfRange(f"upper cost must be > 0, got {upper}")
    if budget <= 0:
        raise OutOfRange(f"budget must be > 0, got {budget}")
    if spend_curve(upper) <= budget:
        return upper

    def cost_of(k: int) -> float:
        return round(k * step, 12)

    top = int(math.floor(upper / step + 1e-9))
    min_k, max_k = 0, top
    best = 0
    while min_k <= max_k:
        mid = (min_k + max_k) // 2
        spend = spend_curve(cost_of(mid))
        if spend > budget:
            max_k = mid - 1
            continue
        best = max(best, mid)
        if budget - spend <= rtol * budget:
            if mid == top or spend_curve(cost_of(mid + 1)) > budget:
                return cost_of(mid)
        min_k = mid + 1
    return cost_of(best)


def cost_to_bid(landscape: BidLandscape, ecpm_cost: float) -> BidMapping:
    """
    Smallest bid whose (interpolated) eCPM cost reaches `ecpm_cost`.

    Queries above every observed cost clamp to the highest bid and are
    flagged as extrapolated.
    """
    if not landscape.points:
        raise EmptyLandscape(f"[{landscape.campaign_id}] landscape has no points")
    bids = landscape.bids
    costs = landscape.costs
    if ecpm_cost <= costs[0]:
        return BidMapping(bid=bids[0], extrapolated=False)
    if ecpm_cost > costs[-1]:
        return BidMapping(bid=bids[-1], extrapolated=True)

    i = next(k for k, c in enumerate(costs) if c >= ecpm_cost)
    b0, b1 = bids[i - 1], bids[i]
    c0, c1 = costs[i - 1], costs[i]
    return BidMapping(bid=b0 + (ecpm_cost - c0) * (b1 - b0) / (c1 - c0), extrapolated=False)


def cpc_from_ecpm(bid_ecpm: float, ctr: float) -> float:
    """CPC bid equivalent of an eCPM bid: bid / (1000 x CTR)."""
    if ctr <= 0:
        raise ZeroCtr("ctr must be > 0 to convert an eCPM bid to CPC")
    return bid_ecpm / (1000.0 * ctr)


def model_spend(params: SigmoidParams, ctr: float) -> SpendCurve:
    """Spend at cost x under the fitted curve: h(x) * x / (1000 x CTR)."""
    if ctr <= 0:
        raise ZeroCtr("ctr must be > 0")
    scale = 1.0 / (1000.0 * ctr)

    def spend(cost: float) -> float:
        return float(h(params, cost)) * cost * scale

    return spend


def derivative_fraction_cost(params: SigmoidParams, anchor: float, fraction: float = DERIVATIVE_FRACTION) -> float:
    """
    First cost beyond `anchor` where the slope has fallen to `fraction` of its
    value at the anchor. The slope is strictly decreasing right of x*, so the
    root is unique and bracketed by doubling.
    """
    target = fraction * float(h_prime(params, anchor))

    def gap(cost: float) -> float:
        return float(h_prime(params, cost)) - target

    width = 1.0 / params.t
    while gap(anchor + width) > 0:
        width *= 2.0
    return float(brentq(gap, anchor, anchor + width, xtol=ROOT_XTOL))


def _click_fraction_cost(params: SigmoidParams, upper: float, step: float) -> float:
    """Smallest lattice cost whose clicks reach CLICK_FRACTION of h(upper)."""
    if upper <= 0:
        return 0.0
    target = CLICK_FRACTION * float(h(params, upper))
    root = brentq(lambda c: float(h(params, c)) - target, 0.0, upper, xtol=ROOT_XTOL)
    return min(round(math.ceil(root / step - 1e-9) * step, 12), upper)


def recommend(
    fit_result: FitResult,
    landscape: BidLandscape,
    budget: BudgetConstraint,
    strategy: Strategy = Strategy.INFLECTION,
    step: float = COST_STEP,
    rtol: float = BUDGET_RTOL,
) -> Recommendation:
    """
    Recommend an operating point for one campaign.

    Raises:
        NotConverged: the sigmoid fit did not converge
        EmptyLandscape: the landscape has no points
    """
    if fit_result.kind is not ModelKind.SIGMOID:
        raise InvalidParams(f"recommendations need a sigmoid fit, got {fit_result.kind.value}")
    if not fit_result.converged:
        raise NotConverged(f"[{landscape.campaign_id}] sigmoid fit did not converge")
    if not landscape.points:
        raise EmptyLandscape(f"[{landscape.campaign_id}] landscape has no points")

    params = fit_result.sigmoid()
    ctr = landscape.ctr
    spend = model_spend(params, ctr)
    limit = budget.budget

    def capped(target: float) -> Tuple[float, bool]:
        if target <= 0 or spend(target) <= limit:
            return target, False
        return binary_search_cost(spend, target, limit, step=step, rtol=rtol), True

    strategy = Strategy(strategy)
    extrapolated = False

    if strategy is Strategy.NO_OPT:
        bid = landscape.current_bid
        cost = ecpm_cost_at(landscape, bid)
        binding = spend(cost) > limit * (1.0 + rtol)
    else:
        # every strategy searches the same observed cost range
        top_cost = max(landscape.costs[-1], 0.0)
        if strategy in (Strategy.INFLECTION, Strategy.INFLECTION_90):
            x_star = inflection_cost(params)
            if strategy is Strategy.INFLECTION and x_star > 0:
                target = x_star
            else:
                target = derivative_fraction_cost(params, x_star)
            cost, binding = capped(min(target, top_cost))
        else:
            cost, binding = capped(top_cost)
            if strategy is Strategy.MAX_CLICK_90:
                cost = _click_fraction_cost(params, cost, step)
        bid, extrapolated = cost_to_bid(landscape, cost)

    clicks = float(h(params, cost))
    rec = Recommendation(
        campaign_id=landscape.campaign_id,
        strategy=strategy,
        ecpm_cost_star=cost,
        bid_star_ecpm=bid,
        bid_star_cpc=cpc_from_ecpm(bid, ctr),
        predicted_clicks=max(clicks, 0.0),
        predicted_spend=max(spend(cost), 0.0),
        budget=limit,
        budget_binding=binding,
        extrapolated=extrapolated,
        click_yield=float(h_prime(params, cost)),
    )
    logger.info(f"[{landscape.campaign_id}] {strategy.value}: cost={cost:.3f}, bid={bid:.3f}, "
                f"clicks={clicks:.1f}, binding={binding}")
    return rec
