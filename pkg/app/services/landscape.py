"""
Bid Landscape Service

Builds per-campaign win-rate and eCPM-cost curves from auction logs and
derives the click and spend curves:

    Click(bid) = Impression x Winrate(bid) x CTR
    Spend(bid) = Click(bid) x eCPM_cost(bid) / (1000 x CTR)
"""

import logging
import math
from typing import List, Sequence

import numpy as np
import pandas as pd
from sklearn.isotonic import isotonic_regression

from app.errors import (
    EmptyLandscape,
    InconsistentCampaign,
    OutOfRange,
    TooFewObservations,
    ZeroCtr,
)
from app.models.observation import (
    AuctionObservation,
    BidLandscape,
    ClickCostCurve,
    LandscapePoint,
)

logger = logging.getLogger(__name__)

MIN_BUCKETS = 4
BID_DECIMALS = 2


def build_landscape(observations: Sequence[AuctionObservation]) -> BidLandscape:
    """
    Build a monotone bid landscape for one campaign.

    Bids are bucketed to the cent. Per bucket, win rate is total wins over
    total auctions and eCPM cost is the win-weighted mean of observed costs.
    Both curves are then repaired with pool-adjacent-violators so they are
    non-decreasing in bid.

    Raises:
        InconsistentCampaign: mixed campaign ids or CTR values
        TooFewObservations: fewer than 4 distinct bid buckets
    """
    if not observations:
        raise TooFewObservations("no observations")

    campaign_id = observations[0].campaign_id
    ctr = observations[0].ctr
    for obs in observations:
        if obs.campaign_id != campaign_id:
            raise InconsistentCampaign(
                f"mixed campaign ids: {campaign_id!r} and {obs.campaign_id!r}"
            )
        if not math.isclose(obs.ctr, ctr, rel_tol=1e-12, abs_tol=0.0):
            raise InconsistentCampaign(f"[{campaign_id}] mixed ctr values: {ctr} and {obs.ctr}")

    frame = pd.DataFrame([obs.model_dump() for obs in observations])
    frame["bucket"] = frame["bid"].round(BID_DECIMALS)
    frame["paid"] = frame["wins"] * frame["ecpm_cost"]
    buckets = (
        frame.groupby("bucket", sort=True)[["auctions", "wins", "clicks", "paid"]]
        .sum()
        .reset_index()
    )

    if len(buckets) < MIN_BUCKETS:
        raise TooFewObservations(
            f"[{campaign_id}] {len(buckets)} distinct bids, need at least {MIN_BUCKETS}"
        )

    bids = buckets["bucket"].to_numpy(dtype=float)
    auctions = buckets["auctions"].to_numpy(dtype=float)
    wins = buckets["wins"].to_numpy(dtype=float)
    win_rate = wins / auctions
    cost = np.divide(
        buckets["paid"].to_numpy(dtype=float),
        wins,
        out=np.zeros_like(wins),
        where=wins > 0,
    )

    win_rate = np.clip(isotonic_regression(win_rate, increasing=True), 0.0, 1.0)
    cost = np.clip(isotonic_regression(cost, increasing=True), 0.0, None)
    # pooled means never exceed the bucket's own bid; guard against rounding
    cost = np.minimum(cost, bids)

    points = [
        LandscapePoint(bid=float(b), win_rate=float(w), ecpm_cost=float(c))
        for b, w, c in zip(bids, win_rate, cost)
    ]
    landscape = BidLandscape(
        campaign_id=campaign_id,
        points=points,
        impressions=int(auctions.max()),
        ctr=ctr,
        observed_clicks=[int(c) for c in buckets["clicks"]],
        auctions=[int(a) for a in auctions],
    )
    logger.debug(f"[{campaign_id}] landscape with {len(points)} points, "
                 f"impressions={landscape.impressions}")
    return landscape


def _require_points(landscape: BidLandscape) -> None:
    if not landscape.points:
        raise EmptyLandscape(f"[{landscape.campaign_id}] landscape has no points")


def win_rate_at(landscape: BidLandscape, bid: float) -> float:
    """Piecewise-linear win rate, clamped to the end values outside the grid."""
    _require_points(landscape)
    if bid <= 0:
        raise OutOfRange(f"bid must be > 0, got {bid}")
    return float(np.interp(bid, landscape.bids, landscape.win_rates))


def ecpm_cost_at(landscape: BidLandscape, bid: float) -> float:
    """Piecewise-linear eCPM cost, clamped like `win_rate_at`."""
    _require_points(landscape)
    if bid <= 0:
        raise OutOfRange(f"bid must be > 0, got {bid}")
    return float(np.interp(bid, landscape.bids, landscape.costs))


def clicks_at(landscape: BidLandscape, bid: float) -> float:
    """Expected clicks at a bid: impressions x winrate(bid) x ctr."""
    return landscape.impressions * win_rate_at(landscape, bid) * landscape.ctr


def spend_at(landscape: BidLandscape, bid: float) -> float:
    """Expected spend at a bid: clicks x eCPM_cost / (1000 x ctr)."""
    if landscape.ctr <= 0:
        raise ZeroCtr(f"[{landscape.campaign_id}] ctr is zero")
    return clicks_at(landscape, bid) * ecpm_cost_at(landscape, bid) / (1000.0 * landscape.ctr)


def click_cost_pairs(landscape: BidLandscape) -> ClickCostCurve:
    """
    Materialize the (eCPM cost, clicks) observations at the landscape grid.

    Equal costs collapse to the pair with the most clicks.
    """
    _require_points(landscape)
    best = {}
    for pt in landscape.points:
        clicks = landscape.impressions * pt.win_rate * landscape.ctr
        if clicks > best.get(pt.ecpm_cost, -1.0):
            best[pt.ecpm_cost] = clicks
    pairs = sorted(best.items())
    return ClickCostCurve(pairs=pairs, ctr=landscape.ctr, impressions=landscape.impressions)


def observed_click_pairs(landscape: BidLandscape) -> List[tuple]:
    """Raw (eCPM cost, observed clicks) per bucket, for plotting."""
    _require_points(landscape)
    clicks = landscape.observed_clicks or [0] * len(landscape.points)
    return [(pt.ecpm_cost, float(c)) for pt, c in zip(landscape.points, clicks)]
