"""
Synthetic Campaign Generator

Seeded single-slot second-price market: our bid wins an auction iff it beats
the highest of the sampled competitor bids, and then pays that bid. Also
samples click curves and observation logs straight from a known sigmoid so
fits and recommendations can be checked against ground truth.
"""

import logging
from typing import List, Optional

import numpy as np

from app.errors import InvalidConfig, InvalidParams
from app.models.fit import SigmoidParams
from app.models.market import MarketConfig
from app.models.observation import AuctionObservation, BidLandscape, ClickCostCurve
from app.services.curvefit import h
from app.services.landscape import build_landscape

logger = logging.getLogger(__name__)

COST_DECIMALS = 6
BID_DECIMALS = 2


# ============================================
# AUCTION MARKET
# ============================================

def bid_levels(config: MarketConfig) -> np.ndarray:
    """Evenly spaced bid levels on [bid_min, bid_max], rounded to cents."""
    bids = np.round(np.linspace(config.bid_min, config.bid_max, config.n_bid_levels), BID_DECIMALS)
    if np.any(bids <= 0):
        raise InvalidConfig(f"bid levels round to zero; raise bid_min above {config.bid_min}")
    return bids


def generate_campaign(
    config: MarketConfig,
    rng: Optional[np.random.Generator] = None,
) -> List[AuctionObservation]:
    """
    Simulate one campaign's auction log, one observation per bid level.

    The random stream is created from `config.seed` unless one is passed in,
    so identical configs give identical logs.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    competitors = config.competitor_bid_distribution
    rows = []

    for bid in bid_levels(config):
        rivals = rng.lognormal(
            mean=competitors.log_mean,
            sigma=competitors.log_sd,
            size=(config.auctions_per_level, config.competitors_per_auction),
        )
        top = rivals.max(axis=1)
        won = bid > top
        wins = int(won.sum())

        cost = 0.0
        if wins:
            cost = round(min(float(top[won].mean()), float(bid)), COST_DECIMALS)

        clicks = int(rng.binomial(wins, config.true_ctr))
        if config.noise_sd > 0 and clicks:
            clicks = int(round(clicks * rng.lognormal(0.0, config.noise_sd)))
        clicks = min(clicks, wins)

        rows.append(AuctionObservation(
            campaign_id=config.campaign_id,
            bid=float(bid),
            auctions=config.auctions_per_level,
            wins=wins,
            clicks=clicks,
            ecpm_cost=cost,
            ctr=config.true_ctr,
        ))

    logger.debug(f"[{config.campaign_id}] simulated {len(rows)} bid levels")
    return rows


def simulate_campaigns(config: MarketConfig, n_campaigns: int) -> List[AuctionObservation]:
    """
    Simulate `n_campaigns` campaigns in one market.

    Each campaign draws from its own stream spawned from `config.seed` and is
    named `<campaign_id>-<index>`.
    """
    if n_campaigns < 1:
        raise InvalidConfig(f"n_campaigns must be >= 1, got {n_campaigns}")
    streams = np.random.SeedSequence(config.seed).spawn(n_campaigns)
    rows: List[AuctionObservation] = []
    for i, stream in enumerate(streams):
        campaign = config.model_copy(update={"campaign_id": f"{config.campaign_id}-{i:03d}"})
        rows.extend(generate_campaign(campaign, rng=np.random.default_rng(stream)))
    logger.info(f"🎲 Simulated {n_campaigns} campaigns (seed={config.seed})")
    return rows


# ============================================
# SIGMOID GROUND TRUTH
# ============================================

def _cost_grid(n: int, x_max: float) -> np.ndarray:
    if n < 4:
        raise InvalidParams(f"need at least 4 points, got {n}")
    if not x_max > 0:
        raise InvalidParams(f"x_max must be > 0, got {x_max}")
    return x_max * np.arange(1, n + 1) / n


def _noise(rng: np.random.Generator, noise_sd: float, size: int) -> np.ndarray:
    if noise_sd < 0:
        raise InvalidParams(f"noise_sd must be >= 0, got {noise_sd}")
    if noise_sd == 0:
        return np.ones(size)
    return rng.lognormal(0.0, noise_sd, size)


def ground_truth_curve(
    params: SigmoidParams,
    n: int,
    x_max: float,
    noise_sd: float = 0.0,
    seed: int = 0,
    ctr: float = 0.001,
) -> ClickCostCurve:
    """n evenly spaced costs on (0, x_max] with clicks h(x) x lognormal noise."""
    costs = _cost_grid(n, x_max)
    rng = np.random.default_rng(seed)
    clicks = np.asarray(h(params, costs)) * _noise(rng, noise_sd, n)
    return ClickCostCurve(pairs=list(zip(costs.tolist(), clicks.tolist())), ctr=ctr)


def default_cost_span(params: SigmoidParams) -> float:
    """Cost range that shows both bends of the curve: twice x*, or 5/t for p <= 0."""
    if params.p > 0:
        return 2.0 * params.p / params.t
    return 5.0 / params.t


def sigmoid_observations(
    params: SigmoidParams,
    ctr: float = 0.001,
    n: int = 25,
    x_max: Optional[float] = None,
    cost_ratio: float = 0.8,
    noise_sd: float = 0.0,
    seed: int = 0,
    campaign_id: str = "sig-000",
) -> List[AuctionObservation]:
    """
    Observation log whose landscape click curve follows `params`.

    Bucket j bids b_j and pays cost_ratio x b_j, so costs run evenly up to
    x_max. Wins are set so that wins x ctr = h(cost), with optional
    multiplicative noise; every bucket sees the same number of auctions.
    """
    if not 0 < cost_ratio <= 1:
        raise InvalidParams(f"cost_ratio must be in (0, 1], got {cost_ratio}")
    if not 0 < ctr <= 1:
        raise InvalidParams(f"ctr must be in (0, 1], got {ctr}")
    costs = _cost_grid(n, x_max if x_max is not None else default_cost_span(params))

    bids = np.round(costs / cost_ratio, BID_DECIMALS)
    if np.any(bids <= 0) or np.any(np.diff(bids) <= 0):
        raise InvalidParams("cost grid too fine to give distinct cent bids")
    costs = bids * cost_ratio

    rng = np.random.default_rng(seed)
    expected = np.asarray(h(params, costs)) * _noise(rng, noise_sd, n)
    wins = np.rint(expected / ctr).astype(int)
    auctions = int(wins.max()) + 1
    clicks = np.minimum(np.rint(wins * ctr).astype(int), wins)

    return [
        AuctionObservation(
            campaign_id=campaign_id,
            bid=float(b),
            auctions=auctions,
            wins=int(w),
            clicks=int(c),
            ecpm_cost=round(float(x), COST_DECIMALS),
            ctr=ctr,
        )
        for b, x, w, c in zip(bids, costs, wins, clicks)
    ]


def sigmoid_landscape(params: SigmoidParams, **kwargs) -> BidLandscape:
    """Landscape built from `sigmoid_observations`."""
    return build_landscape(sigmoid_observations(params, **kwargs))
