"""
Pytest Configuration and Fixtures
"""

import os

import numpy as np
import pytest

from app.models.fit import FitResult, ModelKind, SigmoidParams
from app.models.observation import AuctionObservation, BidLandscape, LandscapePoint
from app.services.simgen import sigmoid_landscape


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep BIDCURVE_* variables from the shell out of the tests."""
    for key in list(os.environ):
        if key.upper().startswith("BIDCURVE_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def sigmoid_params():
    """s=1000, t=2, p=4: inflection at cost 2.0, slope 500 there."""
    return SigmoidParams(s=1000.0, t=2.0, p=4.0)


@pytest.fixture
def sigmoid_fit(sigmoid_params):
    """An exact, converged sigmoid fit for `sigmoid_params`."""
    return FitResult(
        kind=ModelKind.SIGMOID,
        params=sigmoid_params.as_dict(),
        sse=0.0,
        iterations=1,
        converged=True,
        n_points=25,
    )


@pytest.fixture
def sigmoid_market(sigmoid_params):
    """Landscape whose click-vs-cost curve lies on `sigmoid_params` (ctr 0.001)."""
    return sigmoid_landscape(sigmoid_params, ctr=0.001)


@pytest.fixture
def fig2_observations():
    """Four buckets; the $5.00 bucket wins 81% of auctions at $1.50 eCPM cost."""
    rows = [
        (2.00, 20, 0.80),
        (3.00, 45, 1.00),
        (5.00, 81, 1.50),
        (6.00, 90, 1.80),
    ]
    return [
        AuctionObservation(
            campaign_id="camp-fig2", bid=bid, auctions=100, wins=wins,
            clicks=0, ecpm_cost=cost, ctr=0.001,
        )
        for bid, wins, cost in rows
    ]


@pytest.fixture
def make_landscape():
    """Build a landscape straight from (bid, win_rate, ecpm_cost) triples."""
    def build(points, impressions=1_000_000, ctr=0.001, campaign_id="camp-direct"):
        return BidLandscape(
            campaign_id=campaign_id,
            points=[LandscapePoint(bid=b, win_rate=w, ecpm_cost=c) for b, w, c in points],
            impressions=impressions,
            ctr=ctr,
        )
    return build


@pytest.fixture
def draw_params():
    """Seeded sigmoid parameter draws: log-uniform s, uniform t and p."""
    def draw(seed, s=(10.0, 1e6), t=(0.1, 10.0), p=(0.5, 20.0)):
        rng = np.random.default_rng(seed)
        return SigmoidParams(
            s=float(np.exp(rng.uniform(np.log(s[0]), np.log(s[1])))),
            t=float(rng.uniform(*t)),
            p=float(rng.uniform(*p)),
        )
    return draw
