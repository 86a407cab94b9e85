"""
Bid Landscape Tests
"""

import pytest
from pydantic import ValidationError

from app.errors import EmptyLandscape, InconsistentCampaign, OutOfRange, TooFewObservations
from app.models.market import MarketConfig
from app.models.observation import AuctionObservation, BidLandscape
from app.services.landscape import (
    build_landscape,
    click_cost_pairs,
    clicks_at,
    ecpm_cost_at,
    observed_click_pairs,
    spend_at,
    win_rate_at,
)
from app.services.simgen import generate_campaign


def obs(bid, wins, cost, auctions=100, clicks=0, campaign_id="camp-a", ctr=0.001):
    return AuctionObservation(
        campaign_id=campaign_id, bid=bid, auctions=auctions, wins=wins,
        clicks=clicks, ecpm_cost=cost, ctr=ctr,
    )


class TestAuctionObservation:
    """Tests for observation row validation."""

    def test_wins_above_auctions_rejected(self):
        """A bucket cannot win more auctions than it entered."""
        with pytest.raises(ValidationError):
            obs(1.0, 101, 0.5)

    def test_cost_above_bid_rejected(self):
        """Second price never exceeds our own bid."""
        with pytest.raises(ValidationError):
            obs(1.0, 50, 1.5)

    def test_clicks_above_wins_rejected(self):
        """Clicks need won impressions."""
        with pytest.raises(ValidationError):
            obs(1.0, 5, 0.5, clicks=6)


class TestBuildLandscape:
    """Tests for landscape construction."""

    def test_fig2_bucket(self, fig2_observations):
        """$5.00 bucket with 81 of 100 wins at $1.50 becomes (5.00, 0.81, 1.50)."""
        landscape = build_landscape(fig2_observations)
        point = landscape.points[2]
        assert point.bid == 5.00
        assert point.win_rate == pytest.approx(0.81)
        assert point.ecpm_cost == pytest.approx(1.50)

    def test_no_wins_anywhere(self):
        """Zero wins everywhere gives zero win rate and zero cost."""
        landscape = build_landscape([obs(b, 0, 0.0) for b in (1.0, 2.0, 3.0, 4.0)])
        assert landscape.win_rates == [0.0] * 4
        assert landscape.costs == [0.0] * 4

    def test_monotonicity_repair_pools(self):
        """Win rates 0.9 then 0.7 at the higher bid pool to 0.8 each."""
        rows = [obs(1.0, 20, 0.5), obs(2.0, 90, 1.0), obs(3.0, 70, 1.2), obs(4.0, 95, 1.5)]
        landscape = build_landscape(rows)
        assert landscape.win_rates[1] == pytest.approx(0.8)
        assert landscape.win_rates[2] == pytest.approx(0.8)

    def test_cost_is_win_weighted(self):
        """Rows sharing a cent bucket average cost by wins."""
        rows = [
            obs(1.001, 10, 0.5), obs(0.999, 30, 0.9),
            obs(2.0, 50, 1.0), obs(3.0, 60, 1.5), obs(4.0, 70, 2.0),
        ]
        landscape = build_landscape(rows)
        assert landscape.bids[0] == 1.0
        assert landscape.win_rates[0] == pytest.approx(40 / 200)
        assert landscape.costs[0] == pytest.approx((10 * 0.5 + 30 * 0.9) / 40)

    def test_too_few_buckets(self):
        """Three distinct bids are not enough."""
        with pytest.raises(TooFewObservations):
            build_landscape([obs(1.0, 10, 0.5), obs(2.0, 20, 1.0), obs(3.0, 30, 1.5), obs(3.001, 30, 1.5)])

    def test_mixed_campaigns(self):
        """Observations must share one campaign id."""
        rows = [obs(b, 10, 0.5) for b in (1.0, 2.0, 3.0)] + [obs(4.0, 10, 0.5, campaign_id="camp-b")]
        with pytest.raises(InconsistentCampaign):
            build_landscape(rows)

    def test_mixed_ctr(self):
        """Observations must share one CTR."""
        rows = [obs(b, 10, 0.5) for b in (1.0, 2.0, 3.0)] + [obs(4.0, 10, 0.5, ctr=0.002)]
        with pytest.raises(InconsistentCampaign):
            build_landscape(rows)

    def test_simulated_landscape_invariants(self):
        """Simulated logs give monotone curves with cost never above bid."""
        landscape = build_landscape(generate_campaign(MarketConfig(seed=11, auctions_per_level=500)))
        wr, costs = landscape.win_rates, landscape.costs
        assert all(a <= b for a, b in zip(wr, wr[1:]))
        assert all(a <= b for a, b in zip(costs, costs[1:]))
        assert all(c <= b for b, c in zip(landscape.bids, costs))

    def test_current_bid_is_max_volume(self):
        """The bucket with the most auctions is the current operating point."""
        rows = [obs(1.0, 10, 0.5), obs(2.0, 20, 1.0, auctions=300), obs(3.0, 30, 1.5), obs(4.0, 40, 2.0)]
        assert build_landscape(rows).current_bid == 2.0

    def test_export_shape(self, fig2_observations):
        """JSON export carries campaign_id, ctr, impressions and points."""
        export = build_landscape(fig2_observations).to_export()
        assert set(export) == {"campaign_id", "ctr", "impressions", "points"}
        assert set(export["points"][0]) == {"bid", "win_rate", "ecpm_cost"}


class TestClicksAndSpend:
    """Tests for the click and spend curves."""

    def test_fig2_clicks(self, make_landscape):
        """1,000,000 impressions x 0.81 x 0.001 = 810 clicks."""
        landscape = make_landscape([(4.0, 0.5, 1.0), (5.0, 0.81, 1.5), (6.0, 0.9, 2.0)])
        assert clicks_at(landscape, 5.0) == pytest.approx(810.0)

    def test_fig2_spend(self, make_landscape):
        """810 clicks at $1.50 eCPM cost and ctr 0.001 spend $1215."""
        landscape = make_landscape([(4.0, 0.5, 1.0), (5.0, 0.81, 1.5), (6.0, 0.9, 2.0)])
        assert spend_at(landscape, 5.0) == pytest.approx(1215.0)

    def test_interpolation(self, make_landscape):
        """Halfway between win rates 0.5 and 0.9 is 0.7."""
        landscape = make_landscape([(4.0, 0.5, 1.0), (6.0, 0.9, 2.0)])
        assert win_rate_at(landscape, 5.0) == pytest.approx(0.7)
        assert clicks_at(landscape, 5.0) == pytest.approx(1_000_000 * 0.7 * 0.001)

    def test_clamped_outside_grid(self, make_landscape):
        """Queries outside the grid take the end values."""
        landscape = make_landscape([(4.0, 0.5, 1.0), (6.0, 0.9, 2.0)])
        assert win_rate_at(landscape, 1.0) == 0.5
        assert ecpm_cost_at(landscape, 10.0) == 2.0

    def test_zero_win_rate(self, make_landscape):
        """Zero win rate means zero clicks and zero spend."""
        landscape = make_landscape([(1.0, 0.0, 0.0), (2.0, 0.0, 0.0)])
        assert clicks_at(landscape, 1.5) == 0.0
        assert spend_at(landscape, 1.5) == 0.0

    def test_spend_linear_in_cost(self, make_landscape):
        """Doubling eCPM cost at fixed clicks doubles spend."""
        base = make_landscape([(4.0, 0.5, 1.0), (6.0, 0.9, 2.0)])
        doubled = make_landscape([(4.0, 0.5, 2.0), (6.0, 0.9, 4.0)])
        assert spend_at(doubled, 5.0) == pytest.approx(2 * spend_at(base, 5.0))

    def test_exact_at_grid(self, make_landscape):
        """At a grid bid the click curve is the direct product."""
        landscape = make_landscape([(4.0, 0.37, 1.0), (6.0, 0.9, 2.0)], impressions=123_457, ctr=0.003)
        assert clicks_at(landscape, 4.0) == pytest.approx(123_457 * 0.37 * 0.003, rel=1e-15)

    def test_monotone_in_bid(self, fig2_observations):
        """Clicks and spend never fall as the bid rises."""
        landscape = build_landscape(fig2_observations)
        bids = [1.0 + 0.25 * i for i in range(25)]
        clicks = [clicks_at(landscape, b) for b in bids]
        spend = [spend_at(landscape, b) for b in bids]
        assert all(a <= b for a, b in zip(clicks, clicks[1:]))
        assert all(a <= b for a, b in zip(spend, spend[1:]))

    def test_empty_landscape(self):
        """Querying a landscape without points fails."""
        empty = BidLandscape(campaign_id="x", points=[], impressions=0, ctr=0.001)
        with pytest.raises(EmptyLandscape):
            clicks_at(empty, 1.0)

    def test_non_positive_bid(self, make_landscape):
        """Bids must be positive."""
        with pytest.raises(OutOfRange):
            win_rate_at(make_landscape([(4.0, 0.5, 1.0), (6.0, 0.9, 2.0)]), 0.0)


class TestClickCostPairs:
    """Tests for the click-vs-cost curve."""

    def test_one_pair_per_point(self, make_landscape):
        """Distinct costs give one sorted pair per landscape point."""
        curve = click_cost_pairs(make_landscape([(1.0, 0.1, 0.5), (2.0, 0.3, 1.0), (3.0, 0.6, 1.5)]))
        assert curve.costs == [0.5, 1.0, 1.5]
        assert curve.clicks == pytest.approx([100.0, 300.0, 600.0])

    def test_equal_costs_keep_max_clicks(self, make_landscape):
        """Cost 1.50 with 400 and 450 clicks collapses to (1.50, 450)."""
        curve = click_cost_pairs(make_landscape([(1.0, 0.1, 0.5), (4.0, 0.40, 1.5), (5.0, 0.45, 1.5)]))
        assert len(curve) == 2
        assert curve.pairs[1] == (1.5, pytest.approx(450.0))

    def test_monotone_clicks(self, fig2_observations):
        """Monotone landscapes give clicks non-decreasing in cost."""
        clicks = click_cost_pairs(build_landscape(fig2_observations)).clicks
        assert all(a <= b for a, b in zip(clicks, clicks[1:]))

    def test_observed_pairs_use_raw_clicks(self):
        """The observed column keeps the logged click totals."""
        rows = [obs(b, 50, 0.5 * b, clicks=c) for b, c in ((1.0, 3), (2.0, 5), (3.0, 8), (4.0, 9))]
        pairs = observed_click_pairs(build_landscape(rows))
        assert [c for _, c in pairs] == [3.0, 5.0, 8.0, 9.0]
