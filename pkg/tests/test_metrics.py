"""
Evaluation Metric Tests
"""

import numpy as np
import pytest

from app.errors import (
    LengthMismatch,
    OutOfRange,
    ZeroActual,
    ZeroCostSpan,
    ZeroCurrent,
    ZeroDenominator,
    ZeroDerivative,
)
from app.models.observation import ClickCostCurve
from app.models.recommendation import Recommendation, Strategy
from app.services.curvefit import h_prime
from app.services.landscape import ecpm_cost_at
from app.services.metrics import (
    diff_r,
    empirical_derivative,
    lift_ratios,
    mape,
    naive_inflection,
    rmse,
    theorem1,
)
from app.services.simgen import ground_truth_curve


def curve(pairs, ctr=0.001):
    return ClickCostCurve(pairs=pairs, ctr=ctr)


def operating_point(bid, clicks, click_yield=1.0, strategy=Strategy.NO_OPT):
    return Recommendation(
        campaign_id="camp-a", strategy=strategy, ecpm_cost_star=0.8 * bid,
        bid_star_ecpm=bid, bid_star_cpc=bid, predicted_clicks=clicks,
        predicted_spend=1.0, budget=10.0, click_yield=click_yield,
    )


class TestPredictionErrors:
    """Tests for MAPE and RMSE."""

    def test_mape_example(self):
        """|100-110|/100 and |200-180|/200 average to 0.1."""
        assert mape([100, 200], [110, 180]) == pytest.approx(0.1)

    def test_rmse_example(self):
        """Errors 10 and -20 give sqrt(250)."""
        assert rmse([100, 200], [110, 180]) == pytest.approx(np.sqrt(250.0))

    def test_perfect_prediction(self):
        """Identical series score zero."""
        assert mape([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
        assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_zero_actual(self):
        """A zero actual value is reported by index."""
        with pytest.raises(ZeroActual) as exc:
            mape([5.0, 0.0, 2.0], [5.0, 1.0, 2.0])
        assert exc.value.index == 1

    def test_rmse_accepts_zero_actuals(self):
        """RMSE has no division, so zero actuals are fine."""
        assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(np.sqrt(12.5))

    def test_length_mismatch(self):
        """Series must pair up."""
        with pytest.raises(LengthMismatch):
            mape([1.0, 2.0], [1.0])
        with pytest.raises(LengthMismatch):
            rmse([], [])


class TestNaiveInflection:
    """Tests for the steepest observed rise."""

    def test_steepest_pair(self):
        """Slopes 1, 3, 1 put the naive peak at cost 1."""
        assert naive_inflection(curve([(0, 0), (1, 1), (2, 4), (3, 5)])) == 1.0

    def test_ties_take_lower_cost(self):
        """Equal slopes resolve to the lower cost."""
        assert naive_inflection(curve([(0, 0), (1, 2), (2, 4), (3, 5)])) == 0.0

    def test_shared_cost(self):
        """Two points at one cost have no slope."""
        with pytest.raises(ZeroCostSpan):
            naive_inflection(curve([(0, 0), (1, 1), (1, 2)]))


class TestDiffR:
    """Tests for the derivative gain ratio."""

    def test_example(self):
        """Slopes 1.0 and 0.8 give (1.0 - 0.8) / 1.0 = 0.2."""
        c = curve([(0, 0), (1, 1), (2, 1.8)])
        assert diff_r(c, 0.0, 1.0) == pytest.approx(0.2)

    def test_bracketing_pair(self):
        """Costs between grid points use the pair around them; the last point uses the final pair."""
        c = curve([(0, 0), (1, 1), (2, 1.8)])
        assert empirical_derivative(c, 0.5) == pytest.approx(1.0)
        assert empirical_derivative(c, 1.5) == pytest.approx(0.8)
        assert empirical_derivative(c, 2.0) == pytest.approx(0.8)

    def test_outside_range(self):
        """Costs beyond the curve have no empirical slope."""
        with pytest.raises(OutOfRange):
            empirical_derivative(curve([(0, 0), (1, 1), (2, 1.8)]), 2.5)

    def test_zero_naive_derivative(self):
        """A flat naive point cannot be a denominator."""
        with pytest.raises(ZeroDerivative):
            diff_r(curve([(0, 1), (1, 1), (2, 1)]), 0.0, 1.0)

    def test_naive_is_never_beaten(self):
        """The naive point has the steepest raw slope, so DiffR >= 0 anywhere on the curve."""
        c = curve([(0, 0), (1, 1), (2, 4), (3, 5), (4, 5.5)])
        naive = naive_inflection(c)
        for cost in (0.0, 0.5, 1.7, 2.2, 3.9):
            assert diff_r(c, naive, cost) >= 0.0

    def test_noiseless_sigmoid(self, sigmoid_params):
        """On 200 dense noiseless points the fitted and naive peaks agree closely."""
        c = ground_truth_curve(sigmoid_params, n=200, x_max=4.0)
        naive = naive_inflection(c)
        assert abs(diff_r(c, naive, 2.0)) < 1e-3


class TestTheorem1:
    """Tests for the landscape elasticities."""

    def test_unit_elasticity(self, make_landscape):
        """Clicks and cost both linear in bid: alpha = 1 and beta = 0.5."""
        landscape = make_landscape([(1.0, 0.1, 0.5), (2.0, 0.2, 1.0), (3.0, 0.3, 1.5), (4.0, 0.4, 2.0)])
        q = theorem1(landscape, 2.5)
        assert q.alpha == pytest.approx(1.0, rel=1e-6)
        assert q.beta == pytest.approx(0.5, rel=1e-6)
        assert q.gamma == pytest.approx(1000.0 * 0.1 / 0.5, rel=1e-6)

    def test_alpha_beta_identity(self, make_landscape):
        """alpha = beta / (1 - beta) on the stencil."""
        landscape = make_landscape([(1.0, 0.1, 0.4), (2.0, 0.35, 0.9), (3.0, 0.5, 1.7), (4.0, 0.55, 2.9)])
        q = theorem1(landscape, 2.4)
        assert q.alpha == pytest.approx(q.beta / (1.0 - q.beta), rel=1e-9)

    def test_random_landscapes_respect_bound(self, make_landscape):
        """On 100 random monotone landscapes, gamma >= its lower bound and beta is in (0, 1)."""
        rng = np.random.default_rng(99)
        for _ in range(100):
            bids = np.round(np.sort(rng.choice(np.arange(50, 1000), size=6, replace=False)) / 100, 2)
            win_rates = np.sort(rng.uniform(0.01, 1.0, size=6))
            costs = np.minimum(np.sort(rng.uniform(0.1, 1.0, size=6)) * bids, bids)
            costs = np.maximum.accumulate(costs)
            landscape = make_landscape(list(zip(bids, win_rates, costs)), impressions=int(rng.integers(1000, 10**6)))
            bid = float(rng.uniform(bids[0] + 0.01, bids[-1] - 0.01))
            try:
                q = theorem1(landscape, bid)
            except ZeroDenominator:
                continue
            assert q.gamma >= q.lower_bound_gamma - 1e-9 * abs(q.lower_bound_gamma)
            assert 0.0 < q.beta < 1.0

    def test_model_gamma(self, sigmoid_market, sigmoid_fit, sigmoid_params):
        """With a fit, model_gamma is the sigmoid's slope at the bid's cost."""
        bid = 2.5
        q = theorem1(sigmoid_market, bid, fit_result=sigmoid_fit)
        expected = float(h_prime(sigmoid_params, ecpm_cost_at(sigmoid_market, bid)))
        assert q.model_gamma == pytest.approx(expected)
        assert theorem1(sigmoid_market, bid).model_gamma is None

    def test_flat_cost(self, make_landscape):
        """A flat cost curve around the bid has no elasticity."""
        landscape = make_landscape([(1.0, 0.1, 1.0), (2.0, 0.2, 1.0), (3.0, 0.3, 1.0), (4.0, 0.4, 1.0)])
        with pytest.raises(ZeroDenominator):
            theorem1(landscape, 2.5)

    def test_zero_clicks(self, make_landscape):
        """Zero win rate at the bid means zero clicks."""
        landscape = make_landscape([(1.0, 0.0, 0.0), (2.0, 0.0, 0.0), (3.0, 0.3, 1.0), (4.0, 0.4, 2.0)])
        with pytest.raises(ZeroDenominator):
            theorem1(landscape, 1.5)

    def test_stencil_below_zero(self, make_landscape):
        """The stencil must stay on positive bids."""
        landscape = make_landscape([(1.0, 0.1, 0.5), (2.0, 0.2, 1.0)])
        with pytest.raises(OutOfRange):
            theorem1(landscape, 0.0005)


class TestLiftRatios:
    """Tests for BIR and CIR."""

    def test_bid_increase(self):
        """2.00 -> 2.60 is a 30% bid increase."""
        lift = lift_ratios(operating_point(2.0, 100.0), operating_point(2.6, 100.0, strategy=Strategy.INFLECTION))
        assert lift.bir == pytest.approx(0.30)
        assert lift.cir == pytest.approx(0.0)

    def test_click_increase(self):
        """450,000 -> 600,000 clicks is a one-third click increase."""
        lift = lift_ratios(operating_point(2.0, 450_000.0), operating_point(2.0, 600_000.0))
        assert lift.cir == pytest.approx(1 / 3)

    def test_click_yields_carried(self):
        """CYR at both points comes from the recommendations."""
        lift = lift_ratios(operating_point(2.0, 10.0, click_yield=3.0), operating_point(3.0, 20.0, click_yield=5.0))
        assert (lift.cyr_current, lift.cyr_proposed) == (3.0, 5.0)

    def test_click_yield_lift(self):
        """A yield of 4 against a current 5 is a 20% drop; a zero current yield has no lift."""
        lift = lift_ratios(operating_point(2.0, 10.0, click_yield=5.0), operating_point(3.0, 20.0, click_yield=4.0))
        assert lift.cyr_lift == pytest.approx(-0.2)
        flat = lift_ratios(operating_point(2.0, 10.0, click_yield=0.0), operating_point(3.0, 20.0, click_yield=4.0))
        assert flat.cyr_lift is None

    def test_zero_current(self):
        """Zero current bid or clicks cannot be a base."""
        with pytest.raises(ZeroCurrent):
            lift_ratios(operating_point(0.0, 10.0), operating_point(1.0, 10.0))
        with pytest.raises(ZeroCurrent):
            lift_ratios(operating_point(1.0, 0.0), operating_point(1.0, 10.0))
