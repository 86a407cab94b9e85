"""
Model Comparison Harness

Leave-one-out evaluation of the click models on a campaign's click-vs-cost
curve, plus the per-strategy operating-point table:

1. hold out a point (the current bid's, or every interior one)
2. fit each model kind on the rest and predict the held-out clicks
3. score clicks and the implied spend with MAPE / RMSE
4. fit the sigmoid on every point and run strategies 0-4 against it
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.errors import NotConverged, OutOfRange, TooFewPoints, ZeroCurrent, ZeroDerivative
from app.models.evaluation import CampaignComparison, EvalReport, StrategyRow
from app.models.fit import FitConfig, ModelKind
from app.models.observation import BidLandscape, ClickCostCurve
from app.models.recommendation import BudgetConstraint, Strategy
from app.services.curvefit import fit, predict
from app.services.landscape import click_cost_pairs, ecpm_cost_at
from app.services.metrics import diff_r, lift_ratios, mape, naive_inflection, rmse
from app.services.recommend import inflection_cost, model_spend, recommend

logger = logging.getLogger(__name__)

MIN_POINTS = 5


# ============================================
# LEAVE-ONE-OUT
# ============================================

def holdout_indices(curve: ClickCostCurve, mode: str = "current", current_cost: Optional[float] = None) -> List[int]:
    """
    Indices of the points to hold out.

    Only interior points qualify, so linear interpolation never has to
    extrapolate. In "current" mode the interior point nearest the current
    cost is used (ties to the lower cost); "all" returns every interior point.
    """
    n = len(curve)
    if n < 3:
        raise TooFewPoints(f"leave-one-out needs an interior point, got {n} points")
    interior = list(range(1, n - 1))
    if mode == "all":
        return interior
    if mode != "current":
        raise ValueError(f"unknown holdout mode: {mode}")
    if current_cost is None:
        return [interior[len(interior) // 2]]
    costs = np.asarray(curve.costs)[interior]
    return [interior[int(np.argmin(np.abs(costs - current_cost)))]]


def leave_one_out(
    curve: ClickCostCurve,
    kind: ModelKind,
    indices: Iterable[int],
    config: Optional[FitConfig] = None,
) -> Tuple[List[float], List[float]]:
    """Held-out (actual, predicted) clicks for one model kind."""
    actual, predicted = [], []
    for i in indices:
        cost, clicks = curve.pairs[i]
        result = fit(kind, curve.without(i), config)
        actual.append(clicks)
        predicted.append(max(predict(result, cost), 0.0))
    return actual, predicted


def compare_curve(
    curve: ClickCostCurve,
    models: Sequence[ModelKind],
    holdout: str = "current",
    current_cost: Optional[float] = None,
    config: Optional[FitConfig] = None,
    campaign_id: str = "",
    min_points: int = MIN_POINTS,
) -> Tuple[List[EvalReport], List[EvalReport]]:
    """
    Click and spend error reports, one per model kind.

    Spend at a held-out point is clicks x cost / (1000 x CTR) for both the
    actual and the predicted clicks.
    """
    if len(curve) < min_points:
        raise TooFewPoints(f"[{campaign_id}] compare needs {min_points} points, got {len(curve)}")
    indices = holdout_indices(curve, holdout, current_cost)
    costs = np.asarray([curve.costs[i] for i in indices])
    per_mille = costs / (1000.0 * curve.ctr)

    click_reports, spend_reports = [], []
    for kind in models:
        kind = ModelKind(kind)
        actual, predicted = leave_one_out(curve, kind, indices, config)
        click_reports.append(EvalReport(
            campaign_id=campaign_id, model=kind.value,
            mape=mape(actual, predicted), rmse=rmse(actual, predicted), n=len(indices),
        ))
        spend_actual = np.asarray(actual) * per_mille
        spend_predicted = np.asarray(predicted) * per_mille
        spend_reports.append(EvalReport(
            campaign_id=campaign_id, model=kind.value,
            mape=mape(spend_actual, spend_predicted), rmse=rmse(spend_actual, spend_predicted),
            n=len(indices),
        ))
    return click_reports, spend_reports


# ============================================
# STRATEGIES
# ============================================

def strategy_table(
    landscape: BidLandscape,
    curve: ClickCostCurve,
    config: Optional[FitConfig] = None,
    step: float = 0.001,
    rtol: float = 1e-3,
) -> Tuple[List[StrategyRow], float]:
    """
    Operating points of strategies 0-4 under a budget that covers spend at
    the highest observed cost, with lift over strategy 0.

    Returns the rows and the sigmoid inflection cost.

    Raises:
        NotConverged: the sigmoid fit on the full curve did not converge
    """
    result = fit(ModelKind.SIGMOID, curve, config)
    params = result.sigmoid()
    top_cost = max(landscape.costs[-1], step)
    budget = BudgetConstraint(budget=max(model_spend(params, landscape.ctr)(top_cost), 1e-9))

    recs = {
        strategy: recommend(result, landscape, budget, strategy, step=step, rtol=rtol)
        for strategy in Strategy
    }
    current = recs[Strategy.NO_OPT]
    rows = []
    for strategy, rec in recs.items():
        bir = cir = cyr_lift = None
        try:
            lift = lift_ratios(current, rec)
            bir, cir, cyr_lift = lift.bir, lift.cir, lift.cyr_lift
        except ZeroCurrent as e:
            logger.debug(f"[{landscape.campaign_id}] no lift for {strategy.value}: {e}")
        rows.append(StrategyRow(
            campaign_id=landscape.campaign_id,
            strategy=strategy.value,
            ecpm_cost_star=rec.ecpm_cost_star,
            bid_star_ecpm=rec.bid_star_ecpm,
            predicted_clicks=rec.predicted_clicks,
            predicted_spend=rec.predicted_spend,
            cyr=rec.click_yield,
            cyr_lift=cyr_lift,
            bir=bir,
            cir=cir,
        ))
    return rows, inflection_cost(params)


def compare_campaign(
    landscape: BidLandscape,
    models: Sequence[ModelKind],
    holdout: str = "current",
    config: Optional[FitConfig] = None,
    min_points: int = MIN_POINTS,
    step: float = 0.001,
    rtol: float = 1e-3,
) -> CampaignComparison:
    """
    Full comparison of one campaign: model errors, strategy rows and DiffR.

    A sigmoid that does not converge on the full curve keeps the model
    error rows and marks the strategy table as skipped.
    """
    cid = landscape.campaign_id
    curve = click_cost_pairs(landscape)
    current_cost = ecpm_cost_at(landscape, landscape.current_bid)
    clicks, spend = compare_curve(
        curve, models, holdout, current_cost, config, campaign_id=cid, min_points=min_points,
    )
    naive_cost = naive_inflection(curve)

    rows: List[StrategyRow] = []
    cf_cost = gain = None
    try:
        rows, peak = strategy_table(landscape, curve, config, step=step, rtol=rtol)
    except NotConverged as e:
        logger.warning(f"[{cid}] ⚠️ strategy table skipped: {e}")
    else:
        # the fitted peak can sit outside the observed costs
        cf_cost = float(np.clip(peak, curve.costs[0], curve.costs[-1]))
        try:
            gain = diff_r(curve, naive_cost, cf_cost)
        except (ZeroDerivative, OutOfRange) as e:
            logger.warning(f"[{cid}] DiffR skipped: {e}")

    logger.info(f"[{cid}] compared {len(clicks)} models over {clicks[0].n if clicks else 0} held-out points")
    return CampaignComparison(
        campaign_id=cid,
        clicks=clicks,
        spend=spend,
        strategies=rows,
        strategies_skipped=not rows,
        naive_cost=naive_cost,
        cf_cost=cf_cost,
        diff_r=gain,
    )


# ============================================
# AGGREGATION
# ============================================

LIFT_COLUMNS = ["cyr_lift", "bir", "cir"]
SPENDER_GROUPS = ("large", "medium", "small")


def reports_frame(reports: Iterable[EvalReport]) -> pd.DataFrame:
    """Per-campaign error rows in `campaign_id,model,mape,rmse,n` order."""
    frame = pd.DataFrame([r.model_dump() for r in reports], columns=["campaign_id", "model", "mape", "rmse", "n"])
    return frame.sort_values(["campaign_id", "model"], kind="stable").reset_index(drop=True)


def summarize_models(reports: Iterable[EvalReport]) -> pd.DataFrame:
    """Mean MAPE / RMSE per model kind across campaigns."""
    frame = reports_frame(reports)
    summary = frame.groupby("model", sort=True).agg(
        mape=("mape", "mean"), rmse=("rmse", "mean"), campaigns=("campaign_id", "nunique"),
    )
    return summary.reset_index()


def _rows_frame(rows: Iterable[StrategyRow]) -> pd.DataFrame:
    frame = pd.DataFrame([r.model_dump() for r in rows])
    if not frame.empty:
        frame[["cyr"] + LIFT_COLUMNS] = frame[["cyr"] + LIFT_COLUMNS].astype(float)
    return frame


def summarize_strategies(rows: Iterable[StrategyRow]) -> pd.DataFrame:
    """
    Mean lift per strategy, in strategy order 0-4.

    cyr_lift, bir and cir are relative changes over no-opt; cyr is the mean
    absolute click yield.
    """
    frame = _rows_frame(rows)
    if frame.empty:
        return pd.DataFrame(columns=["strategy", "cyr", *LIFT_COLUMNS])
    summary = frame.groupby("strategy").agg(
        cyr=("cyr", "mean"), cyr_lift=("cyr_lift", "mean"), bir=("bir", "mean"), cir=("cir", "mean"),
    )
    order = [s.value for s in Strategy if s.value in summary.index]
    return summary.loc[order].reset_index()


def summarize_spenders(rows: Iterable[StrategyRow], strategy: Strategy = Strategy.INFLECTION) -> pd.DataFrame:
    """
    Mean lift of one strategy per spender group.

    Campaigns are ranked by their no-opt spend and split into large, medium
    and small thirds; with fewer than three campaigns the smaller groups
    are left out.
    """
    columns = ["group", "campaigns", "current_spend", *LIFT_COLUMNS]
    frame = _rows_frame(rows)
    if frame.empty:
        return pd.DataFrame(columns=columns)

    current = frame[frame["strategy"] == Strategy.NO_OPT.value].set_index("campaign_id")["predicted_spend"]
    ranked = current.sort_values(ascending=False, kind="stable").index.to_numpy()
    group_of = {
        cid: label
        for label, ids in zip(SPENDER_GROUPS, np.array_split(ranked, len(SPENDER_GROUPS)))
        for cid in ids
    }

    chosen = frame[frame["strategy"] == Strategy(strategy).value].set_index("campaign_id")
    chosen = chosen.join(current.rename("current_spend"), how="inner")
    if chosen.empty:
        return pd.DataFrame(columns=columns)
    chosen["group"] = chosen.index.map(group_of)
    summary = chosen.groupby("group").agg(
        campaigns=("strategy", "size"),
        current_spend=("current_spend", "mean"),
        cyr_lift=("cyr_lift", "mean"),
        bir=("bir", "mean"),
        cir=("cir", "mean"),
    )
    order = [g for g in SPENDER_GROUPS if g in summary.index]
    return summary.loc[order].reset_index()
