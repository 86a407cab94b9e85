"""
Command Handlers

One handler per subcommand. Each reads its inputs, processes campaigns
(optionally in parallel), writes outputs in campaign-id order and returns
the process exit status: 0 when every campaign succeeded, 1 otherwise.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple, TypeVar, Union

from pydantic import ValidationError

from app.config import Settings
from app.errors import BidCurveError, InvalidConfig, NonFiniteFit, TooFewObservations
from app.models.evaluation import CampaignComparison
from app.models.fit import FitResult, ModelKind
from app.models.manifest import CampaignError, Command, RunManifest
from app.models.observation import AuctionObservation, BidLandscape
from app.models.recommendation import BudgetConstraint, Recommendation
from app.services.curvefit import fit, h, h_prime
from app.services.harness import (
    compare_campaign,
    reports_frame,
    summarize_models,
    summarize_spenders,
    summarize_strategies,
)
from app.services.landscape import build_landscape, click_cost_pairs, observed_click_pairs
from app.services.recommend import recommend
from app.services.simgen import simulate_campaigns
from app.tools.io import (
    read_observations,
    safe_name,
    write_curve_tsv,
    write_frame,
    write_json,
    write_observations,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
Outcome = Union[T, CampaignError]


# ============================================
# CAMPAIGN FAN-OUT
# ============================================

def _guarded(fn: Callable[[str, List[AuctionObservation]], T]) -> Callable[[Tuple[str, list]], Outcome]:
    def run(item: Tuple[str, List[AuctionObservation]]) -> Outcome:
        campaign_id, observations = item
        try:
            return fn(campaign_id, observations)
        except (BidCurveError, ValidationError) as e:
            logger.warning(f"[{campaign_id}] ❌ {type(e).__name__}: {e}")
            return CampaignError(campaign_id=campaign_id, error=type(e).__name__, message=str(e))
    return run


def run_campaigns(
    campaigns: Dict[str, List[AuctionObservation]],
    fn: Callable[[str, List[AuctionObservation]], T],
    workers: int = 1,
) -> Tuple[List[T], List[CampaignError]]:
    """Apply `fn` to every campaign; results and errors keep campaign-id order."""
    items = sorted(campaigns.items())
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        outcomes = list(pool.map(_guarded(fn), items))
    results = [o for o in outcomes if not isinstance(o, CampaignError)]
    errors = [o for o in outcomes if isinstance(o, CampaignError)]
    return results, errors


def _load(manifest: RunManifest) -> Dict[str, List[AuctionObservation]]:
    campaigns = read_observations(manifest.input_path)
    if not campaigns:
        raise TooFewObservations(f"no campaigns in {manifest.input_path}")
    return campaigns


def _status(errors: Sequence[CampaignError], total: int) -> int:
    if errors:
        logger.error(f"⚠️ {len(errors)} of {total} campaigns failed")
        return 1
    logger.info(f"✅ {total} campaigns processed")
    return 0


def _dump_errors(errors: Sequence[CampaignError]) -> List[dict]:
    return [e.model_dump() for e in errors]


# ============================================
# FIT
# ============================================

def cmd_fit(manifest: RunManifest, settings: Settings) -> int:
    """Fit every requested model kind to every campaign's click-vs-cost curve."""
    campaigns = _load(manifest)
    out = Path(manifest.output_path)
    kinds = [ModelKind(k) for k in manifest.models]

    def fit_one(campaign_id: str, observations) -> Tuple[BidLandscape, List[FitResult]]:
        landscape = build_landscape(observations)
        curve = click_cost_pairs(landscape)
        results = []
        for kind in kinds:
            try:
                results.append(fit(kind, curve, settings.fit))
            except NonFiniteFit as e:
                if e.result is None:
                    raise
                logger.warning(f"[{campaign_id}] {kind.value} overflowed, keeping last finite iterate")
                results.append(e.result)
        return landscape, results

    done, errors = run_campaigns(campaigns, fit_one, settings.workers)

    fits = []
    for landscape, results in done:
        cid = landscape.campaign_id
        for result in results:
            payload = {"campaign_id": cid, **result.to_json_dict()}
            write_json(out / "fits" / safe_name(cid) / f"{result.kind.value}.json", payload)
            fits.append(payload)
            if not result.converged:
                logger.warning(f"[{cid}] {result.kind.value} fit did not converge")

    write_json(out / "fits.json", {"fits": fits, "errors": _dump_errors(errors)})
    write_json(out / "landscapes.json", {"landscapes": [ls.to_export() for ls, _ in done]})
    return _status(errors, len(campaigns))


# ============================================
# RECOMMEND
# ============================================

def _curve_rows(landscape: BidLandscape, result: FitResult) -> List[dict]:
    params = result.sigmoid()
    return [
        {
            "cost": cost,
            "observed_clicks": observed,
            "fitted_clicks": float(h(params, cost)),
            "fitted_derivative": float(h_prime(params, cost)),
        }
        for cost, observed in observed_click_pairs(landscape)
    ]


def cmd_recommend(manifest: RunManifest, settings: Settings) -> int:
    """Landscape, sigmoid fit and strategy recommendation for every campaign."""
    campaigns = _load(manifest)
    out = Path(manifest.output_path)
    budget = BudgetConstraint(budget=manifest.budget)
    strategy = manifest.strategy
    knobs = settings.recommend
    decimals = settings.money_decimals

    def recommend_one(campaign_id: str, observations) -> Tuple[Recommendation, List[dict]]:
        landscape = build_landscape(observations)
        result = fit(ModelKind.SIGMOID, click_cost_pairs(landscape), settings.fit)
        rec = recommend(result, landscape, budget, strategy, step=knobs.cost_step, rtol=knobs.budget_rtol)
        return rec, _curve_rows(landscape, result)

    done, errors = run_campaigns(campaigns, recommend_one, settings.workers)

    for rec, rows in done:
        write_curve_tsv(out / "curves" / f"{safe_name(rec.campaign_id)}.tsv", rows, decimals=decimals)
    write_json(out / "recommendations.json", {
        "recommendations": [
            rec.model_dump(mode="json", context={"money_decimals": decimals}) for rec, _ in done
        ],
        "errors": _dump_errors(errors),
    })
    return _status(errors, len(campaigns))


# ============================================
# COMPARE
# ============================================

def cmd_compare(manifest: RunManifest, settings: Settings) -> int:
    """Leave-one-out model errors and the strategy table across campaigns."""
    campaigns = _load(manifest)
    out = Path(manifest.output_path)
    opts = settings.compare
    kinds = [ModelKind(k) for k in manifest.models]

    def compare_one(campaign_id: str, observations) -> CampaignComparison:
        return compare_campaign(
            build_landscape(observations),
            kinds,
            holdout=opts.holdout,
            config=settings.fit,
            min_points=opts.min_points,
            step=settings.recommend.cost_step,
            rtol=settings.recommend.budget_rtol,
        )

    done, errors = run_campaigns(campaigns, compare_one, settings.workers)
    skipped = sum(1 for e in errors if e.error == "TooFewPoints")

    click_reports = [r for c in done for r in c.clicks]
    spend_reports = [r for c in done for r in c.spend]
    strategy_rows = [r for c in done for r in c.strategies]

    write_frame(out / "eval.csv", reports_frame(click_reports))
    write_frame(out / "eval_spend.csv", reports_frame(spend_reports))
    models = summarize_models(click_reports)
    strategies = summarize_strategies(strategy_rows)
    write_frame(out / "models.csv", models)
    write_frame(out / "strategies.csv", strategies)
    write_frame(out / "spenders.csv", summarize_spenders(strategy_rows))
    no_table = [c.campaign_id for c in done if c.strategies_skipped]
    write_json(out / "compare.json", {
        "campaigns": len(campaigns),
        "skipped": skipped,
        "strategies_skipped": no_table,
        "diff_r": {c.campaign_id: c.diff_r for c in done},
        "errors": _dump_errors(errors),
    })

    if not models.empty:
        logger.info("📊 Model errors (mean across campaigns):\n" + models.to_string(index=False))
        logger.info("📊 Strategies:\n" + strategies.to_string(index=False))
    if skipped:
        logger.warning(f"{skipped} campaigns skipped for too few points")
    if no_table:
        logger.warning(f"{len(no_table)} campaigns have no strategy table: sigmoid did not converge")
    return _status(errors, len(campaigns))


# ============================================
# SIMULATE
# ============================================

def cmd_simulate(manifest: RunManifest, settings: Settings) -> int:
    """Write a synthetic observation log for `n_campaigns` campaigns."""
    market = settings.simgen
    if manifest.seed is not None:
        try:
            market = market.model_copy(update={"seed": manifest.seed})
            market = type(market).model_validate(market.model_dump())
        except ValidationError as e:
            raise InvalidConfig(str(e)) from None
    rows = simulate_campaigns(market, settings.n_campaigns)
    write_observations(Path(manifest.output_path) / "observations.csv", rows)
    return 0


HANDLERS: Dict[Command, Callable[[RunManifest, Settings], int]] = {
    Command.FIT: cmd_fit,
    Command.RECOMMEND: cmd_recommend,
    Command.COMPARE: cmd_compare,
    Command.SIMULATE: cmd_simulate,
}


def run(manifest: RunManifest, settings: Settings) -> int:
    """Dispatch a validated manifest to its handler."""
    logger.info(f"▶️ {manifest.command.value}: input={manifest.input_path}, output={manifest.output_path}")
    return HANDLERS[manifest.command](manifest, settings)
