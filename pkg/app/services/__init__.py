"""
Services Package

Numerical engines: landscapes, curve fitting, recommendation, metrics,
synthetic markets and the comparison harness.
"""

from app.services.landscape import (
    build_landscape,
    win_rate_at,
    ecpm_cost_at,
    clicks_at,
    spend_at,
    click_cost_pairs,
)
from app.services.curvefit import (
    fit,
    predict,
    predict_baseline,
    eval_model,
    eval_derivative,
    jacobian,
)
from app.services.recommend import (
    inflection_cost,
    binary_search_cost,
    recommend,
    cost_to_bid,
    cpc_from_ecpm,
)
from app.services.metrics import mape, rmse, naive_inflection, diff_r, theorem1, lift_ratios
from app.services.simgen import generate_campaign, ground_truth_curve, simulate_campaigns

__all__ = [
    # Landscape
    "build_landscape",
    "win_rate_at",
    "ecpm_cost_at",
    "clicks_at",
    "spend_at",
    "click_cost_pairs",
    # Curve fitting
    "fit",
    "predict",
    "predict_baseline",
    "eval_model",
    "eval_derivative",
    "jacobian",
    # Recommendation
    "inflection_cost",
    "binary_search_cost",
    "recommend",
    "cost_to_bid",
    "cpc_from_ecpm",
    # Metrics
    "mape",
    "rmse",
    "naive_inflection",
    "diff_r",
    "theorem1",
    "lift_ratios",
    # Simulation
    "generate_campaign",
    "ground_truth_curve",
    "simulate_campaigns",
]
