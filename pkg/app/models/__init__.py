"""
Models Package
"""

from app.models.observation import AuctionObservation, LandscapePoint, BidLandscape, ClickCostCurve
from app.models.fit import ModelKind, SigmoidParams, FitConfig, FitResult
from app.models.recommendation import Strategy, BudgetConstraint, BidMapping, Recommendation
from app.models.evaluation import (
    EvalReport,
    Theorem1Quantities,
    LiftRatios,
    StrategyRow,
    CampaignComparison,
)
from app.models.market import CompetitorBids, MarketConfig
from app.models.manifest import Command, RunManifest, CampaignError

__all__ = [
    "AuctionObservation",
    "LandscapePoint",
    "BidLandscape",
    "ClickCostCurve",
    "ModelKind",
    "SigmoidParams",
    "FitConfig",
    "FitResult",
    "Strategy",
    "BudgetConstraint",
    "BidMapping",
    "Recommendation",
    "EvalReport",
    "Theorem1Quantities",
    "LiftRatios",
    "StrategyRow",
    "CampaignComparison",
    "CompetitorBids",
    "MarketConfig",
    "Command",
    "RunManifest",
    "CampaignError",
]
