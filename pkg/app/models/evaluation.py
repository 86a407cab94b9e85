"""
Evaluation Models
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class EvalReport(BaseModel):
    """Prediction error of one model kind over `n` held-out points."""
    campaign_id: str = ""
    model: str
    mape: float = Field(..., ge=0)
    rmse: float = Field(..., ge=0)
    n: int = Field(..., ge=0)


class Theorem1Quantities(BaseModel):
    """Elasticities and click yield of a landscape at one bid."""
    alpha: float
    beta: float
    gamma: float
    lower_bound_gamma: float
    model_gamma: Optional[float] = Field(
        default=None,
        description="h'(eCPM_cost(bid)) from a sigmoid fit, when one is supplied"
    )


class LiftRatios(BaseModel):
    """Bid and click increase of a proposed operating point over the current one."""
    bir: float
    cir: float
    cyr_current: float
    cyr_proposed: float
    cyr_lift: Optional[float] = Field(default=None, description="None when the current click yield is zero")


class StrategyRow(BaseModel):
    """One strategy's operating point and its lift over the current bid."""
    campaign_id: str
    strategy: str
    ecpm_cost_star: float
    bid_star_ecpm: float
    predicted_clicks: float
    predicted_spend: float = 0.0
    cyr: float = Field(..., description="dClick/deCPM_cost at the operating point")
    cyr_lift: Optional[float] = Field(default=None, description="Relative click-yield change over no-opt")
    bir: Optional[float] = None
    cir: Optional[float] = None


class CampaignComparison(BaseModel):
    """Everything `compare` reports for one campaign."""
    campaign_id: str
    clicks: List[EvalReport] = Field(default_factory=list)
    spend: List[EvalReport] = Field(default_factory=list)
    strategies: List[StrategyRow] = Field(default_factory=list)
    strategies_skipped: bool = False
    naive_cost: Optional[float] = None
    cf_cost: Optional[float] = None
    diff_r: Optional[float] = None
