"""
Recommendation Models

Budget constraint, strategy labels and the recommended operating point.
"""

from enum import Enum
from typing import NamedTuple

from pydantic import BaseModel, ConfigDict, Field, SerializationInfo, field_serializer

MONEY_DECIMALS = 3
CLICK_DECIMALS = 3


class Strategy(str, Enum):
    """Bid strategies 0-4."""
    NO_OPT = "no-opt"
    MAX_CLICK = "mc"
    MAX_CLICK_90 = "mc90"
    INFLECTION = "ip"
    INFLECTION_90 = "ip90"


class BudgetConstraint(BaseModel):
    """Spend(bid) <= budget."""
    model_config = ConfigDict(frozen=True)

    budget: float = Field(..., gt=0, description="Budget in dollars")


class BidMapping(NamedTuple):
    """Result of mapping an eCPM cost back to a bid."""
    bid: float
    extrapolated: bool


class Recommendation(BaseModel):
    """
    Recommended operating point for one campaign.

    Money fields are serialized with three decimals, the cost lattice precision,
    unless the dump context carries `money_decimals`.
    """
    model_config = ConfigDict(frozen=True)

    campaign_id: str = ""
    strategy: Strategy
    ecpm_cost_star: float = Field(..., ge=0)
    bid_star_ecpm: float = Field(..., ge=0)
    bid_star_cpc: float = Field(..., ge=0)
    predicted_clicks: float = Field(..., ge=0)
    predicted_spend: float = Field(..., ge=0)
    budget: float = Field(..., gt=0)
    budget_binding: bool = False
    extrapolated: bool = False
    click_yield: float = Field(default=0.0, ge=0, exclude=True)

    @field_serializer("ecpm_cost_star", "bid_star_ecpm", "bid_star_cpc", "predicted_spend", "budget")
    def _money(self, value: float, info: SerializationInfo) -> float:
        context = info.context or {}
        return round(value, context.get("money_decimals", MONEY_DECIMALS))

    @field_serializer("predicted_clicks")
    def _clicks(self, value: float) -> float:
        return round(value, CLICK_DECIMALS)
