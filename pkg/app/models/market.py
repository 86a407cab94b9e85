"""
Market Simulation Models
"""

from pydantic import BaseModel, Field, model_validator


class CompetitorBids(BaseModel):
    """Lognormal distribution of competitor eCPM bids."""
    log_mean: float = Field(default=0.7, description="Mean of log(bid)")
    log_sd: float = Field(default=0.5, gt=0, description="Standard deviation of log(bid)")


class MarketConfig(BaseModel):
    """
    Synthetic single-slot second-price market for one campaign.

    Our bid levels are evenly spaced on [bid_min, bid_max] and rounded to cents.
    """
    campaign_id: str = Field(default="sim", min_length=1)
    seed: int = Field(default=7, ge=0, lt=2**64)
    n_bid_levels: int = Field(default=30, ge=1)
    auctions_per_level: int = Field(default=2000, ge=1)
    bid_min: float = Field(default=0.5, gt=0)
    bid_max: float = Field(default=10.0, gt=0)
    competitor_bid_distribution: CompetitorBids = Field(default_factory=CompetitorBids)
    competitors_per_auction: int = Field(default=3, ge=1)
    true_ctr: float = Field(default=0.002, gt=0, le=1)
    noise_sd: float = Field(default=0.1, ge=0)

    @model_validator(mode="after")
    def _check_range(self) -> "MarketConfig":
        if self.bid_max < self.bid_min:
            raise ValueError("bid_max must be >= bid_min")
        return self
