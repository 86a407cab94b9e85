"""
Observation and Landscape Models

Logged auction outcomes and the per-campaign curves built from them.
"""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AuctionObservation(BaseModel):
    """
    One logged auction outcome row for a campaign.

    Money is eCPM dollars. Under GSP the winner never pays above its own bid,
    so `ecpm_cost <= bid` is enforced at construction.
    """
    model_config = ConfigDict(frozen=True)

    campaign_id: str = Field(..., min_length=1)
    bid: float = Field(..., gt=0, description="Bid in eCPM dollars")
    auctions: int = Field(..., ge=1)
    wins: int = Field(..., ge=0)
    clicks: int = Field(..., ge=0)
    ecpm_cost: float = Field(..., ge=0, description="Mean second price paid per mille")
    ctr: float = Field(..., gt=0, le=1)

    @model_validator(mode="after")
    def _check_counts(self) -> "AuctionObservation":
        if self.wins > self.auctions:
            raise ValueError(f"wins ({self.wins}) exceed auctions ({self.auctions})")
        if self.clicks > self.wins:
            raise ValueError(f"clicks ({self.clicks}) exceed wins ({self.wins})")
        if self.ecpm_cost > self.bid:
            raise ValueError(f"ecpm_cost ({self.ecpm_cost}) exceeds bid ({self.bid})")
        return self


class LandscapePoint(BaseModel):
    """A single bid bucket on a landscape."""
    model_config = ConfigDict(frozen=True)

    bid: float = Field(..., gt=0)
    win_rate: float = Field(..., ge=0.0, le=1.0)
    ecpm_cost: float = Field(..., ge=0.0)


class BidLandscape(BaseModel):
    """
    Monotone win-rate and eCPM-cost curves over a bid grid.

    `observed_clicks` and `auctions` keep the raw per-bucket totals so the
    current operating point and the observed click column stay available.
    """
    model_config = ConfigDict(frozen=True)

    campaign_id: str
    points: List[LandscapePoint] = Field(default_factory=list)
    impressions: int = Field(..., ge=0, description="Market supply per bid level")
    ctr: float = Field(..., gt=0, le=1)
    observed_clicks: List[int] = Field(default_factory=list, exclude=True)
    auctions: List[int] = Field(default_factory=list, exclude=True)

    @model_validator(mode="after")
    def _check_order(self) -> "BidLandscape":
        bids = [pt.bid for pt in self.points]
        if any(b2 <= b1 for b1, b2 in zip(bids, bids[1:])):
            raise ValueError("landscape bids must be strictly increasing")
        return self

    @property
    def bids(self) -> List[float]:
        return [pt.bid for pt in self.points]

    @property
    def win_rates(self) -> List[float]:
        return [pt.win_rate for pt in self.points]

    @property
    def costs(self) -> List[float]:
        return [pt.ecpm_cost for pt in self.points]

    @property
    def current_index(self) -> int:
        """Index of the max-volume bucket (most auctions, ties to the lower bid)."""
        if not self.auctions:
            return 0
        best = max(self.auctions)
        return self.auctions.index(best)

    @property
    def current_bid(self) -> float:
        return self.points[self.current_index].bid

    def to_export(self) -> dict:
        """Landscape JSON export shape."""
        return {
            "campaign_id": self.campaign_id,
            "ctr": self.ctr,
            "impressions": self.impressions,
            "points": [pt.model_dump() for pt in self.points],
        }


class ClickCostCurve(BaseModel):
    """The (eCPM cost, clicks) observation set a click model is fitted to."""
    model_config = ConfigDict(frozen=True)

    pairs: List[Tuple[float, float]] = Field(default_factory=list)
    ctr: float = Field(..., gt=0, le=1)
    impressions: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_pairs(self) -> "ClickCostCurve":
        costs = [c for c, _ in self.pairs]
        if any(c2 < c1 for c1, c2 in zip(costs, costs[1:])):
            raise ValueError("curve pairs must be sorted by cost")
        if any(y < 0 for _, y in self.pairs):
            raise ValueError("clicks must be non-negative")
        return self

    @property
    def costs(self) -> List[float]:
        return [c for c, _ in self.pairs]

    @property
    def clicks(self) -> List[float]:
        return [y for _, y in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)

    def without(self, index: int) -> "ClickCostCurve":
        """Copy of the curve with one pair held out."""
        kept = self.pairs[:index] + self.pairs[index + 1:]
        return ClickCostCurve(pairs=kept, ctr=self.ctr, impressions=self.impressions)
