"""
Curve Fitting Models

Parameter types, fit configuration and fit results for the click-vs-cost models.
"""

import math
from enum import Enum
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from app.models.observation import ClickCostCurve


class ModelKind(str, Enum):
    """Click-vs-cost model families."""
    SIGMOID = "sigmoid"
    POWER = "power"
    MICHAELIS_MENTEN = "mm"
    NEG_EXP = "negexp"
    NEAREST_NEIGHBOR = "nns"
    LINEAR_INTERP = "li"

    @property
    def parametric(self) -> bool:
        return self not in (ModelKind.NEAREST_NEIGHBOR, ModelKind.LINEAR_INTERP)

    @property
    def n_free(self) -> int:
        """Number of free parameters fitted by least squares."""
        if self is ModelKind.SIGMOID:
            return 3
        return 2 if self.parametric else 0


class SigmoidParams(BaseModel):
    """
    Logistic growth model h(x) = s/(1+exp(-t*x+p)) - q.

    q is not free: it is always s/(1+exp(p)), which pins h(0) = 0.
    """
    model_config = ConfigDict(frozen=True)

    s: float = Field(..., gt=0, description="Click scale")
    t: float = Field(..., gt=0, description="Steepness per dollar of eCPM cost")
    p: float = Field(..., description="Shift")

    @model_validator(mode="after")
    def _check_finite(self) -> "SigmoidParams":
        if not all(math.isfinite(v) for v in (self.s, self.t, self.p)):
            raise ValueError("sigmoid parameters must be finite")
        return self

    @computed_field
    @property
    def q(self) -> float:
        # 1/(1+e^p) written to stay finite for large |p|
        if self.p >= 0:
            z = math.exp(-self.p)
            return self.s * z / (1.0 + z)
        return self.s / (1.0 + math.exp(self.p))

    @property
    def asymptote(self) -> float:
        return self.s - self.q

    def as_dict(self) -> Dict[str, float]:
        return {"s": self.s, "t": self.t, "p": self.p, "q": self.q}


class FitConfig(BaseModel):
    """Stopping and damping settings for the iterative least-squares fit."""
    xi: float = Field(default=1e-5, gt=0, description="Relative SSE change stop tolerance")
    max_iterations: int = Field(default=200, ge=1)
    damping0: float = Field(default=1e-3, gt=0, description="Initial damping factor")


class FitResult(BaseModel):
    """
    Fitted model kind, parameters and residual diagnostics.

    Non-parametric kinds keep their training curve in `support`, which is
    left out of the JSON form.
    """
    kind: ModelKind
    params: Dict[str, float] = Field(default_factory=dict)
    sse: float = Field(..., ge=0)
    iterations: int = Field(default=0, ge=0)
    converged: bool = False
    n_points: int = Field(..., ge=0)
    support: Optional[ClickCostCurve] = Field(default=None, exclude=True)

    def sigmoid(self) -> SigmoidParams:
        """Sigmoid parameters of a sigmoid fit."""
        if self.kind is not ModelKind.SIGMOID:
            raise TypeError(f"fit kind is {self.kind.value}, not sigmoid")
        return SigmoidParams(s=self.params["s"], t=self.params["t"], p=self.params["p"])

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "params": dict(self.params),
            "sse": self.sse,
            "iterations": self.iterations,
            "converged": self.converged,
            "n_points": self.n_points,
        }
