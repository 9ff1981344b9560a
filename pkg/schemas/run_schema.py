"""
Run Schemas - Pydantic Models

Results of integrations, sweeps, scaling fits and critical-curve scans.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Verdict(str, Enum):
    BLOWUP = "blowup"
    SURVIVED = "survived_horizon"
    CONTAMINATED = "truncation_contaminated"


class ThresholdCrossing(BaseModel):
    """Time at which sup|u| first reached a threshold M."""

    threshold: float = Field(..., description="Sup-norm threshold M", examples=[1e6])
    time: float = Field(..., description="Crossing time T(M)", examples=[1.7195])


class LifespanRecord(BaseModel):
    """Outcome of one integration at a fixed epsilon."""

    epsilon: float = Field(..., description="Data size", examples=[0.1])
    kind: str = Field(..., description="Problem kind", examples=["scalar"])
    p: float
    q: Optional[float] = None
    verdict: Verdict
    T_est: Optional[float] = Field(
        None, description="Estimated lifespan; None when the horizon was exceeded or the run is contaminated"
    )
    horizon_exceeded: bool = False
    T_end: float = Field(..., description="Last time reached by the integrator")
    threshold_ladder: List[ThresholdCrossing] = Field(default_factory=list)
    extrapolated: bool = Field(False, description="T_est comes from ladder extrapolation")
    low_confidence: bool = False
    boundary_peak: float = 0.0
    domain_radius: Optional[float] = None
    retried: bool = False
    steps: int = 0
    settings_hash: str = ""
    advice: Optional[str] = None

    def crossing_time(self, threshold: float) -> Optional[float]:
        for c in self.threshold_ladder:
            if c.threshold == threshold:
                return c.time
        return None

    def to_row(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "kind": self.kind,
            "p": self.p,
            "q": self.q if self.q is not None else "",
            "verdict": self.verdict.value,
            "T_est": self.T_est if self.T_est is not None else "",
            "T_end": self.T_end,
            "extrapolated": self.extrapolated,
            "low_confidence": self.low_confidence,
            "boundary_peak": self.boundary_peak,
            "domain_radius": self.domain_radius if self.domain_radius is not None else "",
            "retried": self.retried,
            "steps": self.steps,
            "settings_hash": self.settings_hash,
            "ladder": ";".join(f"{c.threshold:g}:{c.time:.17g}" for c in self.threshold_ladder),
        }


class LifespanModel(BaseModel):
    """Predicted lifespan law for a parameter set."""

    model: str = Field(..., description="power or exponential", examples=["power"])
    regime: str = Field(..., description="subcritical or critical")
    slope: Optional[float] = Field(None, description="Exponent s in T ~ eps^s (power model)")
    kappa: Optional[float] = Field(None, description="Exponent kappa in T ~ exp(C eps^-kappa)")
    gamma: Optional[float] = Field(None, description="Gamma(p, q) for systems")
    fujita: Optional[float] = Field(None, description="Critical exponent 1 + (1+nu)/n for scalar kinds")


class ScalingFit(BaseModel):
    """Least-squares fit of measured lifespans against epsilon."""

    model: str
    slope: float = Field(..., description="Fitted slope in linearised coordinates")
    intercept: float
    r_squared: float
    points_used: int
    excluded_epsilons: List[float] = Field(default_factory=list)
    predicted_slope: Optional[float] = None
    kappa: Optional[float] = Field(None, description="kappa used for the exponential abscissa")
    fitted_kappa: Optional[float] = Field(None, description="kappa estimated from log log T")
    relative_error: Optional[float] = None
    agreement: Optional[str] = Field(
        None, description="matches_sharp_rate, consistent_with_upper_bound or exceeds_upper_bound"
    )


class ImplicitLifespanCheck(BaseModel):
    """Spread of the implicit-bound quantity across records."""

    values: List[float]
    epsilons: List[float]
    spread: float = Field(..., description="max / min of the quantity")


class CurvePoint(BaseModel):
    """One (p, q) pair of a critical-curve scan."""

    p: float
    q: float
    gamma: float
    margin: float = Field(..., description="Gamma - n/(1+nu) (blow-up predicted when >= 0)")
    predicted_blowup: bool
    outcome: str = Field(..., description="all_blowup, some_survive or contaminated")
    blowups: int
    runs: int


class CurveReport(BaseModel):
    """Critical-curve scan over a (p, q) grid."""

    n: float
    points: List[CurvePoint]

    @property
    def agreement(self) -> float:
        decided = [pt for pt in self.points if pt.outcome != "contaminated"]
        if not decided:
            return 0.0
        hits = sum((pt.outcome == "all_blowup") == pt.predicted_blowup for pt in decided)
        return hits / len(decided)

    def to_rows(self) -> List[Dict[str, Any]]:
        return [pt.model_dump() for pt in self.points]
