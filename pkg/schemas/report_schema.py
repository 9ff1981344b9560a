"""
Report Schemas - Pydantic Models

Structured results of the graph, metric, cutoff and functional checks.
Every report can be flattened into CSV rows with ``to_rows()``.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ValidationReport(BaseModel):
    """Outcome of the structural checks on a weighted graph."""

    num_vertices: int = Field(..., description="Stored vertices", examples=[129])
    num_edges: int = Field(..., description="Stored unordered edges", examples=[128])
    symmetric: bool = Field(..., description="omega(x,y) == omega(y,x) for all stored pairs")
    zero_diagonal: bool = Field(..., description="omega(x,x) == 0 everywhere")
    connected: bool = Field(..., description="Stored graph has one connected component")
    positive_measure: bool = Field(..., description="mu(x) > 0 everywhere")
    measured_constant: float = Field(
        ..., description="sup_x sum_y omega(x,y) / mu(x)", examples=[1.0]
    )
    argmax_vertex: Optional[str] = Field(None, description="Vertex attaining the sup")
    c_bound: float = Field(..., description="Constant C the sup is compared against")
    degree_bound_holds: bool = Field(..., description="measured_constant <= c_bound")

    @property
    def all_passed(self) -> bool:
        return not self.failed_checks()

    def failed_checks(self) -> List[str]:
        names = ["symmetric", "zero_diagonal", "connected", "positive_measure", "degree_bound_holds"]
        return [name for name in names if not getattr(self, name)]

    def to_rows(self) -> List[Dict[str, Any]]:
        return [{"check": k, "value": v} for k, v in self.model_dump().items()]


class BallTable(BaseModel):
    """Ball volumes Vol(B(x0, r)) for a list of radii."""

    base: str = Field(..., description="Centre vertex x0")
    radii: List[float] = Field(..., description="Radii, increasing")
    volumes: List[float] = Field(..., description="Vol(B(x0, r)) = sum of mu over the ball")
    counts: List[int] = Field(..., description="Number of vertices in each ball")

    def to_rows(self) -> List[Dict[str, Any]]:
        return [
            {"r": r, "volume": v, "count": c}
            for r, v, c in zip(self.radii, self.volumes, self.counts)
        ]


class VolumeGrowthFit(BaseModel):
    """Least-squares fit of log Vol(B(x0, r)) against log r."""

    exponent: float = Field(..., description="Fitted growth exponent n", examples=[2.0])
    intercept: float = Field(..., description="Fitted log constant")
    r_squared: float = Field(..., description="Coefficient of determination")
    points_used: int = Field(..., description="Radii entering the fit")


class DecayReport(BaseModel):
    """Check of |Lap d(x)| d(x)^nu <= C outside B(x0, R0)."""

    nu: float
    R0: float
    threshold: float
    sup_value: float = Field(..., description="sup over tested vertices of |Lap d| d^nu")
    argsup_vertex: str
    tested_vertices: int
    passed: bool
    values: List[Dict[str, Any]] = Field(default_factory=list, description="Per-vertex rows")

    def to_rows(self) -> List[Dict[str, Any]]:
        return list(self.values)


class BoundCheck(BaseModel):
    """One of the three pointwise cutoff bounds at a single R."""

    name: str = Field(..., description="dt, dtt or laplacian")
    sup_ratio: float = Field(..., description="sup of lhs / rhs where rhs > 0")
    abs_sup_ratio: Optional[float] = Field(
        None, description="Two-sided ratio |Lap Phi| / rhs (laplacian bound only)"
    )
    violations: int = Field(0, description="Points with rhs == 0 and lhs > 0 (time bounds)")
    off_support_points: int = Field(
        0, description="Points with Phi* == 0 and Lap Phi != 0 (laplacian bound only)"
    )
    sign_anomalies: int = Field(
        0, description="Points on supp Phi* where Lap Phi > 0 (laplacian bound only)"
    )
    samples: int = 0


class CutoffBoundReport(BaseModel):
    """Pointwise cutoff bounds for one scale R."""

    R: float
    alpha: float
    beta: float
    nu: float
    bounds: List[BoundCheck]

    def bound(self, name: str) -> BoundCheck:
        for b in self.bounds:
            if b.name == name:
                return b
        raise KeyError(name)

    def to_rows(self) -> List[Dict[str, Any]]:
        return [{"R": self.R, **b.model_dump()} for b in self.bounds]


class CutoffBoundLadderReport(BaseModel):
    """Cutoff bounds across a geometric ladder of scales."""

    reports: List[CutoffBoundReport]
    growth_flags: Dict[str, bool] = Field(
        ..., description="Per bound: ratios trend upward beyond the trend tolerance"
    )
    hard_violations: int = Field(..., description="Time-bound violations summed over the ladder")
    abs_growth_flag: bool = Field(
        False, description="Two-sided ratio |Lap Phi| / Phi*-bound trends upward across the ladder"
    )
    off_support_points: int = Field(
        0, description="Points with Phi* == 0 and Lap Phi != 0, summed over the ladder"
    )

    @property
    def bounded(self) -> bool:
        """Time bounds and the one-sided Laplacian bound hold uniformly in R."""
        return self.hard_violations == 0 and not any(self.growth_flags.values())

    @property
    def two_sided_bounded(self) -> bool:
        """|Lap Phi| is also controlled by Phi* at every sample."""
        return self.bounded and not self.abs_growth_flag and self.off_support_points == 0

    def ratios(self, name: str) -> List[float]:
        """sup-ratios of one bound along the ladder."""
        return [r.bound(name).sup_ratio for r in self.reports]

    def to_rows(self) -> List[Dict[str, Any]]:
        return [row for r in self.reports for row in r.to_rows()]


class SupportMeasure(BaseModel):
    """Space-time measure of supp Phi*_R against R^(4/(alpha+2)) Vol(B(x0, R))."""

    R: float
    measure: float
    bound: float
    ratio: float


class ChainRow(BaseModel):
    """Both sides of one scale of the functional inequality chain."""

    R: float
    bound: str = Field(..., description="Which inequality (u or v chain)")
    lhs: float = Field(..., description="Functional plus the data term")
    rhs: float = Field(..., description="R^-(1+nu) P*^(1/p) |supp|^(1/p')")
    implied_constant: Optional[float] = Field(None, description="lhs / rhs, None when both vanish")
    violation: bool = Field(False, description="rhs == 0 while lhs > 0")


class ChainReport(BaseModel):
    """Implied constants of the estimate chain across an R ladder."""

    rows: List[ChainRow]
    growth_flag: bool
    violations: int

    def to_rows(self) -> List[Dict[str, Any]]:
        return [r.model_dump() for r in self.rows]


class HReport(BaseModel):
    """Log-averaged functional H(R) with its bound (log 2 / 4) P_R."""

    R: float
    H: float
    bound: float
    r_min: float
    quad_points: int
    satisfied: bool


class ResidualReport(BaseModel):
    """Weak-form identity residual of a trajectory against Psi = Phi_R."""

    R: float
    residual: float
    relative_residual: float
    terms: Dict[str, float]


class FunctionalReport(BaseModel):
    """Bundle written by ``lab functionals``."""

    chain: Optional[ChainReport] = None
    h_reports: List[HReport] = Field(default_factory=list)
    residuals: List[ResidualReport] = Field(default_factory=list)
    support: List[SupportMeasure] = Field(default_factory=list)

    def to_rows(self) -> List[Dict[str, Any]]:
        rows: List[Dict[str, Any]] = []
        if self.chain:
            rows += [{"kind": "chain", **r} for r in self.chain.to_rows()]
        rows += [{"kind": "H", **h.model_dump()} for h in self.h_reports]
        rows += [
            {"kind": "residual", "R": r.R, "residual": r.residual, "relative_residual": r.relative_residual}
            for r in self.residuals
        ]
        rows += [{"kind": "support", **s.model_dump()} for s in self.support]
        return rows
