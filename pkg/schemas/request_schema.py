"""
API Request Schema - Pydantic Models

Defines the structure and validation rules for requests to the
simulation and prediction endpoints.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ALLOWED_KINDS = ["scalar", "system", "scalar_double_damping", "system_double_damping"]


class SimulateRequest(BaseModel):
    """
    Request model for a single lifespan estimate on a truncated lattice.

    Initial data is the default bump (indicator of B(x0, 2), total mass 1).
    """

    dim: int = Field(1, ge=1, le=3, description="Lattice dimension n", examples=[1])
    radius: int = Field(256, ge=4, le=4096, description="l1 truncation radius", examples=[256])
    kind: str = Field("scalar", description="Equation or system", examples=["scalar"])
    p: float = Field(..., gt=1.0, description="Exponent of the nonlinearity", examples=[2.0])
    q: Optional[float] = Field(None, gt=1.0, description="Second exponent (systems only)", examples=[3.0])
    epsilon: float = Field(..., gt=0.0, description="Data size", examples=[0.3])
    t_max: Optional[float] = Field(None, gt=0.0, description="Time horizon override", examples=[2000.0])
    thresholds: Optional[List[float]] = Field(
        None, description="Sup-norm threshold ladder override", examples=[[1e3, 1e4, 1e5, 1e6]]
    )

    @field_validator("kind")
    @classmethod
    def validate_kind(cls, v):
        """Validate kind field."""
        v_lower = v.lower()
        if v_lower not in ALLOWED_KINDS:
            raise ValueError(f"kind must be one of: {', '.join(ALLOWED_KINDS)}")
        return v_lower

    @field_validator("thresholds")
    @classmethod
    def validate_thresholds(cls, v):
        """Thresholds must be positive; duplicates are dropped."""
        if v is None:
            return v
        cleaned = sorted(set(float(x) for x in v))
        if not cleaned or cleaned[0] <= 0:
            raise ValueError("thresholds must be positive")
        return cleaned

    @model_validator(mode="after")
    def validate_system(self) -> "SimulateRequest":
        if self.kind.startswith("system") and self.q is None:
            raise ValueError(f"kind={self.kind} needs q")
        return self

    model_config = ConfigDict(
        json_schema_extra={
            "example": {"dim": 1, "radius": 256, "kind": "scalar", "p": 2.0, "epsilon": 0.3}
        }
    )


class PredictRequest(BaseModel):
    """Request model for the predicted lifespan law."""

    kind: str = Field("scalar", examples=["system"])
    n: float = Field(..., gt=0.0, description="Volume growth exponent", examples=[1.0])
    nu: float = Field(1.0, ge=0.0, le=1.0, description="Decay exponent of the distance Laplacian")
    p: float = Field(..., gt=1.0, examples=[2.0])
    q: Optional[float] = Field(None, gt=1.0, examples=[3.0])

    @field_validator("kind")
    @classmethod
    def validate_kind(cls, v):
        """Validate kind field."""
        v_lower = v.lower()
        if v_lower not in ALLOWED_KINDS:
            raise ValueError(f"kind must be one of: {', '.join(ALLOWED_KINDS)}")
        return v_lower

    model_config = ConfigDict(
        json_schema_extra={"example": {"kind": "system", "n": 1, "nu": 1.0, "p": 2.0, "q": 3.0}}
    )


class HealthCheckResponse(BaseModel):
    """
    Response model for the health check endpoint.
    """

    status: str = Field(..., description="Health status", examples=["healthy"])
    service: str = Field(..., description="Service name", examples=["Graph Blowup Lab API"])
    version: str = Field(..., description="API version", examples=["1.0.0"])
