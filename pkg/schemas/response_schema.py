"""
API Response Schema - Pydantic Models

Defines the structure for responses from the simulation and prediction
endpoints.
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from schemas.run_schema import LifespanModel, LifespanRecord


class ExecutionMetadataResponse(BaseModel):
    """Execution metadata for one request."""

    execution_time_seconds: float = Field(..., description="Total execution time in seconds", examples=[1.42])
    graph: str = Field(..., description="Graph the run used", examples=["Z1[r=256]"])
    vertices: int = Field(..., description="Stored vertices", examples=[513])
    timestamp: str = Field(..., description="Completion timestamp", examples=["2026-02-09 12:30:45"])


class SimulateSuccessResponse(BaseModel):
    """Success response carrying the lifespan record."""

    status: str = Field(default="success", examples=["success"])
    data: LifespanRecord
    execution_metadata: Optional[ExecutionMetadataResponse] = None


class PredictionData(BaseModel):
    model: LifespanModel
    gamma: Optional[float] = Field(None, description="Gamma(p, q) for systems")
    fujita: Optional[float] = Field(None, description="1 + (1+nu)/n")


class PredictSuccessResponse(BaseModel):
    status: str = Field(default="success", examples=["success"])
    data: PredictionData


class ErrorDetail(BaseModel):
    """Detailed error information."""

    error_type: str = Field(..., description="Exception class", examples=["DomainError"])
    error_message: str = Field(..., description="Error message", examples=["p must exceed 1, got 0.5"])
    exit_code: Optional[int] = Field(None, description="Matching CLI exit code", examples=[1])


class ErrorResponse(BaseModel):
    """Error response returned for rejected or failed requests."""

    status: str = Field(default="error", examples=["error"])
    message: str = Field(..., examples=["Invalid request parameters"])
    detail: Optional[ErrorDetail] = None
    execution_metadata: Optional[Dict[str, Any]] = None
