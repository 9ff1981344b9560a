"""
Schemas package for Graph Blowup Lab.

Pydantic models shared by the CLI, the HTTP API and the reports.
"""

# Request schemas
from schemas.request_schema import (
    SimulateRequest,
    PredictRequest,
    HealthCheckResponse
)

# Response schemas
from schemas.response_schema import (
    ExecutionMetadataResponse,
    SimulateSuccessResponse,
    PredictionData,
    PredictSuccessResponse,
    ErrorDetail,
    ErrorResponse
)

# Run and report schemas
from schemas.run_schema import (
    Verdict,
    ThresholdCrossing,
    LifespanRecord,
    LifespanModel,
    ScalingFit,
    ImplicitLifespanCheck,
    CurvePoint,
    CurveReport
)
from schemas.report_schema import (
    ValidationReport,
    BallTable,
    VolumeGrowthFit,
    DecayReport,
    BoundCheck,
    CutoffBoundReport,
    CutoffBoundLadderReport,
    SupportMeasure,
    ChainRow,
    ChainReport,
    HReport,
    ResidualReport,
    FunctionalReport
)

__all__ = [
    # Request models
    'SimulateRequest',
    'PredictRequest',
    'HealthCheckResponse',

    # Response models
    'ExecutionMetadataResponse',
    'SimulateSuccessResponse',
    'PredictionData',
    'PredictSuccessResponse',
    'ErrorDetail',
    'ErrorResponse',

    # Runs
    'Verdict',
    'ThresholdCrossing',
    'LifespanRecord',
    'LifespanModel',
    'ScalingFit',
    'ImplicitLifespanCheck',
    'CurvePoint',
    'CurveReport',

    # Reports
    'ValidationReport',
    'BallTable',
    'VolumeGrowthFit',
    'DecayReport',
    'BoundCheck',
    'CutoffBoundReport',
    'CutoffBoundLadderReport',
    'SupportMeasure',
    'ChainRow',
    'ChainReport',
    'HReport',
    'ResidualReport',
    'FunctionalReport'
]
