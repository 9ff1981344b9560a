"""
Graph Blowup Lab - FastAPI Server

HTTP access to single lifespan estimates and predicted lifespan laws.
"""

import time
from datetime import datetime

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from config import settings
from experiments.scaling import fujita, predicted_lifespan_model
from graphs.lattice import build_lattice, lattice_origin
from graphs.metric import compute_metric
from schemas.request_schema import HealthCheckResponse, PredictRequest, SimulateRequest
from schemas.response_schema import (
    ErrorDetail,
    ErrorResponse,
    ExecutionMetadataResponse,
    PredictionData,
    PredictSuccessResponse,
    SimulateSuccessResponse,
)
from solver.integrator import estimate_lifespan
from solver.problem import ProblemKind, ProblemSpec, SolverControls, default_bump, gamma_exponent
from utils.exceptions import LabError
from utils.logger import setup_logger

# Initialize logger
logger = setup_logger(__name__)

SERVICE = "Graph Blowup Lab API"
VERSION = "1.0.0"

# Create FastAPI application
app = FastAPI(
    title=SERVICE,
    description="Lifespan estimates for nonlinear damped waves on weighted graphs",
    version=VERSION,
    docs_url="/docs",
    redoc_url="/redoc"
)

# Configure CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.allowed_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.on_event("startup")
async def startup_event():
    """Run on application startup."""
    logger.info("=" * 60)
    logger.info(f"🚀 {SERVICE} Starting...")
    logger.info(f"   Version: {VERSION}")
    logger.info(f"   Horizon: t_max={settings.solver_t_max:g}, rtol={settings.solver_rtol:g}")
    logger.info(f"   CORS Origins: {settings.allowed_origins}")
    logger.info("=" * 60)


@app.on_event("shutdown")
async def shutdown_event():
    """Run on application shutdown."""
    logger.info("=" * 60)
    logger.info(f"🛑 {SERVICE} Shutting Down...")
    logger.info("=" * 60)


@app.get("/", tags=["Root"])
async def root():
    """
    Root endpoint - API information.
    """
    return {
        "service": SERVICE,
        "version": VERSION,
        "description": "Blow-up and lifespan lab for damped waves on graphs",
        "documentation": "/docs",
        "endpoints": {
            "health": "/health",
            "simulate": "/api/v1/simulate",
            "predict": "/api/v1/predict"
        }
    }


@app.get("/health", response_model=HealthCheckResponse, tags=["Health"])
async def health_check():
    """Health check endpoint."""
    return HealthCheckResponse(status="healthy", service=SERVICE, version=VERSION)


@app.post(
    "/api/v1/simulate",
    response_model=SimulateSuccessResponse,
    tags=["Simulation"],
    summary="Estimate a lifespan",
    description="Integrate one problem on a truncated lattice and estimate its lifespan"
)
def simulate(request: SimulateRequest) -> SimulateSuccessResponse:
    """
    Run a single lifespan estimate.

    Example:
        POST /api/v1/simulate
        {"dim": 1, "radius": 256, "kind": "scalar", "p": 2.0, "epsilon": 0.3}
    """
    start_time = time.time()
    logger.info("=" * 60)
    logger.info(f"🧪 Simulate {request.kind} p={request.p:g} eps={request.epsilon:g} on Z^{request.dim}")
    logger.info("=" * 60)

    graph = build_lattice(request.dim, request.radius)
    metric = compute_metric(graph, lattice_origin(request.dim))
    u0, u1 = default_bump(graph, metric)
    kind = ProblemKind(request.kind)
    spec = ProblemSpec(
        kind=kind,
        p=request.p,
        q=request.q if kind.is_system else None,
        epsilon=request.epsilon,
        graph=graph,
        metric=metric,
        u0=u0,
        u1=u1,
        v0=u0 if kind.is_system else None,
        v1=u1 if kind.is_system else None,
    )
    overrides = {}
    if request.t_max is not None:
        overrides["t_max"] = request.t_max
    if request.thresholds is not None:
        overrides["thresholds"] = request.thresholds
    record = estimate_lifespan(spec, SolverControls(**overrides))

    execution_time = time.time() - start_time
    logger.info(f"✅ {record.verdict.value} in {execution_time:.2f}s")
    return SimulateSuccessResponse(
        data=record,
        execution_metadata=ExecutionMetadataResponse(
            execution_time_seconds=round(execution_time, 3),
            graph=graph.name,
            vertices=graph.num_vertices,
            timestamp=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
        ),
    )


@app.post("/api/v1/predict", response_model=PredictSuccessResponse, tags=["Prediction"])
async def predict(request: PredictRequest) -> PredictSuccessResponse:
    """Predicted lifespan law, Gamma(p, q) and the critical exponent."""
    kind = ProblemKind(request.kind)
    model = predicted_lifespan_model(kind, request.n, request.nu, request.p, request.q)
    return PredictSuccessResponse(
        data=PredictionData(
            model=model,
            gamma=gamma_exponent(request.p, request.q) if kind.is_system else None,
            fujita=fujita(request.n, request.nu),
        )
    )


@app.exception_handler(LabError)
async def lab_exception_handler(request: Request, exc: LabError):
    """Rejected computations: invalid parameters, capacity guards, no prediction."""
    logger.error(f"❌ {type(exc).__name__}: {exc}")
    body = ErrorResponse(
        message="Invalid request parameters",
        detail=ErrorDetail(error_type=type(exc).__name__, error_message=str(exc), exit_code=exc.exit_code),
    )
    return JSONResponse(status_code=400, content=body.model_dump())


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    """General exception handler for unhandled errors."""
    logger.error(f"Unhandled exception: {str(exc)}")
    body = ErrorResponse(
        message="An unexpected error occurred",
        detail=ErrorDetail(error_type=type(exc).__name__, error_message=str(exc)),
    )
    return JSONResponse(status_code=500, content=body.model_dump())


# Run the application
if __name__ == "__main__":
    import uvicorn

    logger.info("\n" + "=" * 60)
    logger.info(f"Starting {SERVICE} Server")
    logger.info(f"Host: {settings.api_host}")
    logger.info(f"Port: {settings.api_port}")
    logger.info(f"Reload: {settings.api_reload}")
    logger.info(f"Docs: http://{settings.api_host}:{settings.api_port}/docs")
    logger.info("=" * 60 + "\n")

    uvicorn.run(
        "main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=settings.api_reload,
        log_level=settings.log_level.lower()
    )
