"""
Unit tests for FastAPI endpoints.
"""

from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from main import app
from utils.exceptions import NumericError


@pytest.fixture
def client():
    """Create test client."""
    return TestClient(app)


class TestAPIEndpoints:
    """Tests for API endpoints."""

    def test_root_endpoint(self, client):
        """Test root endpoint."""
        response = client.get("/")

        assert response.status_code == 200
        data = response.json()
        assert data["service"] == "Graph Blowup Lab API"
        assert data["version"] == "1.0.0"
        assert "simulate" in data["endpoints"]

    def test_health_check(self, client):
        """Test health check endpoint."""
        response = client.get("/health")

        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["service"] == "Graph Blowup Lab API"

    def test_simulate_blowup(self, client):
        """A lattice run with large data blows up within the horizon."""
        response = client.post(
            "/api/v1/simulate",
            json={"dim": 1, "radius": 64, "kind": "scalar", "p": 2.0, "epsilon": 1.0, "t_max": 200.0},
        )

        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "success"
        assert data["data"]["verdict"] == "blowup"
        assert 15.0 < data["data"]["T_est"] < 40.0
        assert data["execution_metadata"]["vertices"] == 129

    def test_simulate_capacity_guard(self, client):
        """Oversized lattices are rejected with 400."""
        response = client.post(
            "/api/v1/simulate",
            json={"dim": 3, "radius": 4096, "p": 2.0, "epsilon": 1.0},
        )

        assert response.status_code == 400
        assert response.json()["detail"]["error_type"] == "CapacityError"

    @patch("main.estimate_lifespan")
    def test_simulate_numeric_failure(self, mock_estimate, client):
        """Lab errors raised by the solver map to 400 with their exit code."""
        mock_estimate.side_effect = NumericError("non-finite derivative at t=1.5")

        response = client.post(
            "/api/v1/simulate",
            json={"dim": 1, "radius": 16, "p": 2.0, "epsilon": 1.0},
        )

        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["error_type"] == "NumericError"
        assert detail["exit_code"] == 3

    @patch("main.estimate_lifespan")
    def test_simulate_unexpected_error(self, mock_estimate):
        """Unhandled errors map to 500."""
        mock_estimate.side_effect = RuntimeError("boom")
        client = TestClient(app, raise_server_exceptions=False)

        response = client.post(
            "/api/v1/simulate",
            json={"dim": 1, "radius": 16, "p": 2.0, "epsilon": 1.0},
        )

        assert response.status_code == 500
        assert response.json()["status"] == "error"

    def test_predict_scalar(self, client):
        """Scalar prediction on Z^1 with p = 2."""
        response = client.post("/api/v1/predict", json={"kind": "scalar", "n": 1, "p": 2.0})

        assert response.status_code == 200
        data = response.json()["data"]
        assert data["model"]["model"] == "power"
        assert data["model"]["slope"] == pytest.approx(-2.0)
        assert data["fujita"] == 3.0
        assert data["gamma"] is None

    def test_predict_system(self, client):
        """System prediction carries Gamma."""
        response = client.post("/api/v1/predict", json={"kind": "system", "n": 1, "p": 2.0, "q": 3.0})

        assert response.status_code == 200
        data = response.json()["data"]
        assert data["gamma"] == pytest.approx(0.8)
        assert data["model"]["slope"] == pytest.approx(-2.0 / 0.6)

    def test_predict_supercritical(self, client):
        """Supercritical parameters have no prediction."""
        response = client.post("/api/v1/predict", json={"kind": "scalar", "n": 2, "p": 3.0})

        assert response.status_code == 400
        assert response.json()["detail"]["error_type"] == "NoPredictionError"


class TestRequestValidation:
    """Tests for request validation."""

    def test_invalid_kind(self, client):
        """Unknown kinds are rejected."""
        response = client.post("/api/v1/predict", json={"kind": "heat", "n": 1, "p": 2.0})

        assert response.status_code == 422

    def test_kind_is_case_insensitive(self, client):
        """Kinds are normalised to lower case."""
        response = client.post("/api/v1/predict", json={"kind": "SCALAR", "n": 1, "p": 2.0})

        assert response.status_code == 200

    def test_system_needs_q(self, client):
        """Simulating a system without q is a validation error."""
        response = client.post(
            "/api/v1/simulate",
            json={"kind": "system", "p": 2.0, "epsilon": 1.0},
        )

        assert response.status_code == 422

    def test_invalid_exponent(self, client):
        """p must exceed 1."""
        response = client.post("/api/v1/simulate", json={"p": 1.0, "epsilon": 1.0})

        assert response.status_code == 422

    def test_invalid_thresholds(self, client):
        """Thresholds must be positive."""
        response = client.post(
            "/api/v1/simulate",
            json={"p": 2.0, "epsilon": 1.0, "thresholds": [-1.0, 10.0]},
        )

        assert response.status_code == 422
