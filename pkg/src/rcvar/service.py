"""Stateless HTTP facade over the dataset, estimator, and distribution layers.

All endpoints are versioned under ``/api/v1``, speak UTF-8 JSON, and add no
numerical transformation of their own: responses are the library results
serialized at full precision. Errors use the envelope
``{"error": {"code", "field", "message"}}``. The dataset is loaded once and
shared immutably across requests, so request handling is freely concurrent.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__ as _engine_version
from .dataset import Dataset, load_dataset
from .distribution import mean, pdf, quantile, scale_to_mean
from .errors import (
    DatasetError,
    DistributionError,
    EstimationError,
    RcvarError,
    UnknownSelectionError,
)
from .estimator import CompanyProfile, estimate, recommend_action

__all__ = ["create_app", "DEFAULT_ORIGIN_REGEX"]

DEFAULT_ORIGIN_REGEX = r"^https?://(localhost|127\.0\.0\.1)(:\d+)?$"

_DENSITY_POINTS = 256


class EstimateRequest(BaseModel):
    """Estimation inputs; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    valuation: float
    valuation_year: int
    target_year: int
    selections: dict[str, str] = {}
    confidence: float | None = None


def _error_response(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    error: dict = {"code": code, "message": message}
    if field is not None:
        error["field"] = field
    return JSONResponse(status_code=status, content={"error": error})


def _profile_from_request(body: EstimateRequest, dataset: Dataset) -> CompanyProfile | JSONResponse:
    """Build a validated profile, or the error response describing why not."""
    factor_names = {t.factor for t in dataset.factors}
    for factor, parameter in body.selections.items():
        table = dataset.factor(factor) if factor in factor_names else None
        if table is None:
            return _error_response(400, "unknown_factor", f"unknown factor '{factor}'",
                                   field=f"selections.{factor}")
        if table.parameter(parameter) is None:
            return _error_response(
                400, "unknown_parameter",
                f"unknown parameter '{parameter}' for factor '{factor}'",
                field=f"selections.{factor}")
    if not body.valuation > 0:
        return _error_response(422, "invalid_value", "valuation must be positive",
                               field="valuation")
    confidence = 0.95 if body.confidence is None else body.confidence
    if not 0.5 < confidence < 1.0:
        return _error_response(422, "invalid_value", "confidence must lie in (0.5, 1)",
                               field="confidence")
    if body.valuation_year < dataset.constants.base_year:
        return _error_response(
            422, "invalid_value",
            f"valuation_year must not precede the dataset base year "
            f"{dataset.constants.base_year}",
            field="valuation_year")
    return CompanyProfile(
        valuation=body.valuation,
        valuation_year=body.valuation_year,
        target_year=body.target_year,
        selections=dict(body.selections),
        confidence=confidence,
    )


def create_app(dataset: Dataset | None = None, *, dataset_path: str | Path | None = None,
               origins: list[str] | None = None) -> FastAPI:
    """Build the service application around one immutable dataset snapshot.

    Pass a loaded ``dataset``, or a ``dataset_path`` to load at startup; a
    failed load leaves the app serving 503s rather than crashing, so health
    probes can observe the failure. Cross-origin access defaults to
    localhost only.
    """
    load_error: str | None = None
    if dataset is None and dataset_path is not None:
        try:
            dataset = load_dataset(dataset_path)
        except DatasetError as exc:
            load_error = str(exc)

    app = FastAPI(title="rcvar", version=_engine_version, docs_url=None, redoc_url=None)
    if origins:
        app.add_middleware(CORSMiddleware, allow_origins=origins, allow_methods=["*"],
                           allow_headers=["*"])
    else:
        app.add_middleware(CORSMiddleware, allow_origin_regex=DEFAULT_ORIGIN_REGEX,
                           allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = [str(part) for part in first.get("loc", ()) if part != "body"]
        return _error_response(400, "malformed_request", first.get("msg", "invalid request"),
                               field=".".join(loc) or None)

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "http_error")
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RcvarError)
    async def on_library_error(request: Request, exc: RcvarError):
        if isinstance(exc, UnknownSelectionError):
            return _error_response(400, "unknown_factor", str(exc), field=f"selections.{exc.factor}")
        if isinstance(exc, (EstimationError, DistributionError)):
            # inputs that break a numeric invariant downstream (e.g. values
            # large enough to overflow the rescaled distribution)
            return _error_response(422, "invalid_value", str(exc))
        return _error_response(500, "internal_error", str(exc))

    def require_dataset() -> Dataset | JSONResponse:
        if dataset is None:
            return _error_response(503, "dataset_unavailable",
                                   load_error or "no dataset configured")
        return dataset

    @app.get("/api/v1/health")
    async def health():
        if dataset is None:
            return _error_response(503, "dataset_unavailable",
                                   load_error or "no dataset configured")
        return {
            "status": "ok",
            "dataset_id": dataset.dataset_id,
            "dataset_checksum": dataset.checksum,
            "engine_version": _engine_version,
        }

    @app.post("/api/v1/estimate")
    async def estimate_endpoint(body: EstimateRequest):
        ds = require_dataset()
        if isinstance(ds, JSONResponse):
            return ds
        profile = _profile_from_request(body, ds)
        if isinstance(profile, JSONResponse):
            return profile
        return estimate(profile, ds).to_dict()

    @app.get("/api/v1/factors")
    async def factors_endpoint():
        ds = require_dataset()
        if isinstance(ds, JSONResponse):
            return ds
        factors = []
        for table in ds.factors:
            factors.append({
                "factor": table.factor,
                "parameters": [
                    {
                        "name": p.name,
                        "ratio": p.ratio,
                        "estimated": p.estimated,
                        "sources": sorted({obs.report_id for obs in p.observations}),
                        "years": sorted({obs.year for obs in p.observations}),
                    }
                    for p in table.parameters
                ],
            })
        return {"factors": factors}

    @app.get("/api/v1/distribution")
    async def distribution_endpoint(expected_cost: float, confidence: float = 0.95):
        ds = require_dataset()
        if isinstance(ds, JSONResponse):
            return ds
        if not expected_cost > 0:
            return _error_response(400, "invalid_value", "expected_cost must be positive",
                                   field="expected_cost")
        if not 0.5 < confidence < 1.0:
            return _error_response(400, "invalid_value", "confidence must lie in (0.5, 1)",
                                   field="confidence")
        dist = scale_to_mean(ds.reference_fit(), expected_cost)
        # the grid is built in standardized coordinates so that rescaling the
        # expected cost rescales every point cost exactly linearly
        upper_q = max(0.999, confidence)
        z_upper = (quantile(upper_q, dist) - dist.loc) / dist.scale
        points = []
        for i in range(_DENSITY_POINTS):
            z = z_upper * i / (_DENSITY_POINTS - 1)
            cost = dist.loc + dist.scale * z
            points.append({"cost": cost, "density": pdf(cost, dist)})
        return {
            "points": points,
            "var_quantile": quantile(confidence, dist),
            "confidence": confidence,
            "expected_cost": mean(dist),
        }

    @app.post("/api/v1/recommend")
    async def recommend_endpoint(body: EstimateRequest):
        ds = require_dataset()
        if isinstance(ds, JSONResponse):
            return ds
        profile = _profile_from_request(body, ds)
        if isinstance(profile, JSONResponse):
            return profile
        return {"recommendations": [r.to_dict() for r in recommend_action(profile, ds)]}

    return app
