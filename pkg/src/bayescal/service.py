"""Stateless HTTP facade over the engines for the design-explorer UI.

Endpoints mirror the CLI surface exactly and render through the same
canonical JSON writer, so identical inputs produce byte-identical numeric
output in both front ends. Every non-2xx response body is a single
ApiError object: {"code", "message", "details"}.
"""

from __future__ import annotations

import warnings

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .calibrate import CalibrationTarget, decide, oc_curve, sensitivity_table
from .design import (
    DesignSpec,
    canonical_json,
    prior_from_dict,
    spec_from_dict,
    validate,
)
from .engines import compute_oc
from .errors import BayescalError, PrecisionWarning, SpecValidationError
from .presets import list_presets, preset_document

__all__ = ["create_app", "MAX_ARM_SIZE"]

#: two-arm binary grids grow quadratically; interactive requests are capped
MAX_ARM_SIZE = 1000


class _ApiProblem(Exception):
    def __init__(self, status: int, code: str, message: str,
                 details: list[str] | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []


def _error_response(status: int, code: str, message: str,
                    details: list[str] | None = None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message,
                                 "details": details or []})


def _json_response(payload) -> Response:
    return Response(content=canonical_json(payload),
                    media_type="application/json")


async def _read_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise _ApiProblem(400, "validation", "request body must be valid JSON")
    if not isinstance(body, dict):
        raise _ApiProblem(400, "validation", "request body must be a JSON object")
    return body


def _parse_spec(doc, *, require_threshold: bool) -> DesignSpec:
    try:
        spec = spec_from_dict(doc)
    except SpecValidationError as exc:
        raise _ApiProblem(400, "validation", "invalid design spec", exc.violations)
    violations = validate(spec, require_threshold=require_threshold)
    if violations:
        raise _ApiProblem(400, "validation", "invalid design spec", violations)
    if spec.endpoint == "binary_two_arm" and \
            (spec.n_t > MAX_ARM_SIZE or spec.n_c > MAX_ARM_SIZE):
        raise _ApiProblem(400, "validation",
                          f"two-arm binary designs are limited to {MAX_ARM_SIZE} "
                          "subjects per arm for interactive requests",
                          ["n_t" if spec.n_t > MAX_ARM_SIZE else "n_c"])
    return spec


def _run(fn):
    """Run an engine call, mapping precision warnings to 422 and other
    engine errors to 400."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", PrecisionWarning)
        try:
            return fn()
        except PrecisionWarning as exc:
            raise _ApiProblem(422, "numeric", str(exc))
        except SpecValidationError as exc:
            raise _ApiProblem(400, "validation", "invalid design spec", exc.violations)
        except BayescalError as exc:
            raise _ApiProblem(400, "validation", str(exc))


def create_app() -> FastAPI:
    app = FastAPI(title="bayescal", version="0.1.0", docs_url=None, redoc_url=None)

    @app.exception_handler(_ApiProblem)
    async def handle_problem(_request: Request, exc: _ApiProblem) -> JSONResponse:
        return _error_response(exc.status, exc.code, exc.message, exc.details)

    @app.post("/api/v1/oc")
    async def oc_endpoint(request: Request) -> Response:
        body = await _read_body(request)
        spec = _parse_spec(body, require_threshold=True)
        result = _run(lambda: compute_oc(spec))
        return _json_response(result.to_dict())

    @app.post("/api/v1/curve")
    async def curve_endpoint(request: Request) -> Response:
        body = await _read_body(request)
        if "spec" not in body:
            raise _ApiProblem(400, "validation", "body must carry 'spec' and 'c_grid'",
                              ["spec"])
        grid = body.get("c_grid")
        if not isinstance(grid, list) or not grid or \
                not all(isinstance(c, (int, float)) and not isinstance(c, bool)
                        for c in grid):
            raise _ApiProblem(400, "validation", "c_grid must be a non-empty list "
                              "of thresholds", ["c_grid"])
        spec = _parse_spec(body["spec"], require_threshold=False)
        points = _run(lambda: oc_curve(spec, [float(c) for c in grid]))
        payload = [{"c": c, **oc.to_dict()} for c, oc in points]
        return _json_response(payload)

    @app.post("/api/v1/calibrate")
    async def calibrate_endpoint(request: Request) -> Response:
        body = await _read_body(request)
        if "spec" not in body:
            raise _ApiProblem(400, "validation", "body must carry 'spec' and 'targets'",
                              ["spec"])
        targets_doc = body.get("targets")
        if not isinstance(targets_doc, list) or not targets_doc:
            raise _ApiProblem(400, "validation", "targets must be a non-empty list",
                              ["targets"])
        targets = []
        for i, entry in enumerate(targets_doc):
            if not isinstance(entry, dict) or "metric" not in entry or "level" not in entry:
                raise _ApiProblem(400, "validation",
                                  "each target needs 'metric' and 'level'",
                                  [f"targets[{i}]"])
            try:
                targets.append(CalibrationTarget(str(entry["metric"]),
                                                 float(entry["level"])))
            except (BayescalError, TypeError, ValueError) as exc:
                raise _ApiProblem(400, "validation", str(exc), [f"targets[{i}]"])
        spec = _parse_spec(body["spec"], require_threshold=False)

        scenarios_doc = body.get("scenarios")
        if scenarios_doc is None:
            scenarios = [("design", spec.design_prior)]
        else:
            if not isinstance(scenarios_doc, list) or not scenarios_doc:
                raise _ApiProblem(400, "validation", "scenarios must be a non-empty list",
                                  ["scenarios"])
            scenarios = []
            for i, entry in enumerate(scenarios_doc):
                if not isinstance(entry, dict) or "name" not in entry or "prior" not in entry:
                    raise _ApiProblem(400, "validation",
                                      "each scenario needs 'name' and 'prior'",
                                      [f"scenarios[{i}]"])
                errors: list[str] = []
                prior = prior_from_dict(entry["prior"], f"scenarios[{i}].prior", errors)
                if errors or prior is None:
                    raise _ApiProblem(400, "validation", "invalid scenario prior", errors)
                scenarios.append((str(entry["name"]), prior))

        rows = _run(lambda: sensitivity_table(spec, scenarios, targets))
        return _json_response([row.to_record() for row in rows])

    @app.post("/api/v1/decide")
    async def decide_endpoint(request: Request) -> Response:
        body = await _read_body(request)
        if "spec" not in body or "observed" not in body:
            raise _ApiProblem(400, "validation",
                              "body must carry 'spec' and 'observed'",
                              [k for k in ("spec", "observed") if k not in body])
        observed = body["observed"]
        if not isinstance(observed, dict):
            raise _ApiProblem(400, "validation", "observed must be an object",
                              ["observed"])
        spec = _parse_spec(body["spec"], require_threshold=True)
        record = _run(lambda: decide(spec, observed))
        return _json_response({
            "posterior_probability": record.posterior_probability,
            "threshold": record.threshold,
            "success": record.success,
        })

    @app.get("/api/v1/presets")
    async def presets_endpoint() -> Response:
        return _json_response({"presets": list_presets()})

    @app.get("/api/v1/presets/{name}")
    async def preset_endpoint(name: str) -> Response:
        if name not in list_presets():
            raise _ApiProblem(404, "not_found", f"unknown preset {name!r}")
        return _json_response(preset_document(name))

    return app


app = create_app()
