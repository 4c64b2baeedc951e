"""HTTP JSON service exposing the design engine, plus the web console assets.

Request bodies are validated by hand against the shared JSON schema; domain
errors map to structured {"error": {"field", "message"}} payloads with 400
(invalid input), 404 (unknown document), 409 (ordering conflict), or 500.
Long computations can be submitted as background jobs polled at /jobs/{id};
the worker pool is deliberately small so jobs never starve the event loop.
"""

from __future__ import annotations

import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import render, serialize
from .design import TrialData, interim_decision
from .errors import (
    Bop2teError,
    ConflictError,
    MissingResultError,
    NotFoundError,
    SizeLimitError,
    ValidationError,
)
from .mc import estimate_oc, simulate_multidose
from .oc import operating_characteristics, phi_sensitivity_curve
from .search import global_boundary_search, optimize
from .store import Store


def _error_payload(exc: Bop2teError) -> dict:
    payload = {"message": str(exc)}
    if isinstance(exc, ValidationError):
        payload = {"field": exc.field, "message": exc.message}
    return {"error": payload}


class _Jobs:
    """In-process job registry backed by a two-worker thread pool."""

    def __init__(self):
        self._executor = ThreadPoolExecutor(max_workers=2)
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}

    def submit(self, fn) -> str:
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {"status": "pending", "result": None, "error": None}

        def run():
            with self._lock:
                self._jobs[job_id]["status"] = "running"
            try:
                result = fn()
            except Bop2teError as exc:
                with self._lock:
                    self._jobs[job_id].update(status="error", error=_error_payload(exc)["error"])
            except Exception as exc:  # pragma: no cover - defensive
                with self._lock:
                    self._jobs[job_id].update(status="error", error={"message": str(exc)})
            else:
                with self._lock:
                    self._jobs[job_id].update(status="done", result=result)

        self._executor.submit(run)
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise NotFoundError(f"no job with id {job_id!r}")
            return dict(job)


def _document_payload(doc) -> dict:
    return {
        "id": doc.id,
        "spec": serialize.spec_to_dict(doc.spec),
        "spec_hash": doc.spec_hash,
        "result": None if doc.result is None else serialize.result_to_dict(doc.result),
        "result_hash": doc.result_hash,
        "annotation": doc.annotation,
        "created_at": doc.created_at,
        "updated_at": doc.updated_at,
    }


def _frontend_dir() -> Path | None:
    candidates = []
    env = os.environ.get("BOP2TE_FRONTEND")
    if env:
        candidates.append(Path(env))
    candidates.append(Path.cwd() / "frontend" / "dist")
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir():
            return candidate
    return None


def _require_result(doc):
    if doc.result is None:
        raise MissingResultError(f"design {doc.id} has no stored optimization result")
    return doc.result


def create_app(store_path: str | None = None) -> FastAPI:
    app = FastAPI(title="bop2te", docs_url=None, redoc_url=None)
    store = Store(store_path)
    jobs = _Jobs()

    @app.exception_handler(Bop2teError)
    async def domain_error_handler(_: Request, exc: Bop2teError):
        status = 400
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, ConflictError):
            status = 409
        elif isinstance(exc, MissingResultError):
            status = 404
        elif isinstance(exc, SizeLimitError):
            status = 400
        return JSONResponse(_error_payload(exc), status_code=status)

    @app.exception_handler(Exception)
    async def unexpected_error_handler(_: Request, exc: Exception):
        return JSONResponse({"error": {"message": str(exc)}}, status_code=500)

    async def _body(request: Request) -> dict:
        try:
            obj = await request.json()
        except Exception:
            raise ValidationError("body", "request body must be a JSON object")
        if not isinstance(obj, dict):
            raise ValidationError("body", "request body must be a JSON object")
        return obj

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    def _optimize_and_store(spec, method, grid, annotation):
        if method == "global":
            result = global_boundary_search(spec, practical_constraint=False)
        elif method == "global-practical":
            result = global_boundary_search(spec, practical_constraint=True)
        elif method == "grid":
            result = optimize(spec, grid_variant=grid)
        else:
            raise ValidationError("method", f"unknown method {method!r}")
        doc = store.save_design(spec, result, annotation)
        return _document_payload(doc)

    @app.post("/designs")
    async def create_design(request: Request):
        obj = await _body(request)
        spec = serialize.parse_design_spec(
            obj["spec"] if isinstance(obj.get("spec"), dict) else obj
        )
        method = obj.get("method", "grid")
        grid = obj.get("grid", "compact")
        annotation = obj.get("annotation", "")
        if obj.get("background"):
            job_id = jobs.submit(lambda: _optimize_and_store(spec, method, grid, annotation))
            return JSONResponse({"job_id": job_id}, status_code=202)
        return _optimize_and_store(spec, method, grid, annotation)

    @app.get("/designs")
    async def list_designs():
        return {"designs": [_document_payload(doc) for doc in store.list_designs()]}

    @app.get("/designs/{design_id}")
    async def get_design(design_id: str):
        return _document_payload(store.get_design(design_id))

    @app.post("/designs/{design_id}/oc")
    async def design_oc(design_id: str, request: Request):
        obj = await _body(request)
        doc = store.get_design(design_id)
        result = _require_result(doc)

        def compute():
            payload = {
                "design_id": doc.id,
                "boundaries": serialize.boundaries_to_dict(result.boundaries),
                "oc": {
                    code: serialize.oc_to_dict(
                        operating_characteristics(doc.spec, result.boundaries, doc.spec.hypothesis(code))
                    )
                    for code in ("h00", "h01", "h10", "h11")
                },
            }
            if obj.get("mc") is not None:
                config = serialize.parse_simulation_config(obj["mc"])
                payload["mc"] = {
                    code: serialize.mc_oc_to_dict(
                        estimate_oc(doc.spec, result.boundaries, doc.spec.hypothesis(code), config)
                    )
                    for code in ("h00", "h01", "h10", "h11")
                }
            if obj.get("phi_grid") is not None:
                phis = obj["phi_grid"]
                if not isinstance(phis, list) or not all(
                    isinstance(p, (int, float)) and not isinstance(p, bool) for p in phis
                ):
                    raise ValidationError("phi_grid", f"expected a list of numbers, got {phis}")
                payload["phi_curve"] = phi_sensitivity_curve(
                    doc.spec, result.boundaries, [float(p) for p in phis]
                )
            return payload

        if obj.get("background"):
            return JSONResponse({"job_id": jobs.submit(compute)}, status_code=202)
        return compute()

    @app.post("/designs/{design_id}/decisions")
    async def post_decision(design_id: str, request: Request):
        obj = await _body(request)
        doc = store.get_design(design_id)
        result = _require_result(doc)
        data = serialize.parse_trial_data(obj)
        decision = interim_decision(doc.spec, result.boundaries, data, result.q)
        store.add_decision(
            design_id, data.n, data.x_e, data.x_t, decision.decision, decision.reasons
        )
        return serialize.decision_to_dict(decision)

    @app.get("/designs/{design_id}/decisions")
    async def get_decisions(design_id: str):
        entries = store.decisions(design_id)
        return {
            "decisions": [
                {
                    "design_id": e.design_id,
                    "n": e.n,
                    "x_e": e.x_e,
                    "x_t": e.x_t,
                    "decision": e.decision,
                    "reasons": list(e.reasons),
                    "recorded_at": e.recorded_at,
                }
                for e in entries
            ]
        }

    @app.get("/designs/{design_id}/protocol")
    async def get_protocol(design_id: str):
        doc = store.get_design(design_id)
        result = _require_result(doc)
        return PlainTextResponse(render.protocol_text(doc.id, doc.spec, result, doc.annotation))

    @app.post("/simulations/multidose")
    async def post_multidose(request: Request):
        obj = await _body(request)
        dspec = serialize.parse_dose_spec(obj)
        config = serialize.parse_simulation_config(
            {
                "replicates": obj.get("replicates"),
                "seed": obj.get("seed", 0),
                "truth": obj.get("truth"),
            }
        )
        if config.truth is None:
            raise ValidationError("truth", "missing required field")

        def compute():
            result = simulate_multidose(dspec, config.truth, config)
            return {
                "dose_spec": serialize.dose_spec_to_dict(dspec),
                "boundaries": serialize.boundaries_to_dict(dspec.resolve_boundaries()),
                "config": {"replicates": config.replicates, "seed": config.seed},
                "result": serialize.multidose_result_to_dict(result),
            }

        if obj.get("background"):
            return JSONResponse({"job_id": jobs.submit(compute)}, status_code=202)
        return compute()

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str):
        return jobs.get(job_id)

    frontend = _frontend_dir()
    if frontend is not None:
        app.mount("/", StaticFiles(directory=str(frontend), html=True), name="console")

    return app
