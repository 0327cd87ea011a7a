"""HTTP analytics service: stateless query endpoints over immutable
persisted datasets.  All responses are canonical JSON; errors use
``{"code", "message", "details"}``."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import queries
from .canonical import canonical_dumps
from .config import ServiceConfig
from .discovery import EdgeStat
from .events import (
    EmptyDataset,
    PreprocessConfig,
    TemplateError,
    UnknownAdapter,
)
from .filters import InvalidSpec, MissingClusters
from .clustering import EmptyInput, KTooLarge, LengthMismatch
from .discovery import UnknownTrainee
from .store import DatasetStore, DuplicateDataset, UnknownDataset

import json

log = logging.getLogger("ctfminer.service")


def _error(status: int, code: str, message: str, details=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details},
    )


def _canonical(doc: dict, status: int = 200) -> Response:
    return Response(
        content=canonical_dumps(doc), media_type="application/json", status_code=status
    )


def create_app(data_dir: str | Path, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="ctf-miner analysis service", version="0.1.0")
    store = DatasetStore(Path(data_dir))
    app.state.store = store

    @app.exception_handler(UnknownDataset)
    async def _unknown_dataset(_, exc):
        return _error(404, "UnknownDataset", f"no dataset {exc.args[0]!r}")

    @app.exception_handler(DuplicateDataset)
    async def _duplicate(_, exc):
        return _error(409, "DuplicateId", f"dataset {exc.args[0]!r} already exists")

    @app.exception_handler(InvalidSpec)
    async def _invalid_spec(_, exc: InvalidSpec):
        return _error(422, "InvalidSpec", str(exc), exc.report.to_json())

    @app.exception_handler(UnknownAdapter)
    async def _unknown_adapter(_, exc):
        return _error(400, "UnknownAdapter", f"no adapter {exc.args[0]!r}")

    @app.exception_handler(EmptyDataset)
    async def _empty(_, exc):
        return _error(400, "EmptyDataset", "upload produced no events")

    for exc_type, code in (
        (KTooLarge, "KTooLarge"),
        (EmptyInput, "EmptyInput"),
        (LengthMismatch, "LengthMismatch"),
        (UnknownTrainee, "UnknownTrainee"),
        (MissingClusters, "MissingClusters"),
        (TemplateError, "TemplateError"),
    ):
        def _make(code=code):
            async def handler(_, exc):
                return _error(422, code, str(exc))
            return handler
        app.add_exception_handler(exc_type, _make())

    @app.exception_handler(ValueError)
    async def _value_error(_, exc):
        return _error(422, "InvalidRequest", str(exc))

    @app.get("/datasets")
    async def list_datasets():
        return _canonical({"datasets": [r.to_json() for r in store.list()]})

    @app.post("/datasets")
    async def upload_dataset(
        file: UploadFile = File(...),
        dataset_id: str = Form(...),
        adapter_id: str = Form("normalized"),
        name: str = Form(None),
        preprocess: str = Form(None),
    ):
        cfg = PreprocessConfig.from_json(json.loads(preprocess)) if preprocess else None
        raw = (await file.read()).decode("utf-8").splitlines()
        record = store.create(dataset_id, raw, adapter_id, name=name, preprocess_config=cfg)
        return _canonical(record.to_json(), status=201)

    @app.get("/datasets/{dataset_id}/summary")
    async def summary(dataset_id: str):
        return _canonical(store.get(dataset_id).to_json())

    @app.delete("/datasets/{dataset_id}")
    async def delete(dataset_id: str):
        store.delete(dataset_id)
        return _canonical({"deleted": dataset_id})

    def _query_endpoint(name: str):
        fn = queries.QUERIES[name]

        async def endpoint(dataset_id: str, request: Request):
            body = await request.body()
            req = json.loads(body) if body else {}
            return _canonical(fn(store.load_log(dataset_id), req))

        endpoint.__name__ = f"query_{name}"
        return endpoint

    for name in ("graph", "sentiment", "clusters", "elbow", "matrix", "proximity", "overview"):
        app.post(f"/datasets/{{dataset_id}}/{name}")(_query_endpoint(name))

    @app.get("/datasets/{dataset_id}/export/dot")
    async def export_dot(dataset_id: str, mode: str = "frequency", stat: str = "median"):
        doc = queries.graph_query(
            store.load_log(dataset_id),
            {"mode": mode, "stat": stat, "include_dot": True},
        )
        return Response(content=doc["dot"], media_type="text/vnd.graphviz")

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app


def serve(config: ServiceConfig, static_dir: Optional[str] = None) -> None:
    import uvicorn

    logging.basicConfig(level=config.log_level.upper())
    app = create_app(config.data_dir, static_dir=static_dir)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level=config.log_level)
