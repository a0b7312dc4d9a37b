"""HTTP front end: query endpoint, streaming download, upload-to-ingest,
and catalog listing.

Query errors pass through with the engine's message byte-for-byte, so a
console user sees exactly what a CLI user would.  Downloads resolve strictly
inside the data directory and stream in fixed-size chunks.
"""

from __future__ import annotations

import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from .errors import (
    DuplicateFile,
    IoFailure,
    MalformedBlock,
    MalformedName,
    QueryError,
    StaleIndex,
)
from .ingest import ingest_file
from .logmodel import parse_filename
from .metastore import Metastore
from .query import CATALOG, execute_sql

_CHUNK_SIZE = 64 * 1024
_MAX_QUERY_WORKERS = 32

log = logging.getLogger("cnicloud.server")


@dataclass
class ServerConfig:
    data_dir: Path
    port: int = 8070
    workers: int = 1
    max_upload_bytes: int = 64 * 1024 * 1024
    max_result_rows: int = 10_000
    static_dir: Path | None = None

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if not self.data_dir.is_dir():
            raise ValueError(f"data directory {self.data_dir} does not exist")
        if self.port <= 0 or self.workers <= 0:
            raise ValueError("port and workers must be positive")
        if self.max_upload_bytes <= 0 or self.max_result_rows <= 0:
            raise ValueError("limits must be positive")


class QueryRequest(BaseModel):
    sql: str
    workers: int | None = None


def create_app(store: Metastore, config: ServerConfig) -> FastAPI:
    app = FastAPI(title="cnicloud", docs_url=None, redoc_url=None)
    ingest_lock = threading.Lock()
    data_root = config.data_dir.resolve()

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        log.info(
            '{"method": "%s", "path": "%s", "status": %d, "ms": %.1f}',
            request.method,
            request.url.path,
            response.status_code,
            (time.perf_counter() - start) * 1000,
        )
        return response

    @app.post("/query")
    def query(req: QueryRequest):
        workers = req.workers if req.workers else config.workers
        workers = max(1, min(workers, _MAX_QUERY_WORKERS))
        try:
            rs = execute_sql(req.sql, store, workers)
        except QueryError as exc:
            return JSONResponse(
                status_code=400,
                content={
                    "kind": exc.kind,
                    "position": exc.position,
                    "message": exc.message,
                },
            )
        except (IoFailure, StaleIndex) as exc:
            return JSONResponse(
                status_code=500,
                content={"kind": type(exc).__name__, "message": str(exc)},
            )
        truncated = len(rs.rows) > config.max_result_rows
        rows = rs.rows[: config.max_result_rows] if truncated else rs.rows
        return {
            "columns": rs.columns,
            "rows": [list(row) for row in rows],
            "truncated": truncated,
            "stats": {
                "rows_scanned": rs.stats.rows_scanned,
                "body_resolutions": rs.stats.body_resolutions,
                "elapsed": rs.stats.elapsed,
                "row_count": len(rs.rows),
            },
        }

    def _resolve_download(raw: str) -> Path | None:
        """Map a request path into the data directory; None means forbidden."""
        try:
            candidate = Path(os.path.join(data_root, raw)).resolve()
        except (OSError, ValueError):
            return None
        if candidate != data_root and data_root not in candidate.parents:
            return None
        return candidate

    @app.get("/download")
    def download(path: str = ""):
        target = _resolve_download(path)
        if target is None:
            return JSONResponse(
                status_code=403,
                content={"message": f"path {path!r} escapes the data directory"},
            )
        if not target.is_file():
            return JSONResponse(
                status_code=404, content={"message": f"no such file: {path}"}
            )
        size = target.stat().st_size
        media = "text/plain" if target.suffix == ".log" else "application/octet-stream"

        def stream():
            with open(target, "rb") as fh:
                while chunk := fh.read(_CHUNK_SIZE):
                    yield chunk

        return StreamingResponse(
            stream(),
            media_type=media,
            headers={
                "Content-Length": str(size),
                "Content-Disposition": f'attachment; filename="{target.name}"',
            },
        )

    @app.post("/upload", status_code=201)
    def upload(file: UploadFile):
        name = os.path.basename(file.filename or "")
        try:
            parse_filename(name)
        except MalformedName as exc:
            return JSONResponse(
                status_code=400,
                content={"kind": "MalformedName", "message": str(exc)},
            )
        target = data_root / name
        if store.has_file(str(target)) or target.exists():
            return JSONResponse(
                status_code=409,
                content={"kind": "DuplicateFile", "message": f"{name} already uploaded"},
            )
        tmp_fd, tmp_name = tempfile.mkstemp(prefix=".upload-", dir=data_root)
        total = 0
        try:
            with os.fdopen(tmp_fd, "wb") as out:
                while chunk := file.file.read(_CHUNK_SIZE):
                    total += len(chunk)
                    if total > config.max_upload_bytes:
                        return JSONResponse(
                            status_code=413,
                            content={
                                "kind": "Oversize",
                                "message": f"upload exceeds"
                                f" {config.max_upload_bytes} bytes",
                            },
                        )
                    out.write(chunk)
            os.replace(tmp_name, target)
        finally:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
        with ingest_lock:
            try:
                filerec, n_messages = ingest_file(str(target), store)
            except (MalformedName, MalformedBlock) as exc:
                target.unlink(missing_ok=True)
                return JSONResponse(
                    status_code=400,
                    content={"kind": type(exc).__name__, "message": str(exc)},
                )
            except DuplicateFile as exc:
                # A concurrent upload won the race; its file stays.
                return JSONResponse(
                    status_code=409,
                    content={"kind": "DuplicateFile", "message": str(exc)},
                )
        return {
            "filerecord": {
                "Filepath": filerec.filepath,
                "Phone": filerec.phone,
                "Carrier": filerec.carrier,
                "Time": filerec.time,
            },
            "n_messages": n_messages,
        }

    @app.get("/tables")
    def tables():
        return {
            "tables": [
                {
                    "name": "tFile",
                    "columns": list(CATALOG["tFile"]),
                    "row_count": store.tfile_count,
                },
                {
                    "name": "tMsg",
                    "columns": list(CATALOG["tMsg"]),
                    "row_count": store.tmsg_count,
                },
            ]
        }

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/", StaticFiles(directory=config.static_dir, html=True), name="console"
        )

    return app
