"""HTTP render service: submit jobs, poll status, fetch result images.

Jobs validate synchronously on submission (same diagnostics as the CLI
`validate` command), queue FIFO, and run on a small worker pool capped by
ATLASPAINT_THREADS.  Artifacts live in a spool directory, garbage-collected
by age.  No authentication: this is a local/lab tool.
"""

from __future__ import annotations

import os
import queue
import secrets
import shutil
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .atlas import AtlasManifest
from .biomarker import BiomarkerError
from .camera import INNER_VIEWS, VIEWS
from .colormap import OutOfRange
from .compose import render_animation, render_job, render_montage, safe_name
from .config import Config, ConfigError, build_render_job, build_table, validate_config_dict

DEFAULT_QUEUE_CAP = 64
DEFAULT_CSV_CAP = 10 * 1024 * 1024  # bytes
DEFAULT_RETENTION_HOURS = 24.0

_MEDIA_TYPES = {".png": "image/png", ".gif": "image/gif"}


def worker_count() -> int:
    """Render worker cap: ATLASPAINT_THREADS or the hardware parallelism."""
    env = os.environ.get("ATLASPAINT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


@dataclass
class JobRecord:
    job_id: str
    status: str = "queued"  # queued -> running -> done | error
    submitted_at: float = field(default_factory=time.time)
    images: list[str] = field(default_factory=list)
    error_message: str | None = None

    def to_json(self) -> dict:
        stamp = datetime.fromtimestamp(self.submitted_at, tz=timezone.utc)
        return {
            "job_id": self.job_id,
            "status": self.status,
            "submitted_at": stamp.isoformat(),
            "images": list(self.images),
            "error_message": self.error_message,
        }


class _State:
    def __init__(self, spool_dir: Path, queue_cap: int, retention_hours: float):
        self.spool_dir = spool_dir
        self.retention_seconds = retention_hours * 3600.0
        self.jobs: dict[str, JobRecord] = {}
        self.lock = threading.Lock()
        self.queue: queue.Queue = queue.Queue(maxsize=queue_cap)
        self.workers: list[threading.Thread] = []

    def gc_spool(self) -> None:
        cutoff = time.time() - self.retention_seconds
        if not self.spool_dir.is_dir():
            return
        for child in self.spool_dir.iterdir():
            if child.is_dir() and child.stat().st_mtime < cutoff:
                shutil.rmtree(child, ignore_errors=True)
                with self.lock:
                    self.jobs.pop(child.name, None)


def _error(status_code: int, message: str, key: str | None = None) -> JSONResponse:
    body = {"error": message}
    if key is not None:
        body["key"] = key
    return JSONResponse(body, status_code=status_code)


def _run_one(state: _State, record: JobRecord, cfg: Config,
             manifest: AtlasManifest, csv_text: str, job_dir: Path) -> None:
    with state.lock:
        record.status = "running"
    try:
        # client-supplied prefixes must not steer writes out of the job dir
        job = build_render_job(cfg, manifest, csv_text,
                               job_dir / safe_name(cfg.prefix))
        if cfg.mode == "montage":
            files = [render_montage(job, pad=cfg.montage_pad)]
        elif cfg.mode == "animation":
            view = cfg.animation_view or job.views[0]
            files = [render_animation(job, view, frames_per_transition=cfg.fpt,
                                      delay_cs=cfg.delay_cs, dither=cfg.dither)]
        else:
            files = render_job(job)
        with state.lock:
            record.images = [f.name for f in files]
            record.status = "done"
    except Exception as exc:  # any failure marks the job, never the worker
        with state.lock:
            record.status = "error"
            record.error_message = str(exc)


def _worker_loop(state: _State) -> None:
    while True:
        item = state.queue.get()
        if item is None:
            return
        _run_one(state, *item)
        state.queue.task_done()


def create_app(
    registry: dict[str, AtlasManifest],
    spool_dir,
    *,
    queue_cap: int = DEFAULT_QUEUE_CAP,
    csv_cap: int = DEFAULT_CSV_CAP,
    workers: int | None = None,
    cors_origin: str | None = None,
    ui_dir=None,
    retention_hours: float = DEFAULT_RETENTION_HOURS,
) -> FastAPI:
    """Assemble the render-service app around a manifest registry."""
    spool_dir = Path(spool_dir)
    spool_dir.mkdir(parents=True, exist_ok=True)
    state = _State(spool_dir, queue_cap, retention_hours)
    n_workers = worker_count() if workers is None else workers

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        for _ in range(n_workers):
            t = threading.Thread(target=_worker_loop, args=(state,), daemon=True)
            t.start()
            state.workers.append(t)
        yield
        for _ in state.workers:
            state.queue.put(None)

    app = FastAPI(title="atlaspaint render service", lifespan=lifespan)
    app.state.render_state = state

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.post("/api/v1/jobs", status_code=201)
    async def submit_job(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        csv_text = body.get("csv")
        if not isinstance(csv_text, str):
            return _error(400, "csv: expected CSV text", key="csv")
        if len(csv_text.encode("utf-8")) > csv_cap:
            return _error(413, f"csv exceeds the {csv_cap} byte cap", key="csv")
        cfg_doc = body.get("config", {})
        try:
            cfg = validate_config_dict(cfg_doc)
        except ConfigError as exc:
            return _error(400, str(exc), key=exc.key)
        if not cfg.atlas:
            return _error(400, "atlas: name a registered atlas", key="atlas")
        manifest = registry.get(cfg.atlas)
        if manifest is None:
            known = ", ".join(sorted(registry)) or "none registered"
            return _error(400, f"atlas: unknown atlas {cfg.atlas!r} ({known})",
                          key="atlas")
        try:
            table = build_table(cfg, manifest, csv_text)
        except (BiomarkerError, OutOfRange) as exc:
            return _error(400, str(exc), key="csv")
        if cfg.mode == "animation" and len(table.stages) < 2:
            return _error(400, "animation needs at least two stages", key="mode")
        for view in cfg.views:
            if manifest.hollow and view in INNER_VIEWS:
                return _error(400, f"views: {view!r} unsupported for hollow atlas "
                                   f"{manifest.atlas_id!r}", key="views")

        state.gc_spool()
        job_id = secrets.token_hex(8)
        record = JobRecord(job_id)
        job_dir = spool_dir / job_id
        try:
            state.queue.put_nowait((record, cfg, manifest, csv_text, job_dir))
        except queue.Full:
            return _error(503, f"job queue is full (cap {queue_cap})")
        job_dir.mkdir(parents=True, exist_ok=True)
        with state.lock:
            state.jobs[job_id] = record
        return JSONResponse({"job_id": job_id}, status_code=201)

    @app.get("/api/v1/jobs/{job_id}")
    async def job_status(job_id: str):
        with state.lock:
            record = state.jobs.get(job_id)
            if record is None:
                return _error(404, f"unknown job {job_id!r}")
            return JSONResponse(record.to_json())

    @app.get("/api/v1/jobs/{job_id}/images/{name}")
    async def job_image(job_id: str, name: str):
        with state.lock:
            record = state.jobs.get(job_id)
            if record is None:
                return _error(404, f"unknown job {job_id!r}")
            status = record.status
            # allow-list lookup only; image names never touch path resolution
            known = name in record.images
        if status != "done":
            return _error(409, f"job {job_id!r} is {status}, not done")
        if not known:
            return _error(404, f"no image {name!r} in job {job_id!r}")
        data = (spool_dir / job_id / name).read_bytes()
        media = _MEDIA_TYPES.get(Path(name).suffix.lower(), "application/octet-stream")
        return Response(content=data, media_type=media)

    @app.get("/api/v1/atlases")
    async def list_atlases():
        out = []
        for atlas_id in sorted(registry):
            manifest = registry[atlas_id]
            views = [v for v in VIEWS
                     if not (manifest.hollow and v in INNER_VIEWS)]
            out.append({
                "atlas_id": atlas_id,
                "views_supported": views,
                "regions": len({e.region_id for e in manifest.regions}),
            })
        return JSONResponse(out)

    ui = Path(ui_dir) if ui_dir else None
    if ui is None and Path("frontend/dist").is_dir():
        ui = Path("frontend/dist")
    if ui is not None and ui.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui, html=True), name="ui")
    return app
