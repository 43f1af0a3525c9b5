"""FastAPI service exposing maps, traces, and replay snapshots.

Layout under the data directory:
    maps/<map_id>/          map bundles (meta.json + grids)
    traces/<trace_id>.jsonl simulation traces
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import BundleError, MapValidationError, TraceError, UnknownIdError
from ..mapio import (
    document_from_world,
    load_map,
    map_content_hash,
    save_map,
    validate_map,
    world_from_document,
)
from ..trace import TraceReader
from .schemas import (
    EventWindow,
    MapSaved,
    MapSummary,
    SnapshotResponse,
    TraceHeaderDetail,
    TraceSummary,
)

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8642


def _trace_path(data_dir: Path, trace_id: str) -> Path:
    if "/" in trace_id or "\\" in trace_id or ".." in trace_id:
        raise HTTPException(status_code=400, detail=f"bad trace id {trace_id!r}")
    return data_dir / "traces" / f"{trace_id}.jsonl"


def _map_dir(data_dir: Path, map_id: str) -> Path:
    if "/" in map_id or "\\" in map_id or ".." in map_id:
        raise HTTPException(status_code=400, detail=f"bad map id {map_id!r}")
    return data_dir / "maps" / map_id


def _load_map_or_404(data_dir: Path, map_id: str):
    bundle = _map_dir(data_dir, map_id)
    if not (bundle / "meta.json").exists():
        raise HTTPException(status_code=404, detail=f"no map {map_id!r}")
    try:
        return load_map(bundle)
    except (BundleError, MapValidationError) as exc:
        raise HTTPException(status_code=500, detail=f"stored map {map_id!r} is broken: {exc}")


def _reader_or_404(data_dir: Path, trace_id: str) -> TraceReader:
    path = _trace_path(data_dir, trace_id)
    if not path.exists():
        raise HTTPException(status_code=404, detail=f"no trace {trace_id!r}")
    try:
        return TraceReader(path)
    except TraceError as exc:
        raise HTTPException(status_code=500, detail=f"trace {trace_id!r} is broken: {exc}")


def seed_builtin_maps(data_dir: str | Path) -> list[str]:
    """Write the built-in scenario maps into an empty maps directory."""
    from ..scenarios import builtin_scenarios

    data_dir = Path(data_dir)
    written = []
    for scenario in builtin_scenarios().values():
        bundle = data_dir / "maps" / scenario.world.id
        if not (bundle / "meta.json").exists():
            save_map(scenario.world, bundle)
            written.append(scenario.world.id)
    return written


def create_app(
    data_dir: str | Path,
    *,
    static_dir: str | Path | None = None,
    seed_maps: bool = True,
) -> FastAPI:
    data_dir = Path(data_dir)
    (data_dir / "maps").mkdir(parents=True, exist_ok=True)
    (data_dir / "traces").mkdir(parents=True, exist_ok=True)
    if seed_maps:
        seed_builtin_maps(data_dir)

    app = FastAPI(title="townlet", version="0.1.0")
    app.state.data_dir = data_dir

    @app.get("/api/maps", response_model=list[MapSummary])
    def list_maps() -> list[MapSummary]:
        out = []
        maps_root = data_dir / "maps"
        for bundle in sorted(maps_root.iterdir() if maps_root.exists() else []):
            if not (bundle / "meta.json").exists():
                continue
            try:
                world = load_map(bundle)
            except (BundleError, MapValidationError) as exc:
                logger.warning("skipping unreadable map %s: %s", bundle.name, exc)
                continue
            out.append(
                MapSummary(
                    id=world.id,
                    name=world.name,
                    width=world.width,
                    height=world.height,
                    area_count=len(world.areas),
                    item_count=len(world.items),
                    agent_count=len(world.agents),
                )
            )
        return out

    @app.get("/api/maps/{map_id}")
    def get_map(map_id: str) -> dict[str, Any]:
        world = _load_map_or_404(data_dir, map_id)
        doc = document_from_world(world)
        doc["map_hash"] = map_content_hash(world)
        return doc

    @app.put(
        "/api/maps/{map_id}",
        response_model=MapSaved,
        responses={422: {"description": "validation report", "model": None}},
    )
    def put_map(map_id: str, body: dict[str, Any]) -> Any:
        body = dict(body)
        body.setdefault("id", map_id)
        if body["id"] != map_id:
            raise HTTPException(
                status_code=400,
                detail=f"body id {body['id']!r} does not match path id {map_id!r}",
            )
        body.pop("map_hash", None)
        try:
            world = world_from_document(body)
        except BundleError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        report = validate_map(world)
        if not report.ok:  # never persist an invalid map
            return JSONResponse(status_code=422, content=report.to_json())
        save_map(world, _map_dir(data_dir, map_id))
        return MapSaved(id=map_id, map_hash=map_content_hash(world))

    @app.get("/api/traces", response_model=list[TraceSummary])
    def list_traces() -> list[TraceSummary]:
        out = []
        traces_root = data_dir / "traces"
        for path in sorted(traces_root.glob("*.jsonl") if traces_root.exists() else []):
            try:
                header = TraceReader(path).header
            except TraceError as exc:
                logger.warning("skipping unreadable trace %s: %s", path.name, exc)
                continue
            out.append(
                TraceSummary(
                    id=path.stem,
                    map_id=header.map_id,
                    variant=header.variant,
                    scenario_id=header.scenario.get("id"),
                    scenario_name=header.scenario.get("name"),
                    agents=list(header.agents),
                    created=header.created,
                )
            )
        return out

    @app.get("/api/traces/{trace_id}/header", response_model=TraceHeaderDetail)
    def trace_header(trace_id: str) -> TraceHeaderDetail:
        reader = _reader_or_404(data_dir, trace_id)
        events = reader.events()
        return TraceHeaderDetail(
            header=reader.header.to_json(),
            final_tick=reader.final_tick,
            event_count=len(events),
        )

    @app.get("/api/traces/{trace_id}/events", response_model=EventWindow)
    def trace_events(
        trace_id: str,
        from_tick: str | None = Query(default=None, alias="from"),
        to_tick: str | None = Query(default=None, alias="to"),
    ) -> EventWindow:
        reader = _reader_or_404(data_dir, trace_id)
        try:
            lo = int(from_tick) if from_tick is not None else 0
            hi = int(to_tick) if to_tick is not None else reader.final_tick
        except ValueError:
            raise HTTPException(
                status_code=400,
                detail=f"malformed tick range from={from_tick!r} to={to_tick!r}",
            )
        if lo < 0 or hi < lo:
            raise HTTPException(
                status_code=400, detail=f"bad tick range [{lo}, {hi}]"
            )
        events = reader.events(lo, hi)
        return EventWindow(
            trace_id=trace_id,
            from_tick=lo,
            to_tick=hi,
            events=[e.to_json() for e in events],
        )

    @app.get("/api/traces/{trace_id}/snapshot/{tick}", response_model=SnapshotResponse)
    def trace_snapshot(trace_id: str, tick: int) -> SnapshotResponse:
        reader = _reader_or_404(data_dir, trace_id)
        if tick < 0 or tick > reader.final_tick:
            raise HTTPException(
                status_code=400,
                detail=f"tick {tick} outside [0, {reader.final_tick}]",
            )
        world = _load_map_or_404(data_dir, reader.header.map_id)
        try:
            snapshot = reader.snapshot_at(world, tick)
        except TraceError as exc:  # e.g. the stored map drifted since recording
            raise HTTPException(status_code=409, detail=str(exc))
        except UnknownIdError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return SnapshotResponse(trace_id=trace_id, snapshot=snapshot)

    @app.get("/api/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="studio")

    return app
