"""Request/response bodies for the HTTP API."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class MapSummary(BaseModel):
    id: str
    name: str
    width: int
    height: int
    area_count: int
    item_count: int
    agent_count: int


class ViolationModel(BaseModel):
    code: str
    subject: str
    message: str


class ValidationReportModel(BaseModel):
    ok: bool
    violations: list[ViolationModel] = Field(default_factory=list)


class MapSaved(BaseModel):
    ok: bool = True
    id: str
    map_hash: str


class TraceSummary(BaseModel):
    id: str
    map_id: str
    variant: str
    scenario_id: str | None = None
    scenario_name: str | None = None
    agents: list[str]
    created: str


class TraceHeaderDetail(BaseModel):
    header: dict[str, Any]
    final_tick: int
    event_count: int


class EventWindow(BaseModel):
    trace_id: str
    from_tick: int
    to_tick: int
    events: list[dict[str, Any]]


class SnapshotResponse(BaseModel):
    trace_id: str
    snapshot: dict[str, Any]


class ErrorBody(BaseModel):
    detail: str
