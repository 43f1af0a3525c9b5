"""Append-only run traces: one JSON header line, then one JSON line per event.

The trace is the only artifact a run leaves behind; anything the viewer or
judge needs must be reconstructible from it plus the map bundle. Replaying
events over the map's initial state yields the dynamic state at any tick.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .errors import TraceError, UnknownIdError
from .mapio import map_content_hash
from .world import InBag, WorldMap

TRACE_FORMAT_VERSION = 1
CHECKPOINT_INTERVAL = 500  # ticks between in-memory snapshot checkpoints

EVENT_KINDS = (
    "Move",
    "ActionStart",
    "ActionEnd",
    "PickUp",
    "PutDown",
    "DialogueStart",
    "DialogueUtterance",
    "DialogueEnd",
    "PlanCreated",
    "PerceptionBatch",
    "LlmCall",
    "Warning",
    "StatusChange",
)


@dataclass(frozen=True)
class SimEvent:
    tick: int
    seq: int  # emission order within the tick
    kind: str
    agent: str | None
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "event",
            "tick": self.tick,
            "seq": self.seq,
            "kind": self.kind,
            "agent": self.agent,
            "data": self.data,
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "SimEvent":
        return SimEvent(
            tick=int(doc["tick"]),
            seq=int(doc["seq"]),
            kind=str(doc["kind"]),
            agent=doc.get("agent"),
            data=doc.get("data", {}),
        )


@dataclass(frozen=True)
class TraceHeader:
    map_id: str
    map_hash: str
    scenario: dict[str, Any]  # id/name/host/participants/event fields
    variant: str
    seed: int
    minutes_per_tick: int
    start_time: str  # simulated clock at tick 0, "HH:MM"
    backend_kind: str
    created: str  # simulated start timestamp (deterministic, not wall clock)
    agents: tuple[str, ...]
    format_version: int = TRACE_FORMAT_VERSION

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "header",
            "format_version": self.format_version,
            "map_id": self.map_id,
            "map_hash": self.map_hash,
            "scenario": self.scenario,
            "variant": self.variant,
            "seed": self.seed,
            "minutes_per_tick": self.minutes_per_tick,
            "start_time": self.start_time,
            "backend_kind": self.backend_kind,
            "created": self.created,
            "agents": list(self.agents),
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "TraceHeader":
        if doc.get("type") != "header":
            raise TraceError("first line is not a trace header")
        if doc.get("format_version") != TRACE_FORMAT_VERSION:
            raise TraceError(f"unsupported trace format version {doc.get('format_version')!r}")
        return TraceHeader(
            map_id=doc["map_id"],
            map_hash=doc["map_hash"],
            scenario=doc.get("scenario", {}),
            variant=doc["variant"],
            seed=int(doc["seed"]),
            minutes_per_tick=int(doc["minutes_per_tick"]),
            start_time=doc["start_time"],
            backend_kind=doc["backend_kind"],
            created=doc["created"],
            agents=tuple(doc.get("agents", ())),
        )


def _dump_line(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


class TraceWriter:
    """Streams events to disk; flushes at tick boundaries so a concurrent
    reader only ever sees whole lines (plus at most one partial line)."""

    def __init__(self, path: str | Path, header: TraceHeader) -> None:
        self.path = Path(path)
        self.header = header
        self._file = self.path.open("w", encoding="utf-8", newline="\n")
        self._file.write(_dump_line(header.to_json()))
        self._last_tick = -1

    def append(self, events: Iterable[SimEvent]) -> None:
        for event in events:
            if event.kind not in EVENT_KINDS:
                raise TraceError(f"unknown event kind {event.kind!r}")
            if event.tick < self._last_tick:
                raise TraceError(f"tick regression: {event.tick} after {self._last_tick}")
            if event.tick > self._last_tick:
                self._file.flush()
                self._last_tick = event.tick
            self._file.write(_dump_line(event.to_json()))

    def close(self) -> None:
        if not self._file.closed:
            self._file.flush()
            self._file.close()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def initial_snapshot(world: WorldMap) -> dict[str, Any]:
    """Dynamic state at tick 0 before anything happened."""
    from .mapio import _placement_json  # same JSON form as bundles

    return {
        "tick": 0,
        "agents": {
            ag.id: {
                "pos": [ag.start_pos.x, ag.start_pos.y],
                "status": "Idle",
                "current_action": None,
            }
            for ag in world.agents.values()
        },
        "items": {it.id: _placement_json(it.placement) for it in world.items.values()},
        "dialogues": [],
    }


def _apply_event(state: dict[str, Any], event: SimEvent) -> None:
    agents = state["agents"]
    items = state["items"]
    match event.kind:
        case "Move":
            entry = agents[event.agent]
            entry["pos"] = list(event.data["to"])
            entry["status"] = event.data["status"]
        case "PickUp":
            items[event.data["item"]] = {"kind": "bag", "agent_id": event.agent}
            agents[event.agent]["status"] = event.data["status"]
        case "PutDown":
            items[event.data["item"]] = event.data["placement"]
        case "ActionStart":
            entry = agents[event.agent]
            entry["status"] = "Executing"
            entry["current_action"] = event.data["description"]
        case "ActionEnd":
            entry = agents[event.agent]
            entry["status"] = "Idle"
            entry["current_action"] = None
        case "StatusChange":
            entry = agents[event.agent]
            entry["status"] = event.data["status"]
            entry["current_action"] = event.data["current_action"]
        case "DialogueStart":
            for participant in event.data["participants"]:
                agents[participant]["status"] = "InDialogue"
            state["dialogues"].append(
                {
                    "id": event.data["session"],
                    "participants": list(event.data["participants"]),
                    "topic": event.data["topic"],
                    "utterances": 0,
                }
            )
        case "DialogueUtterance":
            for session in state["dialogues"]:
                if session["id"] == event.data["session"]:
                    session["utterances"] += 1
        case "DialogueEnd":
            state["dialogues"] = [
                s for s in state["dialogues"] if s["id"] != event.data["session"]
            ]
            for participant, resumed in sorted(event.data["resumed"].items()):
                agents[participant]["status"] = resumed["status"]
                agents[participant]["current_action"] = resumed["current_action"]
        case _:
            pass  # PlanCreated / PerceptionBatch / LlmCall / Warning carry no state


def _finalize(state: dict[str, Any], tick: int, world: WorldMap) -> dict[str, Any]:
    """Deep-copy view with derived bags, ready for JSON."""
    agents = {}
    for agent_id in sorted(state["agents"]):
        entry = dict(state["agents"][agent_id])
        entry["pos"] = list(entry["pos"])
        entry["bag"] = sorted(
            item_id
            for item_id, placement in state["items"].items()
            if placement.get("kind") == "bag" and placement.get("agent_id") == agent_id
        )
        agents[agent_id] = entry
    return {
        "tick": tick,
        "agents": agents,
        "items": {item_id: dict(p) for item_id, p in sorted(state["items"].items())},
        "dialogues": [dict(s) for s in sorted(state["dialogues"], key=lambda s: s["id"])],
    }


class TraceReader:
    """Loads a trace file; replays to any tick with checkpoint acceleration."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._events: list[SimEvent] | None = None
        self._checkpoints: dict[int, dict[str, Any]] = {}
        with self.path.open("r", encoding="utf-8") as fh:
            first = fh.readline()
        if not first.strip():
            raise TraceError(f"empty trace file: {self.path}")
        try:
            self.header = TraceHeader.from_json(json.loads(first))
        except json.JSONDecodeError as exc:
            raise TraceError(f"unreadable trace header: {exc}") from exc

    def events(self, from_tick: int | None = None, to_tick: int | None = None) -> list[SimEvent]:
        """Events with from_tick <= tick <= to_tick, in file order."""
        all_events = self._load()
        lo = from_tick if from_tick is not None else 0
        hi = to_tick if to_tick is not None else (all_events[-1].tick if all_events else 0)
        return [e for e in all_events if lo <= e.tick <= hi]

    @property
    def final_tick(self) -> int:
        all_events = self._load()
        return all_events[-1].tick if all_events else 0

    def _load(self) -> list[SimEvent]:
        if self._events is not None:
            return self._events
        events: list[SimEvent] = []
        last_tick = 0
        with self.path.open("r", encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        # A writer may still be appending: a non-empty final fragment without a
        # trailing newline is ignored, anything malformed earlier is an error.
        body = lines[1:]
        trailing_partial = body and body[-1] != ""
        if body and body[-1] == "":
            body = body[:-1]
        for i, line in enumerate(body):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                if trailing_partial and i == len(body) - 1:
                    continue
                raise TraceError(f"corrupt trace line {i + 2}: {exc}") from exc
            if doc.get("type") != "event":
                raise TraceError(f"unexpected line type {doc.get('type')!r} at line {i + 2}")
            event = SimEvent.from_json(doc)
            if event.tick < last_tick:
                raise TraceError(f"tick regression at line {i + 2}: {event.tick} < {last_tick}")
            last_tick = event.tick
            events.append(event)
        self._events = events
        return events

    def _check_map(self, world: WorldMap) -> None:
        actual = map_content_hash(world)
        if actual != self.header.map_hash:
            raise TraceError(
                f"map hash mismatch: trace was recorded against {self.header.map_hash[:12]}, "
                f"got {actual[:12]} — the map drifted since the run"
            )

    def snapshot_at(self, world: WorldMap, tick: int) -> dict[str, Any]:
        """Full dynamic state after all events at ``tick`` have applied."""
        self._check_map(world)
        if tick < 0:
            raise ValueError(f"tick must be >= 0, got {tick}")
        base_tick = (tick // CHECKPOINT_INTERVAL) * CHECKPOINT_INTERVAL
        state = self._checkpoint(world, base_tick)
        state = json.loads(json.dumps(state))  # private working copy
        for event in self._load():
            if event.tick <= base_tick:
                continue
            if event.tick > tick:
                break
            _apply_event(state, event)
        return _finalize(state, tick, world)

    def _checkpoint(self, world: WorldMap, base_tick: int) -> dict[str, Any]:
        """State up to and including base_tick, cached at interval boundaries."""
        if base_tick == 0:
            return initial_snapshot(world)
        if base_tick not in self._checkpoints:
            prev = self._checkpoint(world, base_tick - CHECKPOINT_INTERVAL)
            state = json.loads(json.dumps(prev))
            for event in self._load():
                if event.tick <= base_tick - CHECKPOINT_INTERVAL:
                    continue
                if event.tick > base_tick:
                    break
                _apply_event(state, event)
            self._checkpoints[base_tick] = state
        return self._checkpoints[base_tick]

    def activity_history(
        self, agent_id: str, from_tick: int | None = None, to_tick: int | None = None
    ) -> list[SimEvent]:
        """One agent's events (as actor or dialogue participant), tick order."""
        if agent_id not in self.header.agents:
            raise UnknownIdError(f"agent {agent_id!r} not in trace roster")
        out = []
        for event in self.events(from_tick, to_tick):
            if event.agent == agent_id or agent_id in event.data.get("participants", ()):
                out.append(event)
        return out
