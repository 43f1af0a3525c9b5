"""Running a scenario end to end: seed knowledge, simulate, write the trace."""

from __future__ import annotations

import json
from pathlib import Path

from ..engine import SimClock, Simulation
from ..errors import BundleError
from ..llm import Backend
from ..mapio import load_map, map_content_hash, save_map
from ..mind import EVENT_KNOWLEDGE_IMPORTANCE, AgentMind
from ..prompts import load_templates
from ..trace import TraceHeader, TraceReader, TraceWriter
from .builders import Scenario, builtin_scenarios

VARIANTS = ("basic", "hard")

# Fixed simulated calendar date so identical runs produce identical bytes.
SIM_DATE = "2024-05-18"


def event_brief(scenario: Scenario) -> str:
    """One sentence describing the event: what, where, when."""
    clock = SimClock(minutes_per_tick=1, start_time=scenario.start_time)
    when = clock.time_str(scenario.event_start_tick)
    return (
        f"{scenario.name} is happening today: {scenario.event_description}, "
        f"at {scenario.event_area_name}, starting around {when}."
    )


def seed_knowledge(scenario: Scenario, variant: str, minds: dict[str, AgentMind]) -> None:
    """Plant the event in memory: everyone for basic, only the host for hard."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    brief = event_brief(scenario)
    if variant == "basic":
        recipients = scenario.participants
    else:
        brief = f"You are hosting {brief[0].lower()}{brief[1:]} Invite the others."
        recipients = (scenario.host,)
    for agent_id in recipients:
        minds[agent_id].remember(
            kind="EventKnowledge",
            text=brief,
            importance=EVENT_KNOWLEDGE_IMPORTANCE,
            tick=0,
        )


def build_minds(scenario: Scenario, backend: Backend, **mind_kwargs) -> dict[str, AgentMind]:
    templates = load_templates()
    return {
        agent_id: AgentMind(scenario.world.agents[agent_id], backend, templates, **mind_kwargs)
        for agent_id in scenario.participants
    }


def make_header(
    scenario: Scenario, variant: str, *, seed: int, minutes_per_tick: int, backend_kind: str
) -> TraceHeader:
    return TraceHeader(
        map_id=scenario.world.id,
        map_hash=map_content_hash(scenario.world),
        scenario=scenario.meta(),
        variant=variant,
        seed=seed,
        minutes_per_tick=minutes_per_tick,
        start_time=scenario.start_time,
        backend_kind=backend_kind,
        created=f"{SIM_DATE}T{scenario.start_time}:00",
        agents=tuple(sorted(scenario.participants)),
    )


def run_scenario(
    scenario: Scenario,
    variant: str,
    backend: Backend,
    *,
    out_path: str | Path,
    ticks: int,
    seed: int = 0,
    minutes_per_tick: int = 1,
) -> TraceReader:
    """Simulate `ticks` ticks and write the full trace to `out_path`."""
    minds = build_minds(scenario, backend)
    seed_knowledge(scenario, variant, minds)
    sim = Simulation(
        scenario.world,
        minds,
        clock=SimClock(minutes_per_tick=minutes_per_tick, start_time=scenario.start_time),
        seed=seed,
    )
    header = make_header(
        scenario, variant, seed=seed, minutes_per_tick=minutes_per_tick, backend_kind=backend.kind
    )
    with TraceWriter(out_path, header) as writer:
        sim.run(ticks, writer)
    return TraceReader(out_path)


# -- scenario files ---------------------------------------------------------------


def export_scenario(scenario: Scenario, root: str | Path) -> Path:
    """Materialize one scenario: map bundle + a scenario descriptor file."""
    root = Path(root)
    save_map(scenario.world, root / "maps" / scenario.world.id)
    doc = dict(scenario.meta())
    doc["map"] = f"maps/{scenario.world.id}"
    doc["start_time"] = scenario.start_time
    path = root / f"{scenario.id}.scenario.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario descriptor written by export_scenario."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleError(f"cannot read scenario file {path}: {exc}") from exc
    for key in ("id", "name", "map", "host", "participants", "event_description",
                "event_area", "event_start_tick", "event_duration_ticks"):
        if key not in doc:
            raise BundleError(f"scenario file {path} is missing {key!r}")
    world = load_map((path.parent / doc["map"]).resolve())
    missing = [a for a in doc["participants"] if a not in world.agents]
    if missing:
        raise BundleError(f"scenario participants not on map: {missing}")
    if doc["event_area"] not in world.areas:
        raise BundleError(f"scenario event area {doc['event_area']!r} not on map")
    return Scenario(
        id=doc["id"],
        name=doc["name"],
        world=world,
        host=doc["host"],
        participants=tuple(doc["participants"]),
        event_description=doc["event_description"],
        event_area=doc["event_area"],
        event_start_tick=int(doc["event_start_tick"]),
        event_duration_ticks=int(doc["event_duration_ticks"]),
        start_time=doc.get("start_time", "07:00"),
    )


def get_scenario(ref: str) -> Scenario:
    """Resolve a scenario reference: builtin id, or path to a descriptor file."""
    builtins = builtin_scenarios()
    if ref in builtins:
        return builtins[ref]
    if Path(ref).exists():
        return load_scenario(ref)
    known = ", ".join(sorted(builtins))
    raise BundleError(f"unknown scenario {ref!r}; builtin scenarios: {known}")
