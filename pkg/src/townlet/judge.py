"""Trace grading: per-agent activity digests, rubric scoring, aggregation."""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .errors import BackendError, CacheMissError, FixtureMissError, UnparsableJudgmentError
from .llm import JUDGE_TEMPERATURE, Backend, CompletionRequest
from .prompts import load_templates, render
from .trace import SimEvent, TraceReader
from .world import WorldMap

logger = logging.getLogger(__name__)

METRICS = ("RF", "LA", "BIR", "DRC", "IQ")
METRIC_NAMES = {
    "RF": "Role Fulfillment",
    "LA": "Location Adherence",
    "BIR": "Bag Item Relevance",
    "DRC": "Daily Requirement Consistency",
    "IQ": "Interaction Quality",
}
MAX_DIGEST_TOKENS = 6000
SCORE_ATTEMPTS = 3

_SCORE_RE = re.compile(r"^\s*SCORE:\s*(-?\d+)\s*$", re.MULTILINE)


def estimate_tokens(text: str) -> int:
    return math.ceil(len(text) / 4)


def load_rubric(metric: str, directory: str | Path | None = None) -> str:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if directory is not None:
        return (Path(directory) / f"{metric}.txt").read_text(encoding="utf-8")
    return (resources.files("townlet") / "rubrics" / f"{metric}.txt").read_text(encoding="utf-8")


# -- digest ----------------------------------------------------------------------


def _describe_event(event: SimEvent, clock: str) -> str | None:
    data = event.data
    match event.kind:
        case "Move":
            dest = data.get("to")
            return f"[{clock}] moved to {tuple(dest)}" if dest else None
        case "ActionStart":
            items = data.get("required_items") or []
            need = f" (needs: {', '.join(items)})" if items else ""
            return f"[{clock}] started: {data.get('description')} at {data.get('area')}{need}"
        case "ActionEnd":
            return f"[{clock}] finished: {data.get('description')}"
        case "PickUp":
            return f"[{clock}] picked up {data.get('type', data.get('item'))}"
        case "PutDown":
            return f"[{clock}] put down {data.get('item')}"
        case "DialogueStart":
            return f"[{clock}] started talking about: {data.get('topic')}"
        case "DialogueUtterance":
            return f"[{clock}] said: \"{data.get('text')}\""
        case "DialogueEnd":
            note = data.get("note") or "conversation ended"
            return f"[{clock}] {note} ({data.get('utterances')} lines)"
        case "PlanCreated":
            lines = "; ".join(
                f"{e.get('description')} at {e.get('area')} (t{e.get('start_tick')})"
                for e in data.get("entries", [])
            )
            return f"[{clock}] planned: {lines}"
        case "Warning":
            return f"[{clock}] note: {data.get('message')}"
        case _:
            return None


def build_digest(
    reader: TraceReader,
    world: WorldMap,
    agent_id: str,
    *,
    max_tokens: int = MAX_DIGEST_TOKENS,
) -> str:
    """Chronological activity digest for one agent, trimmed to a token budget.

    Movement lines are thinned first (they carry the least judgment signal);
    dialogue and event-window lines are kept as long as possible.
    """
    from .engine import SimClock

    header = reader.header
    clock = SimClock(
        minutes_per_tick=header.minutes_per_tick, start_time=header.start_time
    )
    events = reader.activity_history(agent_id)
    lines: list[tuple[str, str]] = []  # (kind, text)
    final_bag: list[str] = []
    for event in events:
        text = _describe_event(event, clock.time_str(event.tick))
        if text:
            lines.append((event.kind, text))
    snapshot = reader.snapshot_at(world, reader.final_tick)
    agent_state = snapshot["agents"].get(agent_id)
    if agent_state:
        type_names = []
        for item_id in agent_state["bag"]:
            item = world.items.get(item_id)
            type_names.append(world.item_types[item.type_id].name if item else item_id)
        final_bag = sorted(type_names)
    tail = f"\nFinal bag contents: {', '.join(final_bag) if final_bag else '(empty)'}\n"

    def assemble(rows: Sequence[tuple[str, str]]) -> str:
        return "\n".join(text for _, text in rows) + tail

    digest = assemble(lines)
    if estimate_tokens(digest) <= max_tokens:
        return digest
    # Thin movement lines progressively: keep every Nth.
    for keep_every in (2, 4, 8, 16):
        moves_seen = 0
        thinned: list[tuple[str, str]] = []
        for kind, text in lines:
            if kind == "Move":
                moves_seen += 1
                if moves_seen % keep_every != 0:
                    continue
            thinned.append((kind, text))
        digest = assemble(thinned)
        if estimate_tokens(digest) <= max_tokens:
            return digest
    # Still too big: drop all moves, then truncate head (keep the recent story).
    rest = [(k, t) for k, t in lines if k != "Move"]
    digest = assemble(rest)
    while rest and estimate_tokens(digest) > max_tokens:
        rest = rest[max(1, len(rest) // 10):]
        digest = assemble(rest)
    return digest


# -- scoring ----------------------------------------------------------------------


def parse_score(text: str) -> int:
    matches = _SCORE_RE.findall(text)
    if not matches:
        raise ValueError("no SCORE line found")
    return max(1, min(10, int(matches[-1])))


def judge_metric(
    backend: Backend,
    *,
    metric: str,
    digest: str,
    agent_name: str,
    scenario_name: str,
    variant: str,
    event_description: str,
    rubric_dir: str | Path | None = None,
    templates=None,
) -> int:
    templates = templates or load_templates()
    prompt = render(
        templates,
        "judge",
        scenario_name=scenario_name,
        variant=variant,
        event_description=event_description,
        agent_name=agent_name,
        rubric=load_rubric(metric, rubric_dir),
        digest=digest,
    )
    messages: tuple[dict[str, str], ...] = ({"role": "user", "content": prompt},)
    last_error: Exception | None = None
    for attempt in range(SCORE_ATTEMPTS):
        request = CompletionRequest(
            messages=messages,
            temperature=JUDGE_TEMPERATURE,
            tag=f"judge:{metric}:{agent_name}:{attempt}",
        )
        try:
            reply = backend.complete(request)
        except (CacheMissError, FixtureMissError):
            raise
        except BackendError as exc:
            raise UnparsableJudgmentError(f"judge backend failed for {metric}: {exc}") from exc
        try:
            return parse_score(reply)
        except ValueError as exc:
            last_error = exc
            messages = messages + (
                {"role": "assistant", "content": reply},
                {
                    "role": "user",
                    "content": "Your reply had no valid final score line. Answer again, "
                    "ending with exactly one line of the form SCORE: <integer from 1 to 10>.",
                },
            )
    raise UnparsableJudgmentError(
        f"judge gave no usable score for {metric} after {SCORE_ATTEMPTS} attempts: {last_error}"
    )


# -- reports -------------------------------------------------------------------


def round2(value: float) -> float:
    return float(Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass
class ScenarioScores:
    scenario_id: str
    variant: str
    # metric -> agent id -> score
    scores: dict[str, dict[str, int]] = field(default_factory=dict)

    def metric_mean(self, metric: str) -> float | None:
        per_agent = self.scores.get(metric)
        if not per_agent:
            return None
        return sum(per_agent.values()) / len(per_agent)


@dataclass
class ScoreReport:
    """Scores for one or more evaluated scenario runs."""

    scenarios: list[ScenarioScores] = field(default_factory=list)

    def aggregate(self) -> dict[str, float | None]:
        """Scenario-mean of agent-means per metric, plus their average."""
        out: dict[str, float | None] = {}
        for metric in METRICS:
            means = [
                m for s in self.scenarios if (m := s.metric_mean(metric)) is not None
            ]
            out[metric] = sum(means) / len(means) if means else None
        present = [out[m] for m in METRICS]
        out["Avg"] = (
            sum(present) / len(present) if all(v is not None for v in present) else None
        )
        return out

    def to_json(self) -> dict[str, Any]:
        agg = self.aggregate()
        return {
            "scenarios": [
                {
                    "scenario_id": s.scenario_id,
                    "variant": s.variant,
                    "scores": s.scores,
                    "metric_means": {
                        m: (None if s.metric_mean(m) is None else round2(s.metric_mean(m)))
                        for m in METRICS
                    },
                }
                for s in self.scenarios
            ],
            "aggregate": {
                key: (None if value is None else round2(value)) for key, value in agg.items()
            },
        }

    def table(self) -> str:
        agg = self.aggregate()
        headers = ["scenario", *METRICS, "Avg."]
        rows: list[list[str]] = []
        for s in self.scenarios:
            means = {m: s.metric_mean(m) for m in METRICS}
            present = [v for v in means.values() if v is not None]
            avg = (
                sum(present) / len(present)
                if len(present) == len(METRICS)
                else None
            )
            rows.append(
                [
                    f"{s.scenario_id} ({s.variant})",
                    *[_cell(means[m]) for m in METRICS],
                    _cell(avg),
                ]
            )
        rows.append(["overall", *[_cell(agg[m]) for m in METRICS], _cell(agg["Avg"])])
        widths = [max(len(r[i]) for r in [headers, *rows]) for i in range(len(headers))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        lines = [fmt.format(*headers), fmt.format(*["-" * w for w in widths])]
        lines.extend(fmt.format(*row) for row in rows)
        return "\n".join(lines)


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{round2(value):.2f}"


def evaluate_trace(
    reader: TraceReader,
    world: WorldMap,
    backend: Backend,
    *,
    metrics: Sequence[str] = METRICS,
    rubric_dir: str | Path | None = None,
) -> ScenarioScores:
    """Judge every participant in one trace on the requested metrics."""
    header = reader.header
    scenario = header.scenario
    templates = load_templates()
    result = ScenarioScores(
        scenario_id=scenario.get("id", header.map_id), variant=header.variant
    )
    for metric in metrics:
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    digests = {
        agent_id: build_digest(reader, world, agent_id) for agent_id in header.agents
    }
    for metric in metrics:
        per_agent: dict[str, int] = {}
        for agent_id in header.agents:
            agent_name = world.agents[agent_id].name if agent_id in world.agents else agent_id
            per_agent[agent_id] = judge_metric(
                backend,
                metric=metric,
                digest=digests[agent_id],
                agent_name=agent_name,
                scenario_name=scenario.get("name", result.scenario_id),
                variant=header.variant,
                event_description=scenario.get("event_description", ""),
                rubric_dir=rubric_dir,
                templates=templates,
            )
        result.scores[metric] = per_agent
    return result


def scripted_judge_backend():
    """Offline judge: a fixed heuristic over the digest text.

    Useful for exercising the evaluation pipeline without any model. Scores
    are deterministic and only loosely meaningful.
    """
    from .llm import Fixture, ScriptedBackend

    def score(request: CompletionRequest) -> str:
        text = request.text()
        points = 5
        if "take part in" in text or "attend" in text:
            points += 2
        if "picked up" in text:
            points += 1
        if "said:" in text:
            points += 1
        points = min(10, points)
        return f"Scripted heuristic judgment based on digest signals.\nSCORE: {points}"

    return ScriptedBackend([Fixture(tag_prefix="judge:", response=score)])


def save_report(report: ScoreReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path
