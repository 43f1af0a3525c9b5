"""Agent cognition: memory stream with scored retrieval, two-level planning,
reactions, and dialogue turns.

Plans are not precomputed for the whole day; the engine asks an AgentMind for
the next batch of low-level actions whenever the previous batch runs out, so
behavior can bend around whatever happened in between.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import BackendError, CacheMissError, FixtureMissError
from .llm import SIM_TEMPERATURE, Backend, CompletionRequest, corrective_retry
from .prompts import extract_structured_block, render
from .world import AgentProfile

logger = logging.getLogger(__name__)

MEMORY_KINDS = ("Observation", "PlanRecord", "Dialogue", "EventKnowledge")

RECENCY_DECAY = 0.995
ALPHA = 1.0  # recency weight
BETA = 1.0  # importance weight
GAMMA = 1.0  # relevance weight

DEFAULT_PLAN_HORIZON = 120  # ticks
LIFE_SUMMARY_INTERVAL = 480  # ticks between self-summary refreshes
MAX_DIALOGUE_UTTERANCES = 12  # hard cap per session, both speakers combined
DEFAULT_RETRIEVE_K = 8
PARSE_ATTEMPTS = 3
MAX_ACTIONS_PER_ENTRY = 8

DEFAULT_PLAN_IMPORTANCE = 5
EVENT_KNOWLEDGE_IMPORTANCE = 9
FALLBACK_IMPORTANCE = 5


@dataclass
class MemoryEntry:
    id: str
    agent_id: str
    kind: str  # one of MEMORY_KINDS
    text: str
    created_tick: int
    last_access_tick: int
    importance: int  # 1..10


class MemoryStream:
    """Append-only per-agent memory; retrieval touches last_access_tick."""

    def __init__(self, agent_id: str) -> None:
        self.agent_id = agent_id
        self.entries: list[MemoryEntry] = []

    def add(self, *, kind: str, text: str, importance: int, tick: int) -> MemoryEntry:
        if kind not in MEMORY_KINDS:
            raise ValueError(f"unknown memory kind: {kind!r}")
        importance = max(1, min(10, int(importance)))
        entry = MemoryEntry(
            id=f"{self.agent_id}-m{len(self.entries):05d}",
            agent_id=self.agent_id,
            kind=kind,
            text=text,
            created_tick=tick,
            last_access_tick=tick,
            importance=importance,
        )
        self.entries.append(entry)
        return entry

    def __len__(self) -> int:
        return len(self.entries)


def tokenize(text: str) -> frozenset[str]:
    return frozenset(t for t in re.split(r"[^0-9a-zA-Z]+", text.lower()) if t)


def jaccard_relevance(query: str, memory_text: str) -> float:
    a, b = tokenize(query), tokenize(memory_text)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


RelevanceFn = Callable[[str, str], float]


def _min_max(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi <= lo:
        return [0.0] * len(values)  # constant component; no effect on ranking
    return [(v - lo) / (hi - lo) for v in values]


def retrieve(
    stream: MemoryStream,
    query: str,
    k: int,
    *,
    now: int,
    relevance: RelevanceFn = jaccard_relevance,
) -> list[MemoryEntry]:
    """Top-k memories by recency + importance + relevance (equal weights).

    Each component is min-max normalized over the candidate set before
    weighting. Ties break toward the newer created_tick, then lexical id.
    Retrieved entries get their last_access_tick refreshed to ``now``.
    """
    candidates = stream.entries
    if not candidates or k <= 0:
        return []
    recency = _min_max([RECENCY_DECAY ** (now - e.last_access_tick) for e in candidates])
    importance = _min_max([e.importance / 10.0 for e in candidates])
    relev = _min_max([relevance(query, e.text) for e in candidates])
    scored = [
        (ALPHA * recency[i] + BETA * importance[i] + GAMMA * relev[i], e)
        for i, e in enumerate(candidates)
    ]
    scored.sort(key=lambda pair: (-pair[0], -pair[1].created_tick, pair[1].id))
    chosen = [e for _, e in scored[:k]]
    for entry in chosen:
        entry.last_access_tick = now
    return chosen


# --- plan/action types --------------------------------------------------------


@dataclass(frozen=True)
class PlanEntry:
    description: str
    area: str  # area name as shown to the model
    start_tick: int
    duration_ticks: int

    @property
    def end_tick(self) -> int:
        return self.start_tick + self.duration_ticks


@dataclass(frozen=True)
class HighLevelPlan:
    agent_id: str
    created_tick: int
    horizon_ticks: int
    entries: tuple[PlanEntry, ...]

    def summary(self) -> str:
        return "; ".join(
            f"{e.description} @ {e.area} [t{e.start_tick}+{e.duration_ticks}]" for e in self.entries
        )


@dataclass
class LowLevelAction:
    description: str
    area: str
    required_items: list[str]  # item-type names; waived requirements get removed
    duration_ticks: int


@dataclass(frozen=True)
class Continue:
    reason: str = ""


@dataclass(frozen=True)
class Replan:
    reason: str


@dataclass(frozen=True)
class InitiateDialogue:
    target_id: str
    topic: str


Reaction = Continue | Replan | InitiateDialogue


@dataclass
class MindContext:
    """Engine-supplied view of the world for one cognitive call."""

    now: int
    time_str: str
    minutes_per_tick: int
    area_names: Sequence[str]
    item_type_names: Sequence[str]
    current_area: str
    current_action: str
    visible_agents: dict[str, str] = field(default_factory=dict)  # name -> agent id


def _is_fatal(exc: BackendError) -> bool:
    # Cache/fixture misses mean the run itself is misconfigured; never mask them.
    return isinstance(exc, (CacheMissError, FixtureMissError))


def parse_importance(text: str) -> int:
    match = re.search(r"\d+", text)
    if not match:
        raise ValueError("no digit in importance reply")
    return max(1, min(10, int(match.group())))


def score_importance(backend: Backend, templates, text: str, *, tag: str) -> int:
    """LLM 1-10 poignancy score; out-of-range clamps, no digit thrice -> 5."""
    request = CompletionRequest(
        messages=({"role": "user", "content": render(templates, "importance", text=text)},),
        temperature=SIM_TEMPERATURE,
        max_tokens=8,
        tag=tag,
    )
    try:
        return corrective_retry(backend, request, parse_importance, attempts=PARSE_ATTEMPTS)
    except ValueError:
        logger.warning("importance unparsable after %d attempts; defaulting to 5", PARSE_ATTEMPTS)
        return FALLBACK_IMPORTANCE
    except BackendError as exc:
        if _is_fatal(exc):
            raise
        logger.warning("importance backend failure (%s); defaulting to 5", exc)
        return FALLBACK_IMPORTANCE


def parse_plan(text: str, *, now: int, horizon: int, area_names: Sequence[str]) -> list[PlanEntry]:
    """Strict plan parse + the documented normalization.

    Entries are sorted by start, clamped to [now, now+horizon), and an entry
    overlapping its successor is truncated (dropped when nothing remains).
    """
    doc = extract_structured_block(text)
    raw = doc.get("entries")
    if not isinstance(raw, list) or not raw:
        raise ValueError("plan has no entries")
    known = set(area_names)
    entries: list[PlanEntry] = []
    for item in raw:
        if not isinstance(item, dict):
            raise ValueError("plan entry is not an object")
        try:
            description = str(item["description"]).strip()
            area = str(item["area"]).strip()
            start = int(item["start_tick"])
            duration = int(item["duration_ticks"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed plan entry: {exc}") from exc
        if not description:
            raise ValueError("plan entry has empty description")
        if area not in known:
            raise ValueError(f"plan entry names unknown area {area!r}")
        if duration < 1:
            raise ValueError("plan entry duration < 1")
        entries.append(PlanEntry(description, area, max(start, now), duration))
    entries.sort(key=lambda e: e.start_tick)
    horizon_end = now + horizon
    normalized: list[PlanEntry] = []
    for i, entry in enumerate(entries):
        if entry.start_tick >= horizon_end:
            continue
        end = min(entry.end_tick, horizon_end)
        if i + 1 < len(entries):
            end = min(end, entries[i + 1].start_tick)
        if end <= entry.start_tick:
            continue  # fully shadowed by the next entry
        normalized.append(
            PlanEntry(entry.description, entry.area, entry.start_tick, end - entry.start_tick)
        )
    if not normalized:
        raise ValueError("no plan entries survive normalization")
    return normalized


def parse_actions(
    text: str, *, area_names: Sequence[str], item_type_names: Sequence[str]
) -> tuple[list[LowLevelAction], list[str]]:
    """Strict action-list parse; unresolvable item names are dropped with a
    warning message (returned, not raised)."""
    doc = extract_structured_block(text)
    raw = doc.get("actions")
    if not isinstance(raw, list) or not raw:
        raise ValueError("decomposition has no actions")
    if len(raw) > MAX_ACTIONS_PER_ENTRY:
        raise ValueError(f"{len(raw)} actions > limit {MAX_ACTIONS_PER_ENTRY}")
    known_areas = set(area_names)
    known_items = set(item_type_names)
    actions: list[LowLevelAction] = []
    warnings: list[str] = []
    for item in raw:
        if not isinstance(item, dict):
            raise ValueError("action is not an object")
        try:
            description = str(item["description"]).strip()
            area = str(item["area"]).strip()
            duration = int(item["duration_ticks"])
            names = [str(n).strip() for n in item.get("items", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed action: {exc}") from exc
        if not description:
            raise ValueError("action has empty description")
        if area not in known_areas:
            raise ValueError(f"action names unknown area {area!r}")
        if duration < 1:
            raise ValueError("action duration < 1")
        kept: list[str] = []
        for name in names:
            if name in known_items:
                kept.append(name)
            else:
                warnings.append(f"dropped unknown item name {name!r}")
        actions.append(LowLevelAction(description, area, kept, duration))
    return actions, warnings


def parse_reaction(text: str, *, visible_agents: dict[str, str]) -> Reaction:
    doc = extract_structured_block(text)
    decision = str(doc.get("decision", "")).strip().lower()
    if decision == "continue":
        return Continue(str(doc.get("reason", "")))
    if decision == "replan":
        return Replan(str(doc.get("reason", "")) or "observed something new")
    if decision == "talk":
        target_name = str(doc.get("target", "")).strip()
        if target_name not in visible_agents:
            raise ValueError(f"talk target {target_name!r} is not visible")
        return InitiateDialogue(visible_agents[target_name], str(doc.get("topic", "")) or "catching up")
    raise ValueError(f"unknown decision {decision!r}")


def parse_utterance(text: str) -> tuple[str, bool]:
    doc = extract_structured_block(text)
    utterance = str(doc.get("utterance", "")).strip()
    if not utterance:
        raise ValueError("empty utterance")
    return utterance, bool(doc.get("stop", False))


def _memories_block(memories: Sequence[MemoryEntry]) -> str:
    if not memories:
        return "(nothing notable)"
    return "\n".join(f"- [{m.kind}] {m.text}" for m in memories)


class AgentMind:
    """One agent's cognition: profile + memory + plan state + LLM calls."""

    def __init__(
        self,
        profile: AgentProfile,
        backend: Backend,
        templates,
        *,
        plan_horizon: int = DEFAULT_PLAN_HORIZON,
        retrieve_k: int = DEFAULT_RETRIEVE_K,
        relevance: RelevanceFn = jaccard_relevance,
    ) -> None:
        self.profile = profile
        self.backend = backend
        self.templates = templates
        self.plan_horizon = plan_horizon
        self.retrieve_k = retrieve_k
        self.relevance = relevance
        self.memory = MemoryStream(profile.id)
        self.current_plan: HighLevelPlan | None = None
        self._entry_cursor = 0
        self._plan_invalidated = False
        self._life_summary: str | None = None
        self._life_summary_tick = -LIFE_SUMMARY_INTERVAL

    # -- memory ---------------------------------------------------------------

    def remember(self, *, kind: str, text: str, importance: int, tick: int) -> MemoryEntry:
        return self.memory.add(kind=kind, text=text, importance=importance, tick=tick)

    def observe(self, summaries: Sequence[str], *, now: int) -> list[MemoryEntry]:
        """Store observations, each importance-scored by the backend."""
        out = []
        for text in summaries:
            importance = score_importance(
                self.backend, self.templates, text, tag=f"importance:{self.profile.id}:{now}"
            )
            out.append(self.memory.add(kind="Observation", text=text, importance=importance, tick=now))
        return out

    def retrieve(self, query: str, *, now: int, k: int | None = None) -> list[MemoryEntry]:
        return retrieve(self.memory, query, k or self.retrieve_k, now=now, relevance=self.relevance)

    # -- planning ---------------------------------------------------------------

    @property
    def plan_invalidated(self) -> bool:
        return self._plan_invalidated

    def invalidate_plan(self, reason: str) -> None:
        self._plan_invalidated = True
        logger.debug("%s plan invalidated: %s", self.profile.id, reason)

    def _fallback_plan(self, ctx: MindContext) -> HighLevelPlan:
        home = self.profile.home_area
        entry = PlanEntry(
            description="spend unstructured time at home",
            area=home,
            start_tick=ctx.now,
            duration_ticks=self.plan_horizon,
        )
        return HighLevelPlan(self.profile.id, ctx.now, self.plan_horizon, (entry,))

    def _generate_plan(self, ctx: MindContext) -> HighLevelPlan:
        memories = self.retrieve(
            f"plans and commitments of {self.profile.name}; upcoming events", now=ctx.now
        )
        prior = self.current_plan.summary() if self.current_plan else "(none)"
        prompt = render(
            self.templates,
            "plan",
            name=self.profile.name,
            personality=self.profile.personality,
            traits=", ".join(self.profile.core_traits),
            lifestyle=self.profile.lifestyle,
            current_time=ctx.time_str,
            current_tick=ctx.now,
            minutes_per_tick=ctx.minutes_per_tick,
            memories=_memories_block(memories),
            prior_plan=prior,
            areas=", ".join(ctx.area_names),
            horizon_ticks=self.plan_horizon,
        )
        request = CompletionRequest(
            messages=({"role": "user", "content": prompt},),
            temperature=SIM_TEMPERATURE,
            tag=f"plan:{self.profile.id}:{ctx.now}",
        )
        try:
            entries = corrective_retry(
                self.backend,
                request,
                lambda text: parse_plan(
                    text, now=ctx.now, horizon=self.plan_horizon, area_names=ctx.area_names
                ),
                attempts=PARSE_ATTEMPTS,
            )
        except ValueError:
            logger.warning("%s: plan unparsable; falling back to idle-at-home", self.profile.id)
            return self._fallback_plan(ctx)
        except BackendError as exc:
            if _is_fatal(exc):
                raise
            logger.warning("%s: plan backend failure (%s); idle fallback", self.profile.id, exc)
            return self._fallback_plan(ctx)
        return HighLevelPlan(self.profile.id, ctx.now, self.plan_horizon, tuple(entries))

    def _decompose(self, entry: PlanEntry, ctx: MindContext) -> tuple[list[LowLevelAction], list[str]]:
        memories = self.retrieve(f"{entry.description} at {entry.area}", now=ctx.now)
        prompt = render(
            self.templates,
            "decompose",
            name=self.profile.name,
            entry_description=entry.description,
            entry_area=entry.area,
            entry_start=entry.start_tick,
            entry_duration=entry.duration_ticks,
            item_names=", ".join(ctx.item_type_names) or "(none)",
            areas=", ".join(ctx.area_names),
            memories=_memories_block(memories),
        )
        request = CompletionRequest(
            messages=({"role": "user", "content": prompt},),
            temperature=SIM_TEMPERATURE,
            tag=f"decompose:{self.profile.id}:{ctx.now}",
        )
        try:
            return corrective_retry(
                self.backend,
                request,
                lambda text: parse_actions(
                    text, area_names=ctx.area_names, item_type_names=ctx.item_type_names
                ),
                attempts=PARSE_ATTEMPTS,
            )
        except ValueError:
            logger.warning("%s: decomposition unparsable; verbatim fallback", self.profile.id)
            return (
                [LowLevelAction(entry.description, entry.area, [], entry.duration_ticks)],
                [f"decomposition fell back to the plan entry for {entry.description!r}"],
            )
        except BackendError as exc:
            if _is_fatal(exc):
                raise
            logger.warning("%s: decompose backend failure (%s); verbatim fallback", self.profile.id, exc)
            return (
                [LowLevelAction(entry.description, entry.area, [], entry.duration_ticks)],
                [f"decomposition fell back to the plan entry for {entry.description!r}"],
            )

    def next_actions(
        self, ctx: MindContext
    ) -> tuple[list[LowLevelAction], HighLevelPlan | None, list[str]]:
        """Next batch of low-level actions; replans when the plan ran out.

        Returns (actions, newly created plan or None, warning messages). A
        plan entry that starts in the future yields a filler idle action
        first, keeping the schedule aligned without busy-waiting.
        """
        new_plan: HighLevelPlan | None = None
        if (
            self.current_plan is None
            or self._plan_invalidated
            or self._entry_cursor >= len(self.current_plan.entries)
            or ctx.now >= self.current_plan.entries[-1].end_tick
        ):
            new_plan = self._generate_plan(ctx)
            self.current_plan = new_plan
            self._entry_cursor = 0
            self._plan_invalidated = False
            self.remember(
                kind="PlanRecord",
                text=f"planned: {new_plan.summary()}",
                importance=DEFAULT_PLAN_IMPORTANCE,
                tick=ctx.now,
            )
        assert self.current_plan is not None
        # Skip entries that already ended.
        while (
            self._entry_cursor < len(self.current_plan.entries)
            and self.current_plan.entries[self._entry_cursor].end_tick <= ctx.now
        ):
            self._entry_cursor += 1
        if self._entry_cursor >= len(self.current_plan.entries):
            # Degenerate plan (all in the past): idle briefly, replan next round.
            return (
                [LowLevelAction("take a short break", ctx.current_area, [], 5)],
                new_plan,
                ["plan exhausted immediately; idling"],
            )
        entry = self.current_plan.entries[self._entry_cursor]
        if entry.start_tick > ctx.now:
            gap = entry.start_tick - ctx.now
            return (
                [LowLevelAction(f"free time before: {entry.description}", ctx.current_area, [], gap)],
                new_plan,
                [],
            )
        self._entry_cursor += 1
        actions, warnings = self._decompose(entry, ctx)
        return actions, new_plan, warnings

    # -- reactions ----------------------------------------------------------------

    def react(self, observations: Sequence[str], ctx: MindContext) -> Reaction:
        memories = self.retrieve(" ".join(observations), now=ctx.now)
        prompt = render(
            self.templates,
            "react",
            name=self.profile.name,
            current_time=ctx.time_str,
            current_action=ctx.current_action or "nothing in particular",
            observations="\n".join(f"- {o}" for o in observations),
            memories=_memories_block(memories),
        )
        request = CompletionRequest(
            messages=({"role": "user", "content": prompt},),
            temperature=SIM_TEMPERATURE,
            tag=f"react:{self.profile.id}:{ctx.now}",
        )
        try:
            return corrective_retry(
                self.backend,
                request,
                lambda text: parse_reaction(text, visible_agents=ctx.visible_agents),
                attempts=PARSE_ATTEMPTS,
            )
        except ValueError:
            return Continue("reaction unparsable; continuing")
        except BackendError as exc:
            if _is_fatal(exc):
                raise
            return Continue(f"backend failure: {exc}")

    # -- dialogue ----------------------------------------------------------------

    def ensure_life_summary(self, ctx: MindContext) -> str:
        """Rolling first-person self-summary, refreshed every LIFE_SUMMARY_INTERVAL."""
        if (
            self._life_summary is not None
            and ctx.now - self._life_summary_tick < LIFE_SUMMARY_INTERVAL
        ):
            return self._life_summary
        memories = self.retrieve(f"life of {self.profile.name} lately", now=ctx.now)
        prompt = render(
            self.templates,
            "life_summary",
            name=self.profile.name,
            personality=self.profile.personality,
            traits=", ".join(self.profile.core_traits),
            lifestyle=self.profile.lifestyle,
            current_time=ctx.time_str,
            memories=_memories_block(memories),
        )
        request = CompletionRequest(
            messages=({"role": "user", "content": prompt},),
            temperature=SIM_TEMPERATURE,
            tag=f"life:{self.profile.id}:{ctx.now}",
        )
        try:
            text = self.backend.complete(request).strip()
        except BackendError as exc:
            if _is_fatal(exc):
                raise
            text = f"I am {self.profile.name}. {self.profile.lifestyle}"
        self._life_summary = text or f"I am {self.profile.name}. {self.profile.lifestyle}"
        self._life_summary_tick = ctx.now
        return self._life_summary

    def dialogue_turn(
        self,
        *,
        partner_name: str,
        topic: str,
        transcript: Sequence[tuple[str, str]],  # (speaker name, utterance)
        ctx: MindContext,
    ) -> tuple[str, bool]:
        """One utterance + stop flag. Raises BackendError/ValueError upward;
        the engine closes the session with a system note on failure."""
        life = self.ensure_life_summary(ctx)
        last_line = transcript[-1][1] if transcript else topic
        memories = self.retrieve(f"{topic} {partner_name} {last_line}", now=ctx.now)
        lines = "\n".join(f"{speaker}: {text}" for speaker, text in transcript) or "(no lines yet)"
        prompt = render(
            self.templates,
            "dialogue",
            name=self.profile.name,
            personality=self.profile.personality,
            traits=", ".join(self.profile.core_traits),
            lifestyle=self.profile.lifestyle,
            life_summary=life,
            current_time=ctx.time_str,
            current_activity=ctx.current_action or "free time",
            partner=partner_name,
            topic=topic,
            transcript=lines,
            memories=_memories_block(memories),
        )
        request = CompletionRequest(
            messages=({"role": "user", "content": prompt},),
            temperature=SIM_TEMPERATURE,
            tag=f"dialogue:{self.profile.id}:{ctx.now}",
        )
        return corrective_retry(self.backend, request, parse_utterance, attempts=PARSE_ATTEMPTS)
