"""Deterministic tick-based simulation kernel.

Each tick every agent is processed in ascending id order: (1) perceive,
(2) react to anything newly seen, (3) progress its status machine — moving,
collecting items, executing, or talking — and (4) pull the next actions from
its mind when the current batch ran out. All state changes are emitted as
events, and the event stream alone (plus the map) reconstructs any tick.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any

from .errors import OutOfReachError, UnknownIdError, UnreachableError, WorldError
from .mind import AgentMind, Continue, InitiateDialogue, LowLevelAction, MindContext, Replan
from .pathfinding import find_path, manhattan
from .trace import SimEvent
from .world import GridPos, InBag, OnTile, WorldMap, area_of_tile, bag_items, move_item

PERCEPTION_RADIUS = 5  # Chebyshev
DAY_TICKS = 1440
PICKUP_REACH = 1  # same tile or 4-adjacent

AGENT_STATUSES = ("Idle", "CollectingItems", "Traveling", "Executing", "InDialogue")
OBSERVATION_KINDS = ("AgentActivity", "DialogueOverheard", "ItemSeen", "EventNotice")


@dataclass(frozen=True)
class SimClock:
    minutes_per_tick: int = 1
    start_time: str = "07:00"

    def minute_of(self, tick: int) -> int:
        hh, mm = self.start_time.split(":")
        return int(hh) * 60 + int(mm) + tick * self.minutes_per_tick

    def time_str(self, tick: int) -> str:
        total = self.minute_of(tick)
        day, minute = divmod(total, 24 * 60)
        base = f"{minute // 60:02d}:{minute % 60:02d}"
        return base if day == 0 else f"{base} (day {day + 1})"


@dataclass(frozen=True)
class Observation:
    kind: str  # one of OBSERVATION_KINDS
    subject: str
    summary: str


@dataclass
class AgentState:
    id: str
    pos: GridPos
    status: str = "Idle"
    path: list[GridPos] = field(default_factory=list)
    move_budget: float = 0.0
    action_queue: list[LowLevelAction] = field(default_factory=list)
    current_action: LowLevelAction | None = None
    action_ticks_remaining: int = 0
    collect_queue: list[str] = field(default_factory=list)  # item-type names
    collect_target: tuple[str, GridPos] | None = None  # (item id, reach tile)
    saved: dict[str, Any] | None = None  # frozen motion state while InDialogue
    last_seen: dict[tuple[str, str], str] = field(default_factory=dict)


@dataclass
class DialogueSession:
    id: str
    initiator: str
    target: str
    topic: str
    started_tick: int
    transcript: list[tuple[str, str]] = field(default_factory=list)  # (agent id, text)
    next_speaker: str = ""
    closed: bool = False

    @property
    def participants(self) -> tuple[str, str]:
        return (self.initiator, self.target)

    def partner_of(self, agent_id: str) -> str:
        return self.target if agent_id == self.initiator else self.initiator


class Simulation:
    """Single-writer simulation over one map and one mind per agent."""

    def __init__(
        self,
        world: WorldMap,
        minds: dict[str, AgentMind],
        *,
        clock: SimClock | None = None,
        seed: int = 0,
        perception_radius: int = PERCEPTION_RADIUS,
        max_dialogue_utterances: int = 12,
    ) -> None:
        missing = sorted(set(world.agents) - set(minds))
        if missing:
            raise UnknownIdError(f"agents without minds: {missing}")
        self.world = world
        self.minds = minds
        self.clock = clock or SimClock()
        self.seed = seed
        self.rng = random.Random(seed)
        self.perception_radius = perception_radius
        self.max_dialogue_utterances = max_dialogue_utterances
        self.tick = 0
        self.agents: dict[str, AgentState] = {
            ag.id: AgentState(id=ag.id, pos=ag.start_pos) for ag in world.agents.values()
        }
        self.sessions: dict[str, DialogueSession] = {}
        self._session_count = 0
        self._events: list[SimEvent] = []
        self._seq = 0
        self._current_agent: str | None = None
        # What a trace replay would believe about status/current_action; any
        # end-of-tick divergence is patched with a StatusChange event.
        self._shadow: dict[str, tuple[str, str | None]] = {
            agent_id: ("Idle", None) for agent_id in self.agents
        }
        for mind in minds.values():
            mind.backend.add_listener(self._on_llm_call)

    # -- event plumbing ---------------------------------------------------------

    def _emit(self, kind: str, agent: str | None, data: dict[str, Any]) -> None:
        self._events.append(SimEvent(self.tick, self._seq, kind, agent, data))
        self._seq += 1
        # Mirror the replay reducer's view of status/current_action.
        if agent is not None and kind == "Move":
            self._shadow[agent] = (data["status"], self._shadow[agent][1])
        elif agent is not None and kind == "PickUp":
            self._shadow[agent] = (data["status"], self._shadow[agent][1])
        elif kind == "ActionStart":
            self._shadow[agent] = ("Executing", data["description"])
        elif kind == "ActionEnd":
            self._shadow[agent] = ("Idle", None)
        elif kind == "StatusChange":
            self._shadow[agent] = (data["status"], data["current_action"])
        elif kind == "DialogueStart":
            for pid in data["participants"]:
                self._shadow[pid] = ("InDialogue", self._shadow[pid][1])
        elif kind == "DialogueEnd":
            for pid, resumed in data["resumed"].items():
                self._shadow[pid] = (resumed["status"], resumed["current_action"])

    def _on_llm_call(self, entry) -> None:
        self._emit(
            "LlmCall",
            self._current_agent,
            {"tag": entry.tag, "request_hash": entry.request_hash, "response_chars": entry.response_chars},
        )

    def _warn(self, agent: str | None, message: str, **extra: Any) -> None:
        self._emit("Warning", agent, {"message": message, **extra})

    # -- public ------------------------------------------------------------------

    def step(self) -> list[SimEvent]:
        """Advance one tick; returns the events it produced."""
        self.tick += 1
        self._events = []
        self._seq = 0
        for agent_id in sorted(self.agents):
            self._current_agent = agent_id
            agent = self.agents[agent_id]
            observations = self._perceive(agent)
            if observations:
                self._emit(
                    "PerceptionBatch",
                    agent_id,
                    {"observations": [vars(o) for o in observations]},
                )
                self.minds[agent_id].observe([o.summary for o in observations], now=self.tick)
                if agent.status != "InDialogue":
                    self._handle_reaction(agent, observations)
            self._progress(agent)
            if agent.status == "Idle":
                if agent.action_queue:
                    self._begin_next_action(agent)
                else:
                    self._refill_actions(agent)
        self._current_agent = None
        # Patch replay drift (status transitions that emitted no event).
        for agent_id in sorted(self.agents):
            agent = self.agents[agent_id]
            actual = (agent.status, agent.current_action.description if agent.current_action else None)
            if self._shadow[agent_id] != actual:
                self._emit(
                    "StatusChange",
                    agent_id,
                    {"status": actual[0], "current_action": actual[1]},
                )
        return list(self._events)

    def run(self, ticks: int, writer=None) -> None:
        for _ in range(ticks):
            events = self.step()
            if writer is not None:
                writer.append(events)

    def state_snapshot(self) -> dict[str, Any]:
        """Same structure a trace replay produces, for equality checks."""
        from .mapio import _placement_json

        agents = {}
        for agent_id in sorted(self.agents):
            agent = self.agents[agent_id]
            agents[agent_id] = {
                "pos": [agent.pos.x, agent.pos.y],
                "status": agent.status,
                "current_action": agent.current_action.description if agent.current_action else None,
                "bag": [it.id for it in bag_items(self.world, agent_id)],
            }
        return {
            "tick": self.tick,
            "agents": agents,
            "items": {
                item_id: _placement_json(self.world.items[item_id].placement)
                for item_id in sorted(self.world.items)
            },
            "dialogues": [
                {
                    "id": s.id,
                    "participants": list(s.participants),
                    "topic": s.topic,
                    "utterances": len(s.transcript),
                }
                for s in sorted(self.sessions.values(), key=lambda s: s.id)
                if not s.closed
            ],
        }

    # -- perception ----------------------------------------------------------------

    def _chebyshev(self, a: GridPos, b: GridPos) -> int:
        return max(abs(a.x - b.x), abs(a.y - b.y))

    def _describe(self, agent: AgentState) -> str:
        profile = self.world.agents[agent.id]
        match agent.status:
            case "Executing":
                doing = agent.current_action.description if agent.current_action else "something"
                return f"{profile.name} is {doing}"
            case "Traveling" | "CollectingItems":
                dest = agent.current_action.area if agent.current_action else "somewhere"
                return f"{profile.name} is heading to {dest}"
            case "InDialogue":
                return f"{profile.name} is in a conversation"
            case _:
                return f"{profile.name} is idling"

    def _perceive(self, agent: AgentState) -> list[Observation]:
        """New observations within the perception radius, deduplicated against
        what this agent already saw (identical sights are not re-reported)."""
        out: list[Observation] = []

        def note(kind: str, subject: str, summary: str, signature: str) -> None:
            key = (kind, subject)
            if agent.last_seen.get(key) != signature:
                agent.last_seen[key] = signature
                out.append(Observation(kind, subject, summary))

        for other_id in sorted(self.agents):
            if other_id == agent.id:
                continue
            other = self.agents[other_id]
            if self._chebyshev(agent.pos, other.pos) > self.perception_radius:
                continue
            summary = self._describe(other)
            note("AgentActivity", other_id, summary, f"{other.status}:{summary}")

        for session in sorted(self.sessions.values(), key=lambda s: s.id):
            if session.closed or agent.id in session.participants:
                continue
            if any(
                self._chebyshev(agent.pos, self.agents[pid].pos) <= self.perception_radius
                for pid in session.participants
            ):
                names = " and ".join(self.world.agents[p].name for p in session.participants)
                note(
                    "DialogueOverheard",
                    session.id,
                    f"{names} are talking about {session.topic}",
                    "open",
                )

        for item_id in sorted(self.world.items):
            item = self.world.items[item_id]
            if not isinstance(item.placement, OnTile):
                continue
            pos = item.placement.pos
            if self._chebyshev(agent.pos, pos) > self.perception_radius:
                continue
            type_name = self.world.item_types[item.type_id].name
            area = area_of_tile(self.world, pos)
            where = area.name if area else f"({pos.x},{pos.y})"
            note("ItemSeen", item_id, f"a {type_name} is at {where}", f"{pos.x},{pos.y}")

        return out

    # -- reactions ----------------------------------------------------------------

    def _mind_context(self, agent: AgentState) -> MindContext:
        area = area_of_tile(self.world, agent.pos)
        visible = {
            self.world.agents[oid].name: oid
            for oid in sorted(self.agents)
            if oid != agent.id
            and self._chebyshev(agent.pos, self.agents[oid].pos) <= self.perception_radius
        }
        return MindContext(
            now=self.tick,
            time_str=self.clock.time_str(self.tick),
            minutes_per_tick=self.clock.minutes_per_tick,
            area_names=sorted(a.name for a in self.world.areas.values()),
            item_type_names=sorted(t.name for t in self.world.item_types.values()),
            current_area=area.name if area else "outside",
            current_action=agent.current_action.description if agent.current_action else "",
            visible_agents=visible,
        )

    def _handle_reaction(self, agent: AgentState, observations: list[Observation]) -> None:
        mind = self.minds[agent.id]
        reaction = mind.react([o.summary for o in observations], self._mind_context(agent))
        match reaction:
            case Continue():
                pass
            case Replan(reason):
                # Takes effect when the current action ends.
                mind.invalidate_plan(reason)
            case InitiateDialogue(target_id, topic):
                self._try_start_dialogue(agent, target_id, topic)

    def _try_start_dialogue(self, agent: AgentState, target_id: str, topic: str) -> None:
        if agent.status not in ("Idle", "Traveling"):
            self._warn(agent.id, f"cannot start a conversation while {agent.status}")
            return
        target = self.agents.get(target_id)
        if target is None:
            self._warn(agent.id, f"dialogue target {target_id!r} unknown")
            return
        if self._chebyshev(agent.pos, target.pos) > self.perception_radius:
            self._warn(agent.id, f"dialogue target {target_id} out of perception range")
            return
        if target.status == "InDialogue":
            self._warn(agent.id, f"dialogue target {target_id} is already in a conversation")
            return
        self._session_count += 1
        session = DialogueSession(
            id=f"d{self._session_count:04d}",
            initiator=agent.id,
            target=target_id,
            topic=topic,
            started_tick=self.tick,
            next_speaker=agent.id,
        )
        self.sessions[session.id] = session
        for participant in (agent, target):
            participant.saved = {
                "status": participant.status,
                "path": list(participant.path),
                "move_budget": participant.move_budget,
                "collect_queue": list(participant.collect_queue),
                "collect_target": participant.collect_target,
                "action_ticks_remaining": participant.action_ticks_remaining,
            }
            participant.status = "InDialogue"
        self._emit(
            "DialogueStart",
            agent.id,
            {"session": session.id, "participants": list(session.participants), "topic": topic},
        )

    # -- status machine ----------------------------------------------------------

    def _progress(self, agent: AgentState) -> None:
        match agent.status:
            case "Idle":
                pass
            case "Traveling":
                self._advance_travel(agent)
            case "CollectingItems":
                self._advance_collect(agent)
            case "Executing":
                agent.action_ticks_remaining -= 1
                if agent.action_ticks_remaining <= 0:
                    self._end_action(agent)
            case "InDialogue":
                session = self._session_of(agent.id)
                if session is not None and session.initiator == agent.id:
                    self._advance_dialogue(session)

    def _speed(self, agent: AgentState) -> float:
        return self.world.agents[agent.id].movement_speed

    def _move_steps(self, agent: AgentState, status_label: str) -> None:
        agent.move_budget += self._speed(agent)
        steps = min(int(agent.move_budget), len(agent.path))
        agent.move_budget -= steps
        if agent.move_budget >= 1.0:
            # Distance cannot be banked while stopped: keep only the fractional
            # carry, so per-tick displacement stays <= ceil(speed).
            agent.move_budget %= 1.0
        if steps <= 0:
            return
        waypoints = agent.path[:steps]
        del agent.path[:steps]
        origin = agent.pos
        agent.pos = waypoints[-1]
        self._emit(
            "Move",
            agent.id,
            {
                "from": [origin.x, origin.y],
                "to": [agent.pos.x, agent.pos.y],
                "waypoints": [[p.x, p.y] for p in waypoints],
                "status": status_label,
            },
        )

    def _advance_travel(self, agent: AgentState) -> None:
        self._move_steps(agent, "Traveling")
        if not agent.path:
            agent.move_budget = 0.0
            self._start_executing(agent)

    def _start_executing(self, agent: AgentState) -> None:
        action = agent.current_action
        assert action is not None
        agent.status = "Executing"
        agent.action_ticks_remaining = max(1, action.duration_ticks)
        self._emit(
            "ActionStart",
            agent.id,
            {
                "description": action.description,
                "area": action.area,
                "required_items": list(action.required_items),
                "duration_ticks": agent.action_ticks_remaining,
                "bag": [it.id for it in bag_items(self.world, agent.id)],
            },
        )

    def _end_action(self, agent: AgentState) -> None:
        action = agent.current_action
        assert action is not None
        self._emit(
            "ActionEnd",
            agent.id,
            {"description": action.description, "area": action.area},
        )
        agent.current_action = None
        agent.status = "Idle"
        if self.minds[agent.id].plan_invalidated:
            agent.action_queue.clear()  # deferred replan lands here

    def _refill_actions(self, agent: AgentState) -> None:
        mind = self.minds[agent.id]
        actions, new_plan, warnings = mind.next_actions(self._mind_context(agent))
        for message in warnings:
            self._warn(agent.id, message)
        if new_plan is not None:
            self._emit(
                "PlanCreated",
                agent.id,
                {
                    "created_tick": new_plan.created_tick,
                    "horizon_ticks": new_plan.horizon_ticks,
                    "entries": [
                        {
                            "description": e.description,
                            "area": e.area,
                            "start_tick": e.start_tick,
                            "duration_ticks": e.duration_ticks,
                        }
                        for e in new_plan.entries
                    ],
                },
            )
        agent.action_queue = list(actions)
        self._begin_next_action(agent)

    def _begin_next_action(self, agent: AgentState) -> None:
        if not agent.action_queue:
            return
        action = agent.action_queue.pop(0)
        agent.current_action = action
        missing = self._missing_required_types(agent, action)
        if missing:
            agent.status = "CollectingItems"
            agent.collect_queue = missing
            agent.collect_target = None
            agent.move_budget = 0.0
            return
        self._setup_travel(agent, action)

    def _missing_required_types(self, agent: AgentState, action: LowLevelAction) -> list[str]:
        carried = {
            self.world.item_types[it.type_id].name for it in bag_items(self.world, agent.id)
        }
        return [name for name in action.required_items if name not in carried]

    def _setup_travel(self, agent: AgentState, action: LowLevelAction) -> None:
        """Route to the action's area; if already inside, start executing now."""
        destination = self._action_destination(agent, action)
        if destination is None:
            agent.status = "Traveling"
            agent.path = []
            self._advance_travel(agent)  # zero distance: begins executing
            return
        try:
            agent.path = find_path(self.world, agent.pos, destination)
        except UnreachableError:
            self._warn(
                agent.id,
                f"area {action.area!r} unreachable from {tuple(agent.pos)}; acting in place",
                action=action.description,
            )
            agent.path = []
        agent.status = "Traveling"
        agent.move_budget = 0.0

    def _area_by_name(self, name: str):
        for area in sorted(self.world.areas.values(), key=lambda a: a.id):
            if area.name == name:
                return area
        return None

    def _action_destination(self, agent: AgentState, action: LowLevelAction) -> GridPos | None:
        """Nearest reachable walkable tile of the target area; None if already there."""
        area = self._area_by_name(action.area)
        if area is None:
            return None  # validated upstream; act in place
        if agent.pos in area.tiles and self.world.is_walkable(agent.pos):
            return None
        candidates = sorted(
            (p for p in area.tiles if self.world.is_walkable(p)),
            key=lambda p: (manhattan(agent.pos, p), p.y, p.x),
        )
        for candidate in candidates:
            try:
                find_path(self.world, agent.pos, candidate)
                return candidate
            except UnreachableError:
                continue
        return None

    # -- item collection ----------------------------------------------------------

    def _advance_collect(self, agent: AgentState) -> None:
        action = agent.current_action
        assert action is not None
        # Drop requirements that are already satisfied or impossible.
        while agent.collect_queue and agent.collect_target is None:
            type_name = agent.collect_queue[0]
            if type_name not in self._missing_required_types(agent, action):
                agent.collect_queue.pop(0)
                continue
            target = self._select_item_target(agent, type_name)
            if target is None:
                # Deadlock avoidance: execute without the item, on the record.
                self._warn(
                    agent.id,
                    f"no reachable {type_name!r}; proceeding without it",
                    action=action.description,
                )
                self.minds[agent.id].observe(
                    [f"could not find any {type_name} for '{action.description}'"],
                    now=self.tick,
                )
                if type_name in action.required_items:
                    action.required_items.remove(type_name)
                agent.collect_queue.pop(0)
                continue
            agent.collect_target = target
        if agent.collect_target is None:
            # Everything gathered (or waived); head for the action area.
            self._setup_travel(agent, action)
            return
        item_id, reach_tile = agent.collect_target
        item = self.world.items.get(item_id)
        if item is None or not self._item_is_grabbable(item_id):
            agent.collect_target = None  # someone else took it; re-target next tick
            return
        if self._within_reach(agent.pos, self._item_tile(item_id)):
            self._pick_up(agent, item_id)
            agent.collect_target = None
            return
        if not agent.path:
            try:
                agent.path = find_path(self.world, agent.pos, reach_tile)
            except UnreachableError:
                agent.collect_target = None
                return
        self._move_steps(agent, "CollectingItems")

    def _item_tile(self, item_id: str) -> GridPos | None:
        from .world import resolve_tile

        resolved = resolve_tile(self.world, item_id)
        return resolved if isinstance(resolved, GridPos) else None

    def _item_is_grabbable(self, item_id: str) -> bool:
        item = self.world.items[item_id]
        if not self.world.item_types[item.type_id].portable:
            return False
        return self._item_tile(item_id) is not None  # not inside someone's bag

    def _within_reach(self, pos: GridPos, tile: GridPos | None) -> bool:
        return tile is not None and manhattan(pos, tile) <= PICKUP_REACH

    def _select_item_target(self, agent: AgentState, type_name: str) -> tuple[str, GridPos] | None:
        """Closest grabbable instance of the named type and a tile to reach it from."""
        type_ids = [t.id for t in self.world.item_types.values() if t.name == type_name]
        candidates = sorted(
            (
                it
                for it in self.world.items.values()
                if it.type_id in type_ids and self._item_is_grabbable(it.id)
            ),
            key=lambda it: (manhattan(agent.pos, self._item_tile(it.id)), it.id),
        )
        for item in candidates:
            tile = self._item_tile(item.id)
            assert tile is not None
            if self._within_reach(agent.pos, tile):
                return (item.id, agent.pos)
            reach_tiles = [tile] if self.world.is_walkable(tile) else []
            reach_tiles += [
                GridPos(tile.x + dx, tile.y + dy)
                for dx, dy in ((0, -1), (-1, 0), (1, 0), (0, 1))
                if self.world.is_walkable(GridPos(tile.x + dx, tile.y + dy))
            ]
            best: tuple[int, int, int, GridPos] | None = None
            for reach in reach_tiles:
                try:
                    length = len(find_path(self.world, agent.pos, reach))
                except UnreachableError:
                    continue
                key = (length, reach.y, reach.x, reach)
                if best is None or key[:3] < best[:3]:
                    best = key
            if best is not None:
                return (item.id, best[3])
        return None



    def _pick_up(self, agent: AgentState, item_id: str) -> None:
        item = self.world.items[item_id]
        prior = item.placement
        from .mapio import _placement_json

        self.world = move_item(self.world, item_id, InBag(agent.id))
        self._emit(
            "PickUp",
            agent.id,
            {
                "item": item_id,
                "type": self.world.item_types[item.type_id].name,
                "from": _placement_json(prior),
                "status": "CollectingItems",
            },
        )

    # -- exposed item ops (used by tests and tools, same rules as agents) --------

    def pick_up(self, agent_id: str, item_id: str) -> None:
        agent = self.agents[agent_id]
        tile = self._item_tile(item_id)
        if not self._within_reach(agent.pos, tile):
            raise OutOfReachError(f"{item_id} is not within reach of {agent_id}")
        if not self.world.item_types[self.world.items[item_id].type_id].portable:
            raise WorldError(f"{item_id} is not portable")
        self._pick_up(agent, item_id)

    def put_down(self, agent_id: str, item_id: str, placement) -> None:
        agent = self.agents[agent_id]
        if self.world.items[item_id].placement != InBag(agent_id):
            raise WorldError(f"{item_id} is not in {agent_id}'s bag")
        match placement:
            case OnTile(pos):
                if manhattan(agent.pos, pos) > PICKUP_REACH:
                    raise OutOfReachError(f"tile {tuple(pos)} is out of reach")
            case InBag(_):
                raise WorldError("cannot put_down into a bag")
            case _:
                container_tile = self._item_tile(placement.item_id)
                if container_tile is None or manhattan(agent.pos, container_tile) > PICKUP_REACH:
                    raise OutOfReachError(f"container {placement.item_id} is out of reach")
        from .mapio import _placement_json

        self.world = move_item(self.world, item_id, placement)
        self._emit(
            "PutDown",
            agent_id,
            {"item": item_id, "placement": _placement_json(placement)},
        )

    # -- dialogue -----------------------------------------------------------------

    def _session_of(self, agent_id: str) -> DialogueSession | None:
        for session in sorted(self.sessions.values(), key=lambda s: s.id):
            if not session.closed and agent_id in session.participants:
                return session
        return None

    def _advance_dialogue(self, session: DialogueSession) -> None:
        """Exchange at most one utterance pair, then close on stop or cap."""
        for _ in range(2):
            if session.closed:
                return
            speaker_id = session.next_speaker
            mind = self.minds[speaker_id]
            partner_id = session.partner_of(speaker_id)
            named = [
                (self.world.agents[sid].name, text) for sid, text in session.transcript
            ]
            try:
                utterance, stop = mind.dialogue_turn(
                    partner_name=self.world.agents[partner_id].name,
                    topic=session.topic,
                    transcript=named,
                    ctx=self._mind_context(self.agents[speaker_id]),
                )
            except Exception as exc:  # unparsable or backend trouble
                from .errors import CacheMissError, FixtureMissError

                if isinstance(exc, (CacheMissError, FixtureMissError)):
                    raise
                self._close_session(session, note=f"conversation broke off ({exc})")
                return
            session.transcript.append((speaker_id, utterance))
            self._emit(
                "DialogueUtterance",
                speaker_id,
                {
                    "session": session.id,
                    "participants": list(session.participants),
                    "text": utterance,
                    "turn": len(session.transcript),
                },
            )
            session.next_speaker = partner_id
            if len(session.transcript) >= self.max_dialogue_utterances:
                self._close_session(session, note="")  # hard cap
                return
            if stop:
                self._close_session(session, note="")
                return

    def _close_session(self, session: DialogueSession, *, note: str) -> None:
        session.closed = True
        resumed: dict[str, dict[str, Any]] = {}
        for participant_id in session.participants:
            participant = self.agents[participant_id]
            saved = participant.saved or {"status": "Idle"}
            participant.status = saved.get("status", "Idle")
            participant.path = saved.get("path", [])
            participant.move_budget = saved.get("move_budget", 0.0)
            participant.collect_queue = saved.get("collect_queue", [])
            participant.collect_target = saved.get("collect_target")
            participant.action_ticks_remaining = saved.get("action_ticks_remaining", 0)
            participant.saved = None
            resumed[participant_id] = {
                "status": participant.status,
                "current_action": participant.current_action.description
                if participant.current_action
                else None,
            }
        transcript_text = "; ".join(
            f"{self.world.agents[sid].name}: {text}" for sid, text in session.transcript
        )
        self._emit(
            "DialogueEnd",
            session.initiator,
            {
                "session": session.id,
                "participants": list(session.participants),
                "resumed": resumed,
                "utterances": len(session.transcript),
                "note": note,
            },
        )
        for participant_id in session.participants:
            mind = self.minds[participant_id]
            partner = self.world.agents[session.partner_of(participant_id)].name
            text = f"talked with {partner} about {session.topic}: {transcript_text}" if transcript_text else f"spoke briefly with {partner}"
            from .mind import score_importance

            importance = score_importance(
                mind.backend,
                mind.templates,
                text,
                tag=f"importance:{participant_id}:{self.tick}",
            )
            mind.remember(kind="Dialogue", text=text, importance=importance, tick=self.tick)
        del self.sessions[session.id]


def ceil_speed(speed: float) -> int:
    return int(math.ceil(speed))
