"""Simulation kernel: movement physics, collection, perception, dialogue."""

from __future__ import annotations

import pytest

from townlet.engine import (
    DialogueSession,
    PERCEPTION_RADIUS,
    SimClock,
    Simulation,
    ceil_speed,
)
from townlet.errors import CacheMissError, OutOfReachError, UnknownIdError, WorldError
from townlet.mind import Continue, InitiateDialogue, LowLevelAction, Replan
from townlet.world import Area, GridPos, InBag, InContainer, ItemInstance, OnTile

from townlet.prompts import load_templates

from .conftest import make_agent, make_item, make_item_type, make_world

TEMPLATES = load_templates()


class StubBackend:
    kind = "stub"
    model_name = "stub"

    def __init__(self) -> None:
        self._listeners = []

    def complete(self, request) -> str:
        return "5"  # importance prompts are the only calls a stub sees

    def transcript(self):
        return []

    def add_listener(self, listener) -> None:
        if listener not in self._listeners:
            self._listeners.append(listener)


class StubMind:
    """Hand-scripted mind: queued action batches, queued reactions, dialogue fn."""

    def __init__(self, *, batches=(), reactions=(), lines=None):
        self.backend = StubBackend()
        self.templates = TEMPLATES
        self.batches = [list(batch) for batch in batches]
        self.reactions = list(reactions)
        self.lines = lines
        self.plan_invalidated = False
        self.observed: list[str] = []
        self.remembered: list[dict] = []
        self.next_actions_calls = 0
        self._line_count = 0

    def observe(self, summaries, *, now):
        self.observed.extend(summaries)
        return []

    def react(self, observations, ctx):
        if self.reactions:
            return self.reactions.pop(0)
        return Continue()

    def invalidate_plan(self, reason) -> None:
        self.plan_invalidated = True

    def next_actions(self, ctx):
        self.next_actions_calls += 1
        self.plan_invalidated = False
        if self.batches:
            return self.batches.pop(0), None, []
        return [], None, []

    def remember(self, *, kind, text, importance, tick):
        self.remembered.append({"kind": kind, "text": text, "tick": tick})

    def dialogue_turn(self, *, partner_name, topic, transcript, ctx):
        self._line_count += 1
        if self.lines is None:
            return (f"line {self._line_count}", False)
        if callable(self.lines):
            return self.lines(self._line_count, transcript)
        return self.lines.pop(0)


def act(description="do the thing", area="Plot", items=(), duration=3) -> LowLevelAction:
    return LowLevelAction(description, area, list(items), duration)


def east_world(**kwargs):
    """10x8 world with a Plot sector everywhere plus an East room at x>=8."""
    east = Area(
        "east",
        "East",
        "room",
        frozenset(GridPos(x, y) for x in range(8, 10) for y in range(8)),
        parent="plot",
    )
    plot = Area(
        "plot",
        "Plot",
        "sector",
        frozenset(GridPos(x, y) for x in range(10) for y in range(8)),
    )
    return make_world(areas=[plot, east], **kwargs)


def sim(world, minds, **kwargs) -> Simulation:
    return Simulation(world, minds, **kwargs)


def events_of(batch, kind):
    return [e for e in batch if e.kind == kind]


def run_collect(simulation, kinds, ticks):
    """Run and gather events of the given kinds, tagged with their tick."""
    out = []
    for _ in range(ticks):
        for event in simulation.step():
            if event.kind in kinds:
                out.append(event)
    return out


class TestSimClock:
    def test_time_str(self) -> None:
        clock = SimClock()
        assert clock.time_str(0) == "07:00"
        assert clock.time_str(90) == "08:30"

    def test_day_rollover(self) -> None:
        clock = SimClock(start_time="23:50")
        assert clock.time_str(20) == "00:10 (day 2)"

    def test_minutes_per_tick(self) -> None:
        clock = SimClock(minutes_per_tick=5)
        assert clock.minute_of(12) == 7 * 60 + 60

    def test_ceil_speed(self) -> None:
        assert ceil_speed(2.5) == 3
        assert ceil_speed(4.0) == 4


class TestConstruction:
    def test_agent_without_mind_rejected(self) -> None:
        world = make_world(agents=[make_agent()])
        with pytest.raises(UnknownIdError):
            Simulation(world, {})


class TestMovement:
    def test_travel_emits_move_then_action_start(self) -> None:
        world = east_world(agents=[make_agent(speed=4.0)])
        mind = StubMind(batches=[[act("inspect the hedge", "East", duration=3)]])
        simulation = sim(world, {"ada": mind})

        t1 = simulation.step()
        assert events_of(t1, "Move") == []
        assert simulation.agents["ada"].status == "Traveling"

        t2 = simulation.step()
        moves = events_of(t2, "Move")
        assert len(moves) == 1
        assert moves[0].data["from"] == [1, 1]
        assert len(moves[0].data["waypoints"]) == 4

        # 7 tiles to go; speed 4 finishes the leg on the next tick
        t3 = simulation.step()
        starts = events_of(t3, "ActionStart")
        assert len(starts) == 1
        assert simulation.agents["ada"].pos in world.areas["east"].tiles

    def test_waypoints_are_unit_steps_on_walkable_tiles(self) -> None:
        world = east_world(blocked={(5, y) for y in range(1, 8)}, agents=[make_agent(speed=3.0)])
        mind = StubMind(batches=[[act("wander", "East", duration=1)]])
        simulation = sim(world, {"ada": mind})
        previous = simulation.agents["ada"].pos
        for _ in range(12):
            for event in events_of(simulation.step(), "Move"):
                for wx, wy in event.data["waypoints"]:
                    step = GridPos(wx, wy)
                    assert world.is_walkable(step)
                    assert abs(step.x - previous.x) + abs(step.y - previous.y) == 1
                    previous = step

    def test_fractional_speed_accumulates(self) -> None:
        world = east_world(agents=[make_agent(speed=0.5)])
        mind = StubMind(batches=[[act("amble", "East", duration=1)]])
        simulation = sim(world, {"ada": mind})
        step_counts = []
        for _ in range(9):
            moves = events_of(simulation.step(), "Move")
            step_counts.append(sum(len(m.data["waypoints"]) for m in moves))
        # refill tick, then one tile every second tick
        assert step_counts[:7] == [0, 0, 1, 0, 1, 0, 1]

    def test_displacement_never_exceeds_ceil_speed(self) -> None:
        # A short hop before a pickup must not bank distance for later ticks.
        world = east_world(
            agents=[make_agent(speed=4.0)],
            item_types=[make_item_type(type_id="cup", name="cup")],
            items=[make_item(item_id="cup1", type_id="cup", on_tile=(3, 1))],
        )
        mind = StubMind(batches=[[act("deliver the cup", "East", items=("cup",), duration=2)]])
        simulation = sim(world, {"ada": mind})
        for _ in range(12):
            for event in events_of(simulation.step(), "Move"):
                assert len(event.data["waypoints"]) <= ceil_speed(4.0)
                (fx, fy), (tx, ty) = event.data["from"], event.data["to"]
                assert abs(fx - tx) + abs(fy - ty) <= ceil_speed(4.0)


class TestCollection:
    def collect_world(self, items, item_types, speed=4.0):
        return east_world(
            agents=[make_agent(speed=speed)], item_types=item_types, items=items
        )

    def test_pickup_requires_reach_and_one_per_tick(self) -> None:
        world = self.collect_world(
            items=[
                make_item(item_id="cup1", type_id="cup", on_tile=(2, 1)),
                make_item(item_id="plate1", type_id="plate", on_tile=(0, 1)),
            ],
            item_types=[
                make_item_type(type_id="cup", name="cup"),
                make_item_type(type_id="plate", name="plate"),
            ],
        )
        mind = StubMind(
            batches=[[act("set the table", "Plot", items=("cup", "plate"), duration=2)]]
        )
        simulation = sim(world, {"ada": mind})
        picks = run_collect(simulation, {"PickUp"}, 6)
        assert [p.data["item"] for p in picks] == ["cup1", "plate1"]
        assert picks[0].tick != picks[1].tick  # one collection activity per tick
        assert simulation.world.items["cup1"].placement == InBag("ada")
        assert simulation.world.items["plate1"].placement == InBag("ada")

    def test_action_start_waits_for_required_items(self) -> None:
        world = self.collect_world(
            items=[make_item(item_id="cup1", type_id="cup", on_tile=(6, 6))],
            item_types=[make_item_type(type_id="cup", name="cup")],
        )
        mind = StubMind(batches=[[act("brew tea", "Plot", items=("cup",), duration=2)]])
        simulation = sim(world, {"ada": mind})
        for _ in range(10):
            for event in simulation.step():
                if event.kind == "ActionStart":
                    carried = {
                        simulation.world.item_types[
                            simulation.world.items[iid].type_id
                        ].name
                        for iid in event.data["bag"]
                    }
                    assert set(event.data["required_items"]) <= carried
                    return
        pytest.fail("action never started")

    def test_unfindable_required_item_is_waived_with_warning(self) -> None:
        world = self.collect_world(
            items=[],
            item_types=[make_item_type(type_id="cup", name="cup")],
        )
        mind = StubMind(batches=[[act("brew tea", "Plot", items=("cup",), duration=2)]])
        simulation = sim(world, {"ada": mind})
        seen = run_collect(simulation, {"Warning", "ActionStart"}, 5)
        warning = next(e for e in seen if e.kind == "Warning")
        assert "no reachable 'cup'" in warning.data["message"]
        start = next(e for e in seen if e.kind == "ActionStart")
        assert start.data["required_items"] == []
        assert any("could not find any cup" in text for text in mind.observed)

    def test_non_portable_items_are_never_collected(self) -> None:
        world = self.collect_world(
            items=[make_item(item_id="anvil1", type_id="anvil", on_tile=(2, 1))],
            item_types=[make_item_type(type_id="anvil", name="anvil", portable=False)],
        )
        mind = StubMind(batches=[[act("forge", "Plot", items=("anvil",), duration=2)]])
        simulation = sim(world, {"ada": mind})
        seen = run_collect(simulation, {"Warning", "PickUp", "ActionStart"}, 5)
        assert not any(e.kind == "PickUp" for e in seen)
        assert any(e.kind == "Warning" for e in seen)
        assert simulation.world.items["anvil1"].placement == OnTile(GridPos(2, 1))

    def test_item_conservation_through_collection(self) -> None:
        world = self.collect_world(
            items=[make_item(item_id="cup1", type_id="cup", on_tile=(4, 2))],
            item_types=[make_item_type(type_id="cup", name="cup")],
        )
        mind = StubMind(batches=[[act("fetch", "East", items=("cup",), duration=1)]])
        simulation = sim(world, {"ada": mind})
        before = sorted(simulation.world.items)
        for _ in range(10):
            simulation.step()
            assert sorted(simulation.world.items) == before


class TestManualItemOps:
    def world_with_bag_item(self):
        return east_world(
            agents=[make_agent()],
            item_types=[
                make_item_type(type_id="cup", name="cup"),
                make_item_type(type_id="chest", name="chest", capacity=2, portable=False),
            ],
            items=[
                ItemInstance(id="cup1", type_id="cup", placement=InBag("ada")),
                make_item(item_id="chest1", type_id="chest", on_tile=(2, 1)),
            ],
        )

    def test_put_down_on_adjacent_tile(self) -> None:
        simulation = sim(self.world_with_bag_item(), {"ada": StubMind()})
        simulation.put_down("ada", "cup1", OnTile(GridPos(1, 2)))
        assert simulation.world.items["cup1"].placement == OnTile(GridPos(1, 2))

    def test_put_down_far_tile_rejected(self) -> None:
        simulation = sim(self.world_with_bag_item(), {"ada": StubMind()})
        with pytest.raises(OutOfReachError):
            simulation.put_down("ada", "cup1", OnTile(GridPos(7, 7)))

    def test_put_down_into_adjacent_container(self) -> None:
        simulation = sim(self.world_with_bag_item(), {"ada": StubMind()})
        simulation.put_down("ada", "cup1", InContainer("chest1"))
        assert simulation.world.items["cup1"].placement == InContainer("chest1")

    def test_put_down_requires_holding(self) -> None:
        simulation = sim(self.world_with_bag_item(), {"ada": StubMind()})
        simulation.put_down("ada", "cup1", OnTile(GridPos(1, 1)))
        with pytest.raises(WorldError):
            simulation.put_down("ada", "cup1", OnTile(GridPos(1, 1)))

    def test_pick_up_from_adjacent_container(self) -> None:
        simulation = sim(self.world_with_bag_item(), {"ada": StubMind()})
        simulation.put_down("ada", "cup1", InContainer("chest1"))
        simulation.pick_up("ada", "cup1")  # container opens implicitly
        assert simulation.world.items["cup1"].placement == InBag("ada")

    def test_pick_up_out_of_reach(self) -> None:
        world = east_world(
            agents=[make_agent()],
            item_types=[make_item_type(type_id="cup", name="cup")],
            items=[make_item(item_id="cup1", type_id="cup", on_tile=(6, 6))],
        )
        simulation = sim(world, {"ada": StubMind()})
        with pytest.raises(OutOfReachError):
            simulation.pick_up("ada", "cup1")

    def test_pick_up_non_portable_rejected(self) -> None:
        world = east_world(
            agents=[make_agent()],
            item_types=[make_item_type(type_id="anvil", name="anvil", portable=False)],
            items=[make_item(item_id="anvil1", type_id="anvil", on_tile=(1, 2))],
        )
        simulation = sim(world, {"ada": StubMind()})
        with pytest.raises(WorldError):
            simulation.pick_up("ada", "anvil1")


class TestPerception:
    def two_agent_world(self, *, bo_start=(3, 1), bo_speed=4.0):
        return east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=bo_start, speed=bo_speed),
            ]
        )

    def test_identical_sights_not_rereported(self) -> None:
        world = self.two_agent_world()
        simulation = sim(world, {"ada": StubMind(), "bo": StubMind()})
        t1 = simulation.step()
        assert any(e.kind == "PerceptionBatch" and e.agent == "ada" for e in t1)
        t2 = simulation.step()
        assert not any(e.kind == "PerceptionBatch" for e in t2)

    def test_status_change_is_rereported(self) -> None:
        world = self.two_agent_world()
        bo = StubMind(batches=[[act("water the flowers", "Plot", duration=4)]])
        simulation = sim(world, {"ada": StubMind(), "bo": bo})
        simulation.step()
        t2 = simulation.step()
        batch = next(e for e in t2 if e.kind == "PerceptionBatch" and e.agent == "ada")
        summaries = [o["summary"] for o in batch.data["observations"]]
        assert any("water the flowers" in s for s in summaries)

    def test_out_of_radius_not_seen(self) -> None:
        world = self.two_agent_world(bo_start=(9, 7))
        simulation = sim(world, {"ada": StubMind(), "bo": StubMind()})
        for _ in range(3):
            assert not any(e.kind == "PerceptionBatch" for e in simulation.step())

    def test_item_seen_with_area_name(self) -> None:
        world = east_world(
            agents=[make_agent()],
            item_types=[make_item_type(type_id="kettle", name="kettle")],
            items=[make_item(item_id="k1", type_id="kettle", on_tile=(3, 2))],
        )
        mind = StubMind()
        simulation = sim(world, {"ada": mind})
        simulation.step()
        assert any(s == "a kettle is at Plot" for s in mind.observed)

    def test_bystander_overhears_dialogue(self) -> None:
        world = east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=(2, 1)),
                make_agent(agent_id="cy", name="Cy Quill", start=(3, 3)),
            ]
        )
        ada = StubMind(reactions=[InitiateDialogue("bo", "the harvest")])
        cy = StubMind()
        simulation = sim(world, {"ada": ada, "bo": StubMind(), "cy": cy})
        simulation.step()
        assert any("are talking about the harvest" in s for s in cy.observed)


class TestReactions:
    def test_replan_clears_queue_at_action_end(self) -> None:
        world = east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=(3, 1)),
            ]
        )
        ada = StubMind(
            batches=[
                [act("first chore", "Plot", duration=2), act("stale chore", "Plot", duration=2)],
                [act("fresh chore", "Plot", duration=2)],
            ],
            reactions=[Continue(), Replan("things changed")],
        )
        bo = StubMind(batches=[[act("sweep", "Plot", duration=6)]])
        simulation = sim(world, {"ada": ada, "bo": bo})
        started = []
        for _ in range(6):
            for event in simulation.step():
                if event.kind == "ActionStart" and event.agent == "ada":
                    started.append(event.data["description"])
        assert started == ["first chore", "fresh chore"]
        assert ada.batches == []  # the replacement batch was fetched

    def test_dialogue_requires_visible_target(self) -> None:
        world = east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=(9, 7)),
            ],
            item_types=[make_item_type(type_id="cup", name="cup")],
            items=[make_item(item_id="cup1", type_id="cup", on_tile=(2, 2))],
        )
        ada = StubMind(reactions=[InitiateDialogue("bo", "gossip")])
        simulation = sim(world, {"ada": ada, "bo": StubMind()})
        t1 = simulation.step()
        warnings = [e for e in t1 if e.kind == "Warning"]
        assert warnings and "out of perception range" in warnings[0].data["message"]
        assert simulation.sessions == {}

    def test_busy_target_rejected(self) -> None:
        world = east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=(2, 1)),
                make_agent(agent_id="cy", name="Cy Quill", start=(3, 2)),
            ]
        )
        ada = StubMind(reactions=[InitiateDialogue("bo", "news")])
        cy = StubMind(reactions=[InitiateDialogue("bo", "news")])
        simulation = sim(world, {"ada": ada, "bo": StubMind(), "cy": cy})
        t1 = simulation.step()
        warnings = [e for e in t1 if e.kind == "Warning" and e.agent == "cy"]
        assert warnings and "already in a conversation" in warnings[0].data["message"]

    def test_executing_initiator_rejected(self) -> None:
        world = east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=(3, 1)),
            ]
        )
        ada = StubMind(
            batches=[[act("long chore", "Plot", duration=8)]],
            reactions=[Continue(), InitiateDialogue("bo", "anything")],
        )
        bo = StubMind(batches=[[act("sweep", "Plot", duration=6)]])
        simulation = sim(world, {"ada": ada, "bo": bo})
        simulation.step()
        t2 = simulation.step()
        warnings = [e for e in t2 if e.kind == "Warning" and e.agent == "ada"]
        assert warnings and "while Executing" in warnings[0].data["message"]


class TestDialogue:
    def pair_world(self):
        return east_world(
            agents=[
                make_agent(),
                make_agent(agent_id="bo", name="Bo Ruth", start=(2, 1)),
            ]
        )

    def test_never_stopping_speakers_hit_cap_of_twelve(self) -> None:
        ada = StubMind(reactions=[InitiateDialogue("bo", "the festival")])
        bo = StubMind()
        simulation = sim(self.pair_world(), {"ada": ada, "bo": bo})
        utterances = []
        ends = []
        for _ in range(10):
            batch = simulation.step()
            tick_utterances = events_of(batch, "DialogueUtterance")
            assert len(tick_utterances) <= 2  # at most one exchange pair per tick
            utterances.extend(tick_utterances)
            ends.extend(events_of(batch, "DialogueEnd"))
        assert len(utterances) == 12
        assert [u.agent for u in utterances] == ["ada", "bo"] * 6  # strict alternation
        assert [u.data["turn"] for u in utterances] == list(range(1, 13))
        assert len(ends) == 1 and ends[0].data["utterances"] == 12
        assert simulation.sessions == {}

    def test_stop_flag_closes_early(self) -> None:
        ada = StubMind(
            reactions=[InitiateDialogue("bo", "a question")],
            lines=[("Do you have a minute?", False)],
        )
        bo = StubMind(lines=[("Not right now, sorry.", True)])
        simulation = sim(self.pair_world(), {"ada": ada, "bo": bo})
        batch = simulation.step()
        assert len(events_of(batch, "DialogueUtterance")) == 2
        end = events_of(batch, "DialogueEnd")[0]
        assert end.data["utterances"] == 2

    def test_both_sides_store_dialogue_memory(self) -> None:
        ada = StubMind(
            reactions=[InitiateDialogue("bo", "the weather")],
            lines=[("Nice day.", False)],
        )
        bo = StubMind(lines=[("Sure is.", True)])
        simulation = sim(self.pair_world(), {"ada": ada, "bo": bo})
        simulation.step()
        for mind, partner in ((ada, "Bo Ruth"), (bo, "Ada Test")):
            memory = next(m for m in mind.remembered if m["kind"] == "Dialogue")
            assert partner in memory["text"] and "the weather" in memory["text"]

    def test_participants_do_not_move_mid_dialogue(self) -> None:
        world = east_world(
            agents=[
                make_agent(speed=2.0),
                make_agent(agent_id="bo", name="Bo Ruth", start=(3, 1)),
            ]
        )
        ada = StubMind(
            batches=[[act("head east", "East", duration=2)]],
            reactions=[Continue(), InitiateDialogue("bo", "a quick word")],
            lines=[("One thing—", False), ("Thanks!", True)],
        )
        bo = StubMind(
            batches=[[act("trim the roses", "Plot", duration=9)]],
            lines=[("Yes?", True)],
        )
        simulation = sim(world, {"ada": ada, "bo": bo})
        simulation.step()  # ada starts traveling, bo starts executing
        t2 = simulation.step()  # dialogue opens and closes mid-travel
        assert events_of(t2, "DialogueEnd")
        assert not any(e.kind == "Move" and e.agent == "ada" for e in t2)
        assert simulation.agents["ada"].status == "Traveling"
        assert simulation.agents["bo"].status == "Executing"
        t3 = simulation.step()
        assert any(e.kind == "Move" and e.agent == "ada" for e in t3)

    def test_turn_failure_closes_with_note(self) -> None:
        def broken(count, transcript):
            raise ValueError("gibberish")

        ada = StubMind(reactions=[InitiateDialogue("bo", "oops")], lines=broken)
        simulation = sim(self.pair_world(), {"ada": ada, "bo": StubMind()})
        batch = simulation.step()
        end = events_of(batch, "DialogueEnd")[0]
        assert "broke off" in end.data["note"]

    def test_cache_miss_during_dialogue_is_fatal(self) -> None:
        def missing(count, transcript):
            raise CacheMissError("not recorded")

        ada = StubMind(reactions=[InitiateDialogue("bo", "oops")], lines=missing)
        simulation = sim(self.pair_world(), {"ada": ada, "bo": StubMind()})
        with pytest.raises(CacheMissError):
            simulation.step()

    def test_snapshot_reports_open_dialogue(self) -> None:
        ada = StubMind(reactions=[InitiateDialogue("bo", "a long story")])
        simulation = sim(self.pair_world(), {"ada": ada, "bo": StubMind()})
        simulation.step()
        snapshot = simulation.state_snapshot()
        (open_session,) = snapshot["dialogues"]
        assert open_session["participants"] == ["ada", "bo"]
        assert open_session["utterances"] == 2


class TestEventStream:
    def test_seq_restarts_each_tick_and_is_dense(self) -> None:
        world = east_world(
            agents=[make_agent(), make_agent(agent_id="bo", name="Bo Ruth", start=(3, 1))]
        )
        simulation = sim(world, {"ada": StubMind(), "bo": StubMind()})
        for expected_tick in (1, 2, 3):
            batch = simulation.step()
            assert all(e.tick == expected_tick for e in batch)
            assert [e.seq for e in batch] == list(range(len(batch)))

    def test_status_change_patches_silent_transitions(self) -> None:
        world = east_world(agents=[make_agent(speed=4.0)])
        mind = StubMind(batches=[[act("stroll", "East", duration=2)]])
        simulation = sim(world, {"ada": mind})
        t1 = simulation.step()
        patch = next(e for e in t1 if e.kind == "StatusChange")
        assert patch.data["status"] == "Traveling"
        assert patch.data["current_action"] == "stroll"
