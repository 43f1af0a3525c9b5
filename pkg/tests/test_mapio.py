"""Validation codes, bundle round-trips, and content hashing."""

from __future__ import annotations

import json
import random

import pytest

from townlet import mapio
from townlet.errors import BundleError
from townlet.mapio import (
    document_from_world,
    load_map,
    map_content_hash,
    save_map,
    validate_map,
    world_from_document,
)
from townlet.world import MAX_AGENTS, MAX_ITEM_TYPES, Area, GridPos, InBag, InContainer

from .conftest import make_agent, make_item, make_item_type, make_world
from .worldgen import random_valid_world


def codes(world) -> set[str]:
    return validate_map(world).codes()


def agents_up_to(count: int) -> list:
    return [
        make_agent(agent_id=f"a{i:02d}", name=f"Resident {i}", start=(1 + i % 8, 1 + i // 8))
        for i in range(count)
    ]


class TestLimits:
    def test_sixteen_agents_rejected(self) -> None:
        world = make_world(agents=agents_up_to(MAX_AGENTS + 1))
        assert mapio.AGENT_LIMIT in codes(world)

    def test_fifteen_agents_accepted(self) -> None:
        world = make_world(agents=agents_up_to(MAX_AGENTS))
        assert validate_map(world).ok

    def test_101_item_types_rejected(self) -> None:
        types = [make_item_type(type_id=f"t{i}") for i in range(MAX_ITEM_TYPES + 1)]
        world = make_world(item_types=types)
        assert mapio.ITEM_TYPE_LIMIT in codes(world)

    def test_100_item_types_accepted(self) -> None:
        types = [make_item_type(type_id=f"t{i}") for i in range(MAX_ITEM_TYPES)]
        world = make_world(item_types=types)
        assert validate_map(world).ok


class TestAreaViolations:
    def test_bad_area_kind(self) -> None:
        areas = [Area("plot", "Plot", "zone", frozenset({GridPos(1, 1)}))]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.BAD_AREA_KIND in codes(world)

    def test_unknown_parent_area(self) -> None:
        areas = [Area("plot", "Plot", "sector", frozenset({GridPos(1, 1)}), parent="ghost")]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.UNKNOWN_AREA in codes(world)

    def test_unknown_home_area(self) -> None:
        world = make_world(agents=[make_agent(home_area="ghost")])
        assert mapio.UNKNOWN_AREA in codes(world)

    def test_empty_area(self) -> None:
        areas = [
            Area("plot", "Plot", "sector", frozenset(GridPos(x, y) for x in range(10) for y in range(8))),
            Area("void", "Void", "room", frozenset(), parent="plot"),
        ]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.EMPTY_AREA in codes(world)

    def test_area_parent_cycle(self) -> None:
        tiles_a = frozenset({GridPos(1, 1)})
        tiles_b = frozenset({GridPos(2, 1)})
        areas = [
            Area("a", "A", "sector", tiles_a, parent="b"),
            Area("b", "B", "sector", tiles_b, parent="a"),
        ]
        world = make_world(areas=areas, agents=[make_agent(home_area="a")])
        assert mapio.AREA_PARENT_CYCLE in codes(world)

    def test_duplicate_area_name(self) -> None:
        all_tiles = frozenset(GridPos(x, y) for x in range(10) for y in range(8))
        areas = [
            Area("plot", "Plot", "sector", all_tiles),
            Area("plot2", "Plot", "room", frozenset({GridPos(1, 1)}), parent="plot"),
        ]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.DUPLICATE_NAME in codes(world)

    def test_subarea_not_contained(self) -> None:
        areas = [
            Area("plot", "Plot", "sector", frozenset({GridPos(1, 1), GridPos(2, 1)})),
            Area("room", "Room", "room", frozenset({GridPos(5, 5)}), parent="plot"),
        ]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.SUBAREA_NOT_CONTAINED in codes(world)

    def test_sibling_overlap(self) -> None:
        all_tiles = frozenset(GridPos(x, y) for x in range(10) for y in range(8))
        shared = frozenset({GridPos(3, 3), GridPos(4, 3)})
        areas = [
            Area("plot", "Plot", "sector", all_tiles),
            Area("left", "Left", "room", shared, parent="plot"),
            Area("right", "Right", "room", shared | {GridPos(5, 3)}, parent="plot"),
        ]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.AREA_OVERLAP in codes(world)

    def test_nested_areas_do_not_overlap(self) -> None:
        all_tiles = frozenset(GridPos(x, y) for x in range(10) for y in range(8))
        inner = frozenset({GridPos(3, 3), GridPos(4, 3)})
        areas = [
            Area("plot", "Plot", "sector", all_tiles),
            Area("room", "Room", "room", inner, parent="plot"),
        ]
        world = make_world(areas=areas, agents=[make_agent()])
        assert mapio.AREA_OVERLAP not in codes(world)


class TestItemAndAgentViolations:
    def test_duplicate_type_name(self) -> None:
        types = [
            make_item_type(type_id="t1", name="widget"),
            make_item_type(type_id="t2", name="widget"),
        ]
        world = make_world(item_types=types)
        assert mapio.DUPLICATE_NAME in codes(world)

    def test_bad_capacity(self) -> None:
        world = make_world(item_types=[make_item_type(capacity=-1)])
        assert mapio.BAD_CAPACITY in codes(world)

    def test_unknown_type(self) -> None:
        world = make_world(items=[make_item(item_id="i1", type_id="ghost")])
        assert mapio.UNKNOWN_TYPE in codes(world)

    def test_item_out_of_bounds(self) -> None:
        world = make_world(
            item_types=[make_item_type()],
            items=[make_item(item_id="i1", type_id="box", on_tile=(99, 0))],
        )
        assert mapio.OUT_OF_BOUNDS in codes(world)

    def test_agent_out_of_bounds(self) -> None:
        world = make_world(agents=[make_agent(start=(99, 0))])
        assert mapio.OUT_OF_BOUNDS in codes(world)

    def test_unknown_bag_owner(self) -> None:
        item = make_item(item_id="i1", type_id="box")
        item = type(item)(id="i1", type_id="box", placement=InBag("ghost"))
        world = make_world(item_types=[make_item_type()], items=[item])
        assert mapio.UNKNOWN_AGENT in codes(world)

    def test_non_portable_in_bag(self) -> None:
        item = make_item(item_id="i1", type_id="anvil")
        item = type(item)(id="i1", type_id="anvil", placement=InBag("ada"))
        world = make_world(
            item_types=[make_item_type(type_id="anvil", portable=False)],
            items=[item],
            agents=[make_agent()],
        )
        assert mapio.NOT_PORTABLE_IN_BAG in codes(world)

    def test_unknown_container_item(self) -> None:
        item = make_item(item_id="i1", type_id="box")
        item = type(item)(id="i1", type_id="box", placement=InContainer("ghost"))
        world = make_world(item_types=[make_item_type()], items=[item])
        assert mapio.UNKNOWN_ITEM in codes(world)

    def test_holder_not_a_container(self) -> None:
        world = make_world(
            item_types=[make_item_type(type_id="box", capacity=0)],
            items=[
                make_item(item_id="host", type_id="box"),
                make_item(item_id="i1", type_id="box", in_container="host"),
            ],
        )
        assert mapio.NOT_A_CONTAINER in codes(world)

    def test_capacity_exceeded(self) -> None:
        world = make_world(
            item_types=[
                make_item_type(type_id="crate", capacity=1),
                make_item_type(type_id="pebble"),
            ],
            items=[
                make_item(item_id="host", type_id="crate"),
                make_item(item_id="p1", type_id="pebble", in_container="host"),
                make_item(item_id="p2", type_id="pebble", in_container="host"),
            ],
        )
        assert mapio.CAPACITY_EXCEEDED in codes(world)

    def test_container_cycle(self) -> None:
        world = make_world(
            item_types=[make_item_type(type_id="crate", capacity=2)],
            items=[
                make_item(item_id="outer", type_id="crate", in_container="inner"),
                make_item(item_id="inner", type_id="crate", in_container="outer"),
            ],
        )
        assert mapio.CONTAINER_CYCLE in codes(world)

    def test_unwalkable_start(self) -> None:
        world = make_world(blocked={(1, 1)}, agents=[make_agent(start=(1, 1))])
        assert mapio.UNWALKABLE_START in codes(world)

    def test_bad_speed(self) -> None:
        world = make_world(agents=[make_agent(speed=0.0)])
        assert mapio.BAD_SPEED in codes(world)


class TestReport:
    def test_ok_report_has_no_violations(self) -> None:
        report = validate_map(make_world(agents=[make_agent()]))
        assert report.ok and report.violations == []

    def test_report_json_shape(self) -> None:
        report = validate_map(make_world(agents=[make_agent(speed=-2.0)]))
        doc = report.to_json()
        assert doc["ok"] is False
        assert doc["violations"][0]["code"] == mapio.BAD_SPEED
        assert "subject" in doc["violations"][0]
        assert "message" in doc["violations"][0]


class TestRoundTrip:
    def test_document_round_trip_identity(self) -> None:
        world = make_world(
            item_types=[make_item_type(type_id="crate", capacity=3), make_item_type()],
            items=[
                make_item(item_id="host", type_id="crate"),
                make_item(item_id="i1", type_id="box", in_container="host"),
            ],
            agents=[make_agent()],
        )
        assert world_from_document(document_from_world(world)) == world

    def test_save_load_identity(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        save_map(world, tmp_path / "m")
        assert load_map(tmp_path / "m") == world

    def test_save_is_byte_deterministic(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        save_map(world, tmp_path / "one")
        save_map(world, tmp_path / "two")
        for name in (mapio.META_FILE, mapio.WALKABLE_FILE, mapio.AREA_IDS_FILE):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()

    def test_random_worlds_round_trip(self, tmp_path) -> None:
        rng = random.Random(2024)
        for i in range(50):
            world = random_valid_world(rng, map_index=i)
            assert validate_map(world).ok
            bundle = tmp_path / f"m{i}"
            save_map(world, bundle)
            again = load_map(bundle)
            assert again == world
            assert map_content_hash(again) == map_content_hash(world)

    def test_save_rejects_invalid_world(self, tmp_path) -> None:
        world = make_world(agents=[make_agent(speed=0.0)])
        with pytest.raises(mapio.MapValidationError):
            save_map(world, tmp_path / "bad")
        assert not (tmp_path / "bad" / mapio.META_FILE).exists()


class TestContentHash:
    def test_hash_stable_across_loads(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        save_map(world, tmp_path / "m")
        assert map_content_hash(load_map(tmp_path / "m")) == map_content_hash(world)

    def test_hash_reacts_to_content_drift(self) -> None:
        base = make_world(agents=[make_agent()])
        moved = make_world(agents=[make_agent(start=(2, 2))])
        assert map_content_hash(base) != map_content_hash(moved)


class TestLoadErrors:
    def test_missing_bundle_dir(self, tmp_path) -> None:
        with pytest.raises(BundleError):
            load_map(tmp_path / "nope")

    def test_corrupt_meta_json(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        bundle = save_map(world, tmp_path / "m")
        (bundle / mapio.META_FILE).write_text("{not json", encoding="utf-8")
        with pytest.raises(BundleError):
            load_map(bundle)

    def test_wrong_grid_width(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        bundle = save_map(world, tmp_path / "m")
        (bundle / mapio.WALKABLE_FILE).write_text("1,1\n1,1\n", encoding="utf-8")
        with pytest.raises(BundleError):
            load_map(bundle)

    def test_duplicate_item_id_in_document(self) -> None:
        world = make_world(
            item_types=[make_item_type()],
            items=[make_item(item_id="i1", type_id="box")],
        )
        doc = document_from_world(world)
        doc["items"].append(dict(doc["items"][0]))
        with pytest.raises(BundleError):
            world_from_document(doc)

    def test_unknown_format_rejected(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        bundle = save_map(world, tmp_path / "m")
        meta = json.loads((bundle / mapio.META_FILE).read_text(encoding="utf-8"))
        meta["format"] = "something-else"
        (bundle / mapio.META_FILE).write_text(json.dumps(meta), encoding="utf-8")
        with pytest.raises(BundleError):
            load_map(bundle)

    def test_load_validates_by_default(self, tmp_path) -> None:
        world = make_world(agents=[make_agent()])
        bundle = save_map(world, tmp_path / "m")
        meta = json.loads((bundle / mapio.META_FILE).read_text(encoding="utf-8"))
        meta["agents"][0]["movement_speed"] = -1.0
        (bundle / mapio.META_FILE).write_text(json.dumps(meta), encoding="utf-8")
        with pytest.raises(mapio.MapValidationError):
            load_map(bundle)
        loaded = load_map(bundle, validate=False)
        assert loaded.agents["ada"].movement_speed == -1.0
