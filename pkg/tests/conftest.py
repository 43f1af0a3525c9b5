from __future__ import annotations

import pytest

from townlet.prompts import load_templates
from townlet.world import (
    AgentProfile,
    Area,
    GridPos,
    InContainer,
    ItemInstance,
    ItemType,
    OnTile,
    WorldMap,
)


def _by_id(entries):
    if entries is None:
        return {}
    if isinstance(entries, dict):
        return entries
    return {entry.id: entry for entry in entries}


def make_world(
    *,
    map_id: str = "testmap",
    width: int = 10,
    height: int = 8,
    blocked: set[tuple[int, int]] | None = None,
    areas=None,
    item_types=None,
    items=None,
    agents=None,
) -> WorldMap:
    blocked = blocked or set()
    walkable = tuple(
        tuple((x, y) not in blocked for x in range(width)) for y in range(height)
    )
    if areas is None:
        areas = {
            "plot": Area(
                "plot",
                "Plot",
                "sector",
                frozenset(GridPos(x, y) for x in range(width) for y in range(height)),
            )
        }
    return WorldMap(
        id=map_id,
        name="Test Map",
        width=width,
        height=height,
        walkable=walkable,
        areas=_by_id(areas),
        item_types=_by_id(item_types),
        items=_by_id(items),
        agents=_by_id(agents),
    )


def make_agent(
    *,
    agent_id: str = "ada",
    name: str = "Ada Test",
    home_area: str = "plot",
    start: tuple[int, int] = (1, 1),
    speed: float = 4.0,
) -> AgentProfile:
    return AgentProfile(
        id=agent_id,
        name=name,
        personality="a careful test subject",
        core_traits=("curious", "steady"),
        lifestyle="spends the day being simulated",
        home_area=home_area,
        start_pos=GridPos(*start),
        movement_speed=speed,
    )


def make_item_type(
    *,
    type_id: str = "box",
    name: str | None = None,
    portable: bool = True,
    capacity: int = 0,
) -> ItemType:
    return ItemType(
        id=type_id,
        name=name or type_id,
        properties={},
        portable=portable,
        container_capacity=capacity,
    )


def make_item(
    *,
    item_id: str = "box1",
    type_id: str = "box",
    on_tile: tuple[int, int] | None = (2, 2),
    in_container: str | None = None,
) -> ItemInstance:
    if in_container is not None:
        placement = InContainer(in_container)
    else:
        assert on_tile is not None
        placement = OnTile(GridPos(*on_tile))
    return ItemInstance(id=item_id, type_id=type_id, placement=placement)


@pytest.fixture(scope="session")
def templates():
    return load_templates()
