"""Static world model: tile grid, areas, item catalog, item placements, agent roster.

Everything here is value-semantic: maps are immutable dataclasses and the item
operations are pure transformations returning a new map. Dynamic state (agent
positions, bags mid-run) lives in the engine, which applies these same ops.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple

from .errors import (
    CapacityError,
    ContainerCycleError,
    DuplicateIdError,
    NotPortableError,
    OutOfBoundsError,
    UnknownIdError,
    WorldError,
)

MAX_AGENTS = 15
MAX_ITEM_TYPES = 100
DEFAULT_MOVEMENT_SPEED = 4.0

AREA_KINDS = ("building", "room", "sector")


class GridPos(NamedTuple):
    """Tile coordinate; (0, 0) is top-left, y grows downward."""

    x: int
    y: int


@dataclass(frozen=True)
class OnTile:
    pos: GridPos


@dataclass(frozen=True)
class InContainer:
    item_id: str


@dataclass(frozen=True)
class InBag:
    agent_id: str


Placement = OnTile | InContainer | InBag


@dataclass(frozen=True)
class Area:
    id: str
    name: str
    kind: str  # one of AREA_KINDS
    tiles: frozenset[GridPos]
    parent: str | None = None


@dataclass(frozen=True)
class ItemType:
    id: str
    name: str
    properties: dict[str, str] = field(default_factory=dict)
    portable: bool = True
    container_capacity: int = 0


@dataclass(frozen=True)
class ItemInstance:
    id: str
    type_id: str
    placement: Placement


@dataclass(frozen=True)
class AgentProfile:
    id: str
    name: str
    personality: str
    core_traits: tuple[str, ...]
    lifestyle: str
    home_area: str
    start_pos: GridPos
    movement_speed: float = DEFAULT_MOVEMENT_SPEED


@dataclass(frozen=True)
class WorldMap:
    id: str
    name: str
    width: int
    height: int
    walkable: tuple[tuple[bool, ...], ...]  # indexed [y][x]
    areas: dict[str, Area] = field(default_factory=dict)
    item_types: dict[str, ItemType] = field(default_factory=dict)
    items: dict[str, ItemInstance] = field(default_factory=dict)
    agents: dict[str, AgentProfile] = field(default_factory=dict)

    def in_bounds(self, pos: GridPos) -> bool:
        return 0 <= pos.x < self.width and 0 <= pos.y < self.height

    def is_walkable(self, pos: GridPos) -> bool:
        return self.in_bounds(pos) and self.walkable[pos.y][pos.x]


def place_item(world: WorldMap, item: ItemInstance) -> WorldMap:
    """Add a fresh item instance; rejects duplicate ids and invalid placements."""
    if item.id in world.items:
        raise DuplicateIdError(f"item id already present: {item.id}")
    if item.type_id not in world.item_types:
        raise UnknownIdError(f"unknown item type: {item.type_id}")
    _check_placement(world, item.id, item.placement)
    items = dict(world.items)
    items[item.id] = item
    return replace(world, items=items)


def move_item(world: WorldMap, item_id: str, placement: Placement) -> WorldMap:
    if item_id not in world.items:
        raise UnknownIdError(f"unknown item: {item_id}")
    _check_placement(world, item_id, placement)
    items = dict(world.items)
    items[item_id] = replace(items[item_id], placement=placement)
    return replace(world, items=items)


def remove_item(world: WorldMap, item_id: str) -> WorldMap:
    """Delete an item; a deleted container spills its direct contents onto its
    resolved placement (tile, or the owning bag when it was carried)."""
    if item_id not in world.items:
        raise UnknownIdError(f"unknown item: {item_id}")
    resolved = resolve_tile(world, item_id)
    spill: Placement = InBag(resolved.agent_id) if isinstance(resolved, InBag) else OnTile(resolved)
    items = dict(world.items)
    del items[item_id]
    for other_id, other in items.items():
        if isinstance(other.placement, InContainer) and other.placement.item_id == item_id:
            items[other_id] = replace(other, placement=spill)
    return replace(world, items=items)


def resolve_tile(world: WorldMap, item_id: str) -> GridPos | InBag:
    """Follow the containment chain to the terminal tile or carrying agent."""
    if item_id not in world.items:
        raise UnknownIdError(f"unknown item: {item_id}")
    seen: set[str] = set()
    current = item_id
    while True:
        if current in seen:
            raise ContainerCycleError(f"containment cycle through {current}")
        seen.add(current)
        placement = world.items[current].placement
        match placement:
            case OnTile(pos):
                return pos
            case InBag(_):
                return placement
            case InContainer(parent_id):
                if parent_id not in world.items:
                    raise UnknownIdError(f"container missing: {parent_id}")
                current = parent_id


def contents_of(world: WorldMap, container_id: str, *, transitive: bool = False) -> list[ItemInstance]:
    """Items inside a container (direct, or transitive), ordered by item id."""
    if container_id not in world.items:
        raise UnknownIdError(f"unknown item: {container_id}")
    direct: dict[str, list[ItemInstance]] = {}
    for item in world.items.values():
        if isinstance(item.placement, InContainer):
            direct.setdefault(item.placement.item_id, []).append(item)
    out: list[ItemInstance] = []
    frontier = [container_id]
    while frontier:
        inner = sorted(direct.get(frontier.pop(0), []), key=lambda it: it.id)
        out.extend(inner)
        if transitive:
            frontier.extend(it.id for it in inner)
    return sorted(out, key=lambda it: it.id)


def bag_items(world: WorldMap, agent_id: str) -> list[ItemInstance]:
    """Items carried directly by an agent, ordered by item id."""
    return sorted(
        (it for it in world.items.values() if it.placement == InBag(agent_id)),
        key=lambda it: it.id,
    )


def items_on_tile(world: WorldMap, pos: GridPos) -> list[ItemInstance]:
    return sorted(
        (it for it in world.items.values() if it.placement == OnTile(pos)),
        key=lambda it: it.id,
    )


def area_of_tile(world: WorldMap, pos: GridPos) -> Area | None:
    """Most specific (deepest-nested) area containing the tile, if any."""
    best: Area | None = None
    best_depth = -1
    for area in sorted(world.areas.values(), key=lambda a: a.id):
        if pos in area.tiles:
            depth = area_depth(world, area.id)
            if depth > best_depth:
                best, best_depth = area, depth
    return best


def area_depth(world: WorldMap, area_id: str) -> int:
    depth = 0
    current = world.areas[area_id].parent
    hops = 0
    while current is not None:
        hops += 1
        if hops > len(world.areas):
            raise WorldError(f"area parent cycle through {area_id}")
        depth += 1
        current = world.areas[current].parent
    return depth


def iter_area_walkable_tiles(world: WorldMap, area_id: str) -> Iterator[GridPos]:
    """Walkable tiles of an area in deterministic (y, x) order."""
    if area_id not in world.areas:
        raise UnknownIdError(f"unknown area: {area_id}")
    for pos in sorted(world.areas[area_id].tiles, key=lambda p: (p.y, p.x)):
        if world.is_walkable(pos):
            yield pos


def _check_placement(world: WorldMap, item_id: str, placement: Placement) -> None:
    match placement:
        case OnTile(pos):
            if not world.in_bounds(pos):
                raise OutOfBoundsError(f"tile out of bounds: {pos}")
        case InBag(agent_id):
            if agent_id not in world.agents:
                raise UnknownIdError(f"unknown agent: {agent_id}")
            item_type = world.item_types[world.items[item_id].type_id] if item_id in world.items else None
            if item_type is not None and not item_type.portable:
                raise NotPortableError(f"item not portable: {item_id}")
        case InContainer(container_id):
            if container_id == item_id:
                raise ContainerCycleError(f"item cannot contain itself: {item_id}")
            if container_id not in world.items:
                raise UnknownIdError(f"unknown container: {container_id}")
            container = world.items[container_id]
            capacity = world.item_types[container.type_id].container_capacity
            if capacity <= 0:
                raise CapacityError(f"not a container: {container_id}")
            load = sum(
                1
                for it in world.items.values()
                if isinstance(it.placement, InContainer)
                and it.placement.item_id == container_id
                and it.id != item_id
            )
            if load >= capacity:
                raise CapacityError(f"container full: {container_id} ({load}/{capacity})")
            # Walking the chain upward from the target container must never
            # re-enter the item being placed, or the forest gains a cycle.
            current: str | None = container_id
            hops = 0
            while current is not None:
                hops += 1
                if hops > len(world.items) + 1:
                    raise ContainerCycleError(f"containment cycle through {container_id}")
                if current == item_id:
                    raise ContainerCycleError(f"placing {item_id} inside its own contents")
                parent = world.items[current].placement
                current = parent.item_id if isinstance(parent, InContainer) else None
