"""Map bundle persistence and validation.

A bundle is a directory holding ``meta.json`` (catalog, areas, items, agents)
plus two grid layers, ``walkable.csv`` (0/1) and ``area_ids.csv`` (area code
per tile, 0 = none). The same data round-trips through a single JSON document
(used by the HTTP API). docs/format.md describes both forms bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import BundleError, MapValidationError
from .world import (
    MAX_AGENTS,
    MAX_ITEM_TYPES,
    AREA_KINDS,
    Area,
    AgentProfile,
    GridPos,
    InBag,
    InContainer,
    ItemInstance,
    ItemType,
    OnTile,
    Placement,
    WorldMap,
)

FORMAT_NAME = "townlet-map"
FORMAT_VERSION = 1

META_FILE = "meta.json"
WALKABLE_FILE = "walkable.csv"
AREA_IDS_FILE = "area_ids.csv"

# Violation codes; every world-model invariant maps to exactly one.
AGENT_LIMIT = "AGENT_LIMIT"
ITEM_TYPE_LIMIT = "ITEM_TYPE_LIMIT"
DUPLICATE_ID = "DUPLICATE_ID"
DUPLICATE_NAME = "DUPLICATE_NAME"
DUPLICATE_AREA_CODE = "DUPLICATE_AREA_CODE"
UNKNOWN_AREA = "UNKNOWN_AREA"
UNKNOWN_AREA_CODE = "UNKNOWN_AREA_CODE"
UNKNOWN_TYPE = "UNKNOWN_TYPE"
UNKNOWN_ITEM = "UNKNOWN_ITEM"
UNKNOWN_AGENT = "UNKNOWN_AGENT"
UNWALKABLE_START = "UNWALKABLE_START"
OUT_OF_BOUNDS = "OUT_OF_BOUNDS"
CONTAINER_CYCLE = "CONTAINER_CYCLE"
NOT_A_CONTAINER = "NOT_A_CONTAINER"
CAPACITY_EXCEEDED = "CAPACITY_EXCEEDED"
NOT_PORTABLE_IN_BAG = "NOT_PORTABLE_IN_BAG"
AREA_PARENT_CYCLE = "AREA_PARENT_CYCLE"
BAD_AREA_KIND = "BAD_AREA_KIND"
EMPTY_AREA = "EMPTY_AREA"
SUBAREA_NOT_CONTAINED = "SUBAREA_NOT_CONTAINED"
AREA_OVERLAP = "AREA_OVERLAP"
BAD_SPEED = "BAD_SPEED"
BAD_CAPACITY = "BAD_CAPACITY"


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def to_json(self) -> dict[str, str]:
        return {"code": self.code, "subject": self.subject, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, subject: str, message: str) -> None:
        self.violations.append(Violation(code, subject, message))

    def to_json(self) -> dict[str, Any]:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{v.code}({v.subject}): {v.message}" for v in self.violations)


# --- JSON document <-> WorldMap ---------------------------------------------


def _pos_json(pos: GridPos) -> dict[str, int]:
    return {"x": pos.x, "y": pos.y}


def _placement_json(placement: Placement) -> dict[str, Any]:
    match placement:
        case OnTile(pos):
            return {"kind": "tile", "x": pos.x, "y": pos.y}
        case InContainer(item_id):
            return {"kind": "container", "item_id": item_id}
        case InBag(agent_id):
            return {"kind": "bag", "agent_id": agent_id}
    raise ValueError(f"unknown placement: {placement!r}")


def _placement_from_json(doc: dict[str, Any]) -> Placement:
    kind = doc.get("kind")
    if kind == "tile":
        return OnTile(GridPos(int(doc["x"]), int(doc["y"])))
    if kind == "container":
        return InContainer(str(doc["item_id"]))
    if kind == "bag":
        return InBag(str(doc["agent_id"]))
    raise BundleError(f"unknown placement kind: {kind!r}")


def _area_codes(world: WorldMap) -> dict[str, int]:
    """Stable area-id -> positive code assignment (sorted ids, 1-based)."""
    return {area_id: i + 1 for i, area_id in enumerate(sorted(world.areas))}


def _area_grid(world: WorldMap) -> list[list[int]]:
    """Per tile, the code of the deepest area containing it (0 = none).

    Lossless because sub-area tiles must be subsets of their parents and
    unrelated areas may not overlap (validated).
    """
    from .world import area_depth

    codes = _area_codes(world)
    grid = [[0] * world.width for _ in range(world.height)]
    order = sorted(world.areas.values(), key=lambda a: (area_depth(world, a.id), a.id))
    for area in order:  # deepest painted last wins
        code = codes[area.id]
        for pos in area.tiles:
            if 0 <= pos.y < world.height and 0 <= pos.x < world.width:
                grid[pos.y][pos.x] = code
    return grid


def document_from_world(world: WorldMap) -> dict[str, Any]:
    """The whole bundle as one JSON-ready document (the HTTP API form)."""
    codes = _area_codes(world)
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "id": world.id,
        "name": world.name,
        "width": world.width,
        "height": world.height,
        "areas": [
            {
                "id": a.id,
                "name": a.name,
                "kind": a.kind,
                "parent": a.parent,
                "code": codes[a.id],
            }
            for a in sorted(world.areas.values(), key=lambda a: a.id)
        ],
        "item_types": [
            {
                "id": t.id,
                "name": t.name,
                "properties": dict(sorted(t.properties.items())),
                "portable": t.portable,
                "container_capacity": t.container_capacity,
            }
            for t in sorted(world.item_types.values(), key=lambda t: t.id)
        ],
        "items": [
            {"id": it.id, "type_id": it.type_id, "placement": _placement_json(it.placement)}
            for it in sorted(world.items.values(), key=lambda it: it.id)
        ],
        "agents": [
            {
                "id": ag.id,
                "name": ag.name,
                "personality": ag.personality,
                "core_traits": list(ag.core_traits),
                "lifestyle": ag.lifestyle,
                "home_area": ag.home_area,
                "start_pos": _pos_json(ag.start_pos),
                "movement_speed": ag.movement_speed,
            }
            for ag in sorted(world.agents.values(), key=lambda ag: ag.id)
        ],
        "walkable": [[1 if cell else 0 for cell in row] for row in world.walkable],
        "area_codes": _area_grid(world),
    }


def world_from_document(doc: dict[str, Any]) -> WorldMap:
    """Build a WorldMap from the single-document form.

    Structural problems (bad shapes, unparseable fields, id collisions that
    would silently collapse) raise BundleError; semantic problems are left to
    validate_map.
    """
    try:
        width = int(doc["width"])
        height = int(doc["height"])
        walk_rows = doc["walkable"]
        code_rows = doc["area_codes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"malformed map document: {exc}") from exc
    if width <= 0 or height <= 0:
        raise BundleError(f"bad grid size {width}x{height}")
    if len(walk_rows) != height or any(len(r) != width for r in walk_rows):
        raise BundleError("walkable grid does not match declared width/height")
    if len(code_rows) != height or any(len(r) != width for r in code_rows):
        raise BundleError("area_codes grid does not match declared width/height")

    walkable = tuple(tuple(bool(int(cell)) for cell in row) for row in walk_rows)

    def _collect(entries: list[dict[str, Any]], label: str) -> None:
        seen: set[str] = set()
        for entry in entries:
            if entry["id"] in seen:
                raise BundleError(f"duplicate {label} id: {entry['id']}")
            seen.add(entry["id"])

    for key in ("areas", "item_types", "items", "agents"):
        if not isinstance(doc.get(key), list):
            raise BundleError(f"missing or malformed section: {key}")
        _collect(doc[key], key)

    code_to_area: dict[int, str] = {}
    for a in doc["areas"]:
        code = int(a["code"])
        if code <= 0:
            raise BundleError(f"area code must be positive: {a['id']}")
        if code in code_to_area:
            raise BundleError(f"duplicate area code {code}")
        code_to_area[code] = a["id"]

    own_tiles: dict[str, set[GridPos]] = {a["id"]: set() for a in doc["areas"]}
    for y, row in enumerate(code_rows):
        for x, raw in enumerate(row):
            code = int(raw)
            if code == 0:
                continue
            if code not in code_to_area:
                raise BundleError(f"area_ids cell ({x},{y}) references undeclared code {code}")
            own_tiles[code_to_area[code]].add(GridPos(x, y))

    # Full tile set = own cells plus all descendants' cells. Parent cycles are
    # tolerated here (reported by validate_map); members keep own cells only.
    parents = {a["id"]: a.get("parent") for a in doc["areas"]}
    full_tiles: dict[str, set[GridPos]] = {aid: set(tiles) for aid, tiles in own_tiles.items()}
    for aid in own_tiles:
        chain: list[str] = []
        current: str | None = aid
        seen: set[str] = set()
        while current is not None and current in parents and current not in seen:
            seen.add(current)
            chain.append(current)
            current = parents.get(current)
        for ancestor in chain[1:]:
            full_tiles[ancestor].update(own_tiles[aid])

    areas = {
        a["id"]: Area(
            id=a["id"],
            name=a["name"],
            kind=a["kind"],
            tiles=frozenset(full_tiles[a["id"]]),
            parent=a.get("parent"),
        )
        for a in doc["areas"]
    }
    item_types = {
        t["id"]: ItemType(
            id=t["id"],
            name=t["name"],
            properties={str(k): str(v) for k, v in dict(t.get("properties", {})).items()},
            portable=bool(t.get("portable", True)),
            container_capacity=int(t.get("container_capacity", 0)),
        )
        for t in doc["item_types"]
    }
    items = {
        it["id"]: ItemInstance(
            id=it["id"],
            type_id=it["type_id"],
            placement=_placement_from_json(it["placement"]),
        )
        for it in doc["items"]
    }
    agents = {
        ag["id"]: AgentProfile(
            id=ag["id"],
            name=ag["name"],
            personality=ag["personality"],
            core_traits=tuple(ag.get("core_traits", ())),
            lifestyle=ag.get("lifestyle", ""),
            home_area=ag["home_area"],
            start_pos=GridPos(int(ag["start_pos"]["x"]), int(ag["start_pos"]["y"])),
            movement_speed=float(ag.get("movement_speed", 4.0)),
        )
        for ag in doc["agents"]
    }
    return WorldMap(
        id=str(doc.get("id", "map")),
        name=str(doc.get("name", doc.get("id", "map"))),
        width=width,
        height=height,
        walkable=walkable,
        areas=areas,
        item_types=item_types,
        items=items,
        agents=agents,
    )


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def map_content_hash(world: WorldMap) -> str:
    return hashlib.sha256(canonical_json(document_from_world(world)).encode("utf-8")).hexdigest()


# --- validation ---------------------------------------------------------------


def validate_map(world: WorldMap) -> ValidationReport:
    """Semantic validation; returns every violation rather than failing fast."""
    report = ValidationReport()

    if len(world.agents) > MAX_AGENTS:
        report.add(AGENT_LIMIT, "agents", f"{len(world.agents)} agents > limit {MAX_AGENTS}")
    if len(world.item_types) > MAX_ITEM_TYPES:
        report.add(
            ITEM_TYPE_LIMIT, "item_types", f"{len(world.item_types)} types > limit {MAX_ITEM_TYPES}"
        )

    # Areas: kinds, parents, acyclic nesting, non-empty, nesting containment.
    cyclic: set[str] = set()
    for area in sorted(world.areas.values(), key=lambda a: a.id):
        if area.kind not in AREA_KINDS:
            report.add(BAD_AREA_KIND, area.id, f"kind {area.kind!r} not in {AREA_KINDS}")
        if area.parent is not None and area.parent not in world.areas:
            report.add(UNKNOWN_AREA, area.id, f"parent {area.parent!r} not declared")
        if not area.tiles:
            report.add(EMPTY_AREA, area.id, "area has no tiles")
        seen: set[str] = set()
        current: str | None = area.id
        while current is not None:
            if current in seen:
                if area.id not in cyclic:
                    cyclic.add(area.id)
                    report.add(AREA_PARENT_CYCLE, area.id, "parent chain loops")
                break
            seen.add(current)
            current = world.areas[current].parent if current in world.areas else None

    names = {}
    for area in sorted(world.areas.values(), key=lambda a: a.id):
        if area.name in names:
            report.add(DUPLICATE_NAME, area.id, f"area name {area.name!r} reused by {names[area.name]}")
        names[area.name] = area.id

    ancestors: dict[str, set[str]] = {}
    for area_id in world.areas:
        chain: set[str] = set()
        current = world.areas[area_id].parent
        while current is not None and current in world.areas and current not in chain:
            chain.add(current)
            current = world.areas[current].parent
        ancestors[area_id] = chain
    for area in sorted(world.areas.values(), key=lambda a: a.id):
        if area.parent in world.areas and area.id not in cyclic:
            if not area.tiles <= world.areas[area.parent].tiles:
                report.add(
                    SUBAREA_NOT_CONTAINED,
                    area.id,
                    f"tiles extend outside parent {area.parent}",
                )
    area_list = sorted(world.areas.values(), key=lambda a: a.id)
    for i, a in enumerate(area_list):
        for b in area_list[i + 1 :]:
            if a.id in ancestors[b.id] or b.id in ancestors[a.id]:
                continue
            if a.tiles & b.tiles:
                report.add(AREA_OVERLAP, a.id, f"overlaps unrelated area {b.id}")

    # Item types.
    type_names: dict[str, str] = {}
    for t in sorted(world.item_types.values(), key=lambda t: t.id):
        if t.container_capacity < 0:
            report.add(BAD_CAPACITY, t.id, f"container_capacity {t.container_capacity} < 0")
        if t.name in type_names:
            report.add(DUPLICATE_NAME, t.id, f"type name {t.name!r} reused by {type_names[t.name]}")
        type_names[t.name] = t.id

    # Items: placements, containment forest.
    for it in sorted(world.items.values(), key=lambda it: it.id):
        if it.type_id not in world.item_types:
            report.add(UNKNOWN_TYPE, it.id, f"type {it.type_id!r} not in catalog")
        match it.placement:
            case OnTile(pos):
                if not world.in_bounds(pos):
                    report.add(OUT_OF_BOUNDS, it.id, f"tile {tuple(pos)} out of bounds")
            case InBag(agent_id):
                if agent_id not in world.agents:
                    report.add(UNKNOWN_AGENT, it.id, f"bag owner {agent_id!r} unknown")
                t = world.item_types.get(it.type_id)
                if t is not None and not t.portable:
                    report.add(NOT_PORTABLE_IN_BAG, it.id, "non-portable item in a bag")
            case InContainer(container_id):
                if container_id not in world.items:
                    report.add(UNKNOWN_ITEM, it.id, f"container {container_id!r} unknown")
                else:
                    holder = world.items[container_id]
                    t = world.item_types.get(holder.type_id)
                    if t is not None and t.container_capacity <= 0:
                        report.add(NOT_A_CONTAINER, it.id, f"{container_id} has no capacity")

    loads: dict[str, int] = {}
    for it in world.items.values():
        if isinstance(it.placement, InContainer):
            loads[it.placement.item_id] = loads.get(it.placement.item_id, 0) + 1
    for container_id in sorted(loads):
        holder = world.items.get(container_id)
        if holder is None:
            continue
        t = world.item_types.get(holder.type_id)
        if t is not None and 0 < t.container_capacity < loads[container_id]:
            report.add(
                CAPACITY_EXCEEDED,
                container_id,
                f"{loads[container_id]} items > capacity {t.container_capacity}",
            )

    for it in sorted(world.items.values(), key=lambda it: it.id):
        seen_chain: set[str] = set()
        current: str | None = it.id
        while current is not None:
            if current in seen_chain:
                report.add(CONTAINER_CYCLE, it.id, "containment chain loops")
                break
            seen_chain.add(current)
            holder = world.items.get(current)
            if holder is None:
                break
            current = (
                holder.placement.item_id if isinstance(holder.placement, InContainer) else None
            )

    # Agents.
    for ag in sorted(world.agents.values(), key=lambda ag: ag.id):
        if not world.in_bounds(ag.start_pos):
            report.add(OUT_OF_BOUNDS, ag.id, f"start {tuple(ag.start_pos)} out of bounds")
        elif not world.is_walkable(ag.start_pos):
            report.add(UNWALKABLE_START, ag.id, f"start {tuple(ag.start_pos)} not walkable")
        if ag.home_area not in world.areas:
            report.add(UNKNOWN_AREA, ag.id, f"home area {ag.home_area!r} unknown")
        if ag.movement_speed <= 0:
            report.add(BAD_SPEED, ag.id, f"movement_speed {ag.movement_speed} <= 0")

    return report


# --- bundle directory I/O ----------------------------------------------------


def _grid_csv(rows: list[list[int]]) -> str:
    return "".join(",".join(str(v) for v in row) + "\n" for row in rows)


def save_map(world: WorldMap, bundle_dir: str | Path) -> Path:
    """Write the bundle; refuses to persist an invalid map. Byte-deterministic."""
    report = validate_map(world)
    if not report.ok:
        raise MapValidationError(report)
    doc = document_from_world(world)
    walkable = doc.pop("walkable")
    area_codes = doc.pop("area_codes")
    path = Path(bundle_dir)
    path.mkdir(parents=True, exist_ok=True)
    meta_text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    (path / META_FILE).write_text(meta_text, encoding="utf-8")
    (path / WALKABLE_FILE).write_text(_grid_csv(walkable), encoding="utf-8")
    (path / AREA_IDS_FILE).write_text(_grid_csv(area_codes), encoding="utf-8")
    return path


def _read_grid(path: Path, *, width: int, height: int, name: str) -> list[list[int]]:
    if not path.exists():
        raise BundleError(f"missing {name}")
    rows: list[list[int]] = []
    text = path.read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            row = [int(cell) for cell in line.split(",")]
        except ValueError as exc:
            raise BundleError(f"{name} line {line_no + 1}: {exc}") from exc
        rows.append(row)
    if len(rows) != height or any(len(r) != width for r in rows):
        raise BundleError(
            f"{name} is {len(rows)} rows of {[len(r) for r in rows[:1]]} cols; expected {height}x{width}"
        )
    return rows


def load_map(bundle_dir: str | Path, *, validate: bool = True) -> WorldMap:
    """Read a bundle directory; raises BundleError (structure) or
    MapValidationError (semantics)."""
    path = Path(bundle_dir)
    meta_path = path / META_FILE
    if not meta_path.exists():
        raise BundleError(f"missing {META_FILE} in {path}")
    try:
        doc = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"{META_FILE} is not valid JSON: {exc}") from exc
    if doc.get("format") != FORMAT_NAME:
        raise BundleError(f"unsupported format: {doc.get('format')!r}")
    if doc.get("version") != FORMAT_VERSION:
        raise BundleError(f"unsupported version: {doc.get('version')!r}")
    try:
        width, height = int(doc["width"]), int(doc["height"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"malformed {META_FILE}: {exc}") from exc
    doc["walkable"] = _read_grid(path / WALKABLE_FILE, width=width, height=height, name=WALKABLE_FILE)
    doc["area_codes"] = _read_grid(path / AREA_IDS_FILE, width=width, height=height, name=AREA_IDS_FILE)
    world = world_from_document(doc)
    if validate:
        report = validate_map(world)
        if not report.ok:
            raise MapValidationError(report)
    return world
