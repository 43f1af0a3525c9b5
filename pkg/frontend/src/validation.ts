/** Client-side map validation mirroring the backend's semantic rules.
 *
 * Same codes, same conditions, run against the editor model so authors see
 * violations inline before a save attempt; the server remains authoritative
 * and re-checks everything on PUT. Two checks (sub-area containment, overlap
 * of unrelated areas) guard states the wire encoding cannot even represent —
 * saving such an edit would silently drop tiles, so they are flagged here.
 */

import type { EditorMap } from "./mapmodel";
import type { Placement, ValidationReport, Violation } from "./types";
import { AREA_KINDS, MAX_AGENTS, MAX_ITEM_TYPES } from "./types";

export const AGENT_LIMIT = "AGENT_LIMIT";
export const ITEM_TYPE_LIMIT = "ITEM_TYPE_LIMIT";
export const DUPLICATE_NAME = "DUPLICATE_NAME";
export const UNKNOWN_AREA = "UNKNOWN_AREA";
export const UNKNOWN_TYPE = "UNKNOWN_TYPE";
export const UNKNOWN_ITEM = "UNKNOWN_ITEM";
export const UNKNOWN_AGENT = "UNKNOWN_AGENT";
export const UNWALKABLE_START = "UNWALKABLE_START";
export const OUT_OF_BOUNDS = "OUT_OF_BOUNDS";
export const CONTAINER_CYCLE = "CONTAINER_CYCLE";
export const NOT_A_CONTAINER = "NOT_A_CONTAINER";
export const CAPACITY_EXCEEDED = "CAPACITY_EXCEEDED";
export const NOT_PORTABLE_IN_BAG = "NOT_PORTABLE_IN_BAG";
export const AREA_PARENT_CYCLE = "AREA_PARENT_CYCLE";
export const BAD_AREA_KIND = "BAD_AREA_KIND";
export const EMPTY_AREA = "EMPTY_AREA";
export const SUBAREA_NOT_CONTAINED = "SUBAREA_NOT_CONTAINED";
export const AREA_OVERLAP = "AREA_OVERLAP";
export const BAD_SPEED = "BAD_SPEED";
export const BAD_CAPACITY = "BAD_CAPACITY";

function sortedById<T extends { id: string }>(entries: Iterable<T>): T[] {
  return [...entries].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
}

function inBounds(map: EditorMap, x: number, y: number): boolean {
  return x >= 0 && x < map.width && y >= 0 && y < map.height;
}

function isWalkable(map: EditorMap, x: number, y: number): boolean {
  return inBounds(map, x, y) && Boolean(map.walkable[y]?.[x]);
}

function intersects(a: Set<string>, b: Set<string>): boolean {
  const [small, large] = a.size <= b.size ? [a, b] : [b, a];
  for (const key of small) if (large.has(key)) return true;
  return false;
}

function isSubset(sub: Set<string>, sup: Set<string>): boolean {
  for (const key of sub) if (!sup.has(key)) return false;
  return true;
}

export function validateEditorMap(map: EditorMap): ValidationReport {
  const violations: Violation[] = [];
  const add = (code: string, subject: string, message: string) =>
    violations.push({ code, subject, message });

  if (map.agents.size > MAX_AGENTS) {
    add(AGENT_LIMIT, "agents", `${map.agents.size} agents > limit ${MAX_AGENTS}`);
  }
  if (map.itemTypes.size > MAX_ITEM_TYPES) {
    add(ITEM_TYPE_LIMIT, "item_types", `${map.itemTypes.size} types > limit ${MAX_ITEM_TYPES}`);
  }

  // Areas: kinds, parents, acyclic nesting, non-empty, nesting containment.
  const areas = sortedById(map.areas.values());
  const cyclic = new Set<string>();
  for (const area of areas) {
    if (!(AREA_KINDS as readonly string[]).includes(area.kind)) {
      add(BAD_AREA_KIND, area.id, `kind "${area.kind}" not one of ${AREA_KINDS.join("/")}`);
    }
    if (area.parent !== null && !map.areas.has(area.parent)) {
      add(UNKNOWN_AREA, area.id, `parent "${area.parent}" not declared`);
    }
    if (area.tiles.size === 0) {
      add(EMPTY_AREA, area.id, "area has no tiles");
    }
    const seen = new Set<string>();
    let current: string | null = area.id;
    while (current !== null) {
      if (seen.has(current)) {
        if (!cyclic.has(area.id)) {
          cyclic.add(area.id);
          add(AREA_PARENT_CYCLE, area.id, "parent chain loops");
        }
        break;
      }
      seen.add(current);
      current = map.areas.get(current)?.parent ?? null;
    }
  }

  const areaNames = new Map<string, string>();
  for (const area of areas) {
    const owner = areaNames.get(area.name);
    if (owner !== undefined) {
      add(DUPLICATE_NAME, area.id, `area name "${area.name}" reused by ${owner}`);
    }
    areaNames.set(area.name, area.id);
  }

  const ancestors = new Map<string, Set<string>>();
  for (const area of areas) {
    const chain = new Set<string>();
    let current = area.parent;
    while (current !== null && map.areas.has(current) && !chain.has(current)) {
      chain.add(current);
      current = map.areas.get(current)?.parent ?? null;
    }
    ancestors.set(area.id, chain);
  }
  for (const area of areas) {
    if (area.parent !== null && map.areas.has(area.parent) && !cyclic.has(area.id)) {
      if (!isSubset(area.tiles, map.areas.get(area.parent)!.tiles)) {
        add(SUBAREA_NOT_CONTAINED, area.id, `tiles extend outside parent ${area.parent}`);
      }
    }
  }
  for (let i = 0; i < areas.length; i += 1) {
    for (let j = i + 1; j < areas.length; j += 1) {
      const a = areas[i]!;
      const b = areas[j]!;
      if (ancestors.get(b.id)!.has(a.id) || ancestors.get(a.id)!.has(b.id)) continue;
      if (intersects(a.tiles, b.tiles)) {
        add(AREA_OVERLAP, a.id, `overlaps unrelated area ${b.id}`);
      }
    }
  }

  // Item types.
  const typeNames = new Map<string, string>();
  for (const t of sortedById(map.itemTypes.values())) {
    if (t.container_capacity < 0) {
      add(BAD_CAPACITY, t.id, `container_capacity ${t.container_capacity} < 0`);
    }
    const owner = typeNames.get(t.name);
    if (owner !== undefined) {
      add(DUPLICATE_NAME, t.id, `type name "${t.name}" reused by ${owner}`);
    }
    typeNames.set(t.name, t.id);
  }

  // Items: placements, containment forest.
  const items = sortedById(map.items.values());
  for (const it of items) {
    if (!map.itemTypes.has(it.type_id)) {
      add(UNKNOWN_TYPE, it.id, `type "${it.type_id}" not in catalog`);
    }
    const p: Placement = it.placement;
    if (p.kind === "tile") {
      if (!inBounds(map, p.x, p.y)) {
        add(OUT_OF_BOUNDS, it.id, `tile (${p.x}, ${p.y}) out of bounds`);
      }
    } else if (p.kind === "bag") {
      if (!map.agents.has(p.agent_id)) {
        add(UNKNOWN_AGENT, it.id, `bag owner "${p.agent_id}" unknown`);
      }
      const t = map.itemTypes.get(it.type_id);
      if (t !== undefined && !t.portable) {
        add(NOT_PORTABLE_IN_BAG, it.id, "non-portable item in a bag");
      }
    } else {
      const holder = map.items.get(p.item_id);
      if (holder === undefined) {
        add(UNKNOWN_ITEM, it.id, `container "${p.item_id}" unknown`);
      } else {
        const t = map.itemTypes.get(holder.type_id);
        if (t !== undefined && t.container_capacity <= 0) {
          add(NOT_A_CONTAINER, it.id, `${p.item_id} has no capacity`);
        }
      }
    }
  }

  const loads = new Map<string, number>();
  for (const it of map.items.values()) {
    if (it.placement.kind === "container") {
      const id = it.placement.item_id;
      loads.set(id, (loads.get(id) ?? 0) + 1);
    }
  }
  for (const containerId of [...loads.keys()].sort()) {
    const holder = map.items.get(containerId);
    if (holder === undefined) continue;
    const t = map.itemTypes.get(holder.type_id);
    const load = loads.get(containerId)!;
    if (t !== undefined && t.container_capacity > 0 && load > t.container_capacity) {
      add(CAPACITY_EXCEEDED, containerId, `${load} items > capacity ${t.container_capacity}`);
    }
  }

  for (const it of items) {
    const seenChain = new Set<string>();
    let current: string | null = it.id;
    while (current !== null) {
      if (seenChain.has(current)) {
        add(CONTAINER_CYCLE, it.id, "containment chain loops");
        break;
      }
      seenChain.add(current);
      const holder = map.items.get(current);
      if (holder === undefined) break;
      current = holder.placement.kind === "container" ? holder.placement.item_id : null;
    }
  }

  // Agents.
  for (const ag of sortedById(map.agents.values())) {
    if (!inBounds(map, ag.start_pos.x, ag.start_pos.y)) {
      add(OUT_OF_BOUNDS, ag.id, `start (${ag.start_pos.x}, ${ag.start_pos.y}) out of bounds`);
    } else if (!isWalkable(map, ag.start_pos.x, ag.start_pos.y)) {
      add(UNWALKABLE_START, ag.id, `start (${ag.start_pos.x}, ${ag.start_pos.y}) not walkable`);
    }
    if (!map.areas.has(ag.home_area)) {
      add(UNKNOWN_AREA, ag.id, `home area "${ag.home_area}" unknown`);
    }
    if (ag.movement_speed <= 0) {
      add(BAD_SPEED, ag.id, `movement_speed ${ag.movement_speed} <= 0`);
    }
  }

  return { ok: violations.length === 0, violations };
}
