/** In-memory map model for the editor.
 *
 * The wire document encodes area membership as a single grid of codes where
 * each cell carries the deepest area covering it; an area's full tile set is
 * its own cells plus all descendants' cells. The editor works with explicit
 * per-area tile sets and converts to/from that encoding here, reproducing the
 * backend's conversion rules so a load -> save round trip is lossless for any
 * valid map.
 */

import type { AgentDoc, AreaDoc, ItemDoc, ItemTypeDoc, MapDocument, Placement } from "./types";
import { FORMAT_NAME, FORMAT_VERSION } from "./types";

export interface AreaModel {
  id: string;
  name: string;
  kind: string;
  parent: string | null;
  /** Every tile the area covers, as "x,y" keys (includes descendants' tiles). */
  tiles: Set<string>;
}

export interface EditorMap {
  id: string;
  name: string;
  width: number;
  height: number;
  walkable: boolean[][];
  areas: Map<string, AreaModel>;
  itemTypes: Map<string, ItemTypeDoc>;
  items: Map<string, ItemDoc>;
  agents: Map<string, AgentDoc>;
}

export function tileKey(x: number, y: number): string {
  return `${x},${y}`;
}

export function parseTileKey(key: string): { x: number; y: number } {
  const [x = "0", y = "0"] = key.split(",");
  return { x: Number(x), y: Number(y) };
}

export function blankMap(id: string, name: string, width: number, height: number): EditorMap {
  return {
    id,
    name,
    width,
    height,
    walkable: Array.from({ length: height }, () => Array.from({ length: width }, () => true)),
    areas: new Map(),
    itemTypes: new Map(),
    items: new Map(),
    agents: new Map(),
  };
}

/** Ancestor chain of an area (nearest first), stopping at unknown parents or
 * cycles. Tolerant so invalid maps can still be edited and serialized. */
function ancestorsOf(areas: Map<string, { parent: string | null }>, areaId: string): string[] {
  const chain: string[] = [];
  const seen = new Set<string>([areaId]);
  let current = areas.get(areaId)?.parent ?? null;
  while (current !== null && areas.has(current) && !seen.has(current)) {
    chain.push(current);
    seen.add(current);
    current = areas.get(current)?.parent ?? null;
  }
  return chain;
}

function areaDepth(areas: Map<string, { parent: string | null }>, areaId: string): number {
  return ancestorsOf(areas, areaId).length;
}

/** Stable area-id -> positive code assignment (sorted ids, 1-based). */
export function areaCodes(map: EditorMap): Map<string, number> {
  const ids = [...map.areas.keys()].sort();
  return new Map(ids.map((id, i) => [id, i + 1]));
}

export function fromDocument(doc: MapDocument): EditorMap {
  const map = blankMap(doc.id, doc.name, doc.width, doc.height);
  for (let y = 0; y < doc.height; y += 1) {
    for (let x = 0; x < doc.width; x += 1) {
      map.walkable[y]![x] = Boolean(doc.walkable[y]?.[x]);
    }
  }

  const byCode = new Map<number, string>();
  for (const area of doc.areas) {
    byCode.set(area.code, area.id);
    map.areas.set(area.id, {
      id: area.id,
      name: area.name,
      kind: area.kind,
      parent: area.parent,
      tiles: new Set(),
    });
  }
  // Own cells from the grid, then propagate to ancestors.
  for (let y = 0; y < doc.height; y += 1) {
    for (let x = 0; x < doc.width; x += 1) {
      const code = doc.area_codes[y]?.[x] ?? 0;
      if (code === 0) continue;
      const areaId = byCode.get(code);
      if (areaId === undefined) continue;
      const key = tileKey(x, y);
      map.areas.get(areaId)!.tiles.add(key);
      for (const ancestor of ancestorsOf(map.areas, areaId)) {
        map.areas.get(ancestor)!.tiles.add(key);
      }
    }
  }

  for (const t of doc.item_types) {
    map.itemTypes.set(t.id, {
      id: t.id,
      name: t.name,
      properties: { ...t.properties },
      portable: t.portable,
      container_capacity: t.container_capacity,
    });
  }
  for (const it of doc.items) {
    map.items.set(it.id, { id: it.id, type_id: it.type_id, placement: { ...it.placement } });
  }
  for (const ag of doc.agents) {
    map.agents.set(ag.id, {
      ...ag,
      core_traits: [...ag.core_traits],
      start_pos: { ...ag.start_pos },
    });
  }
  return map;
}

export function toDocument(map: EditorMap): MapDocument {
  const codes = areaCodes(map);

  const grid: number[][] = Array.from({ length: map.height }, () =>
    Array.from({ length: map.width }, () => 0),
  );
  // Deepest area painted last wins, ties broken by id — matching the backend.
  const ordered = [...map.areas.values()].sort((a, b) => {
    const depthDiff = areaDepth(map.areas, a.id) - areaDepth(map.areas, b.id);
    return depthDiff !== 0 ? depthDiff : a.id < b.id ? -1 : 1;
  });
  for (const area of ordered) {
    const code = codes.get(area.id)!;
    for (const key of area.tiles) {
      const { x, y } = parseTileKey(key);
      if (y >= 0 && y < map.height && x >= 0 && x < map.width) {
        grid[y]![x] = code;
      }
    }
  }

  const sortById = <T extends { id: string }>(entries: Iterable<T>): T[] =>
    [...entries].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));

  const areas: AreaDoc[] = sortById(map.areas.values()).map((a) => ({
    id: a.id,
    name: a.name,
    kind: a.kind,
    parent: a.parent,
    code: codes.get(a.id)!,
  }));
  const itemTypes: ItemTypeDoc[] = sortById(map.itemTypes.values()).map((t) => ({
    id: t.id,
    name: t.name,
    properties: Object.fromEntries(Object.entries(t.properties).sort(([a], [b]) => (a < b ? -1 : 1))),
    portable: t.portable,
    container_capacity: t.container_capacity,
  }));
  const items: ItemDoc[] = sortById(map.items.values()).map((it) => ({
    id: it.id,
    type_id: it.type_id,
    placement: { ...it.placement } as Placement,
  }));
  const agents: AgentDoc[] = sortById(map.agents.values()).map((ag) => ({
    id: ag.id,
    name: ag.name,
    personality: ag.personality,
    core_traits: [...ag.core_traits],
    lifestyle: ag.lifestyle,
    home_area: ag.home_area,
    start_pos: { ...ag.start_pos },
    movement_speed: ag.movement_speed,
  }));

  return {
    format: FORMAT_NAME,
    version: FORMAT_VERSION,
    id: map.id,
    name: map.name,
    width: map.width,
    height: map.height,
    areas,
    item_types: itemTypes,
    items,
    agents,
    walkable: map.walkable.map((row) => row.map((cell) => (cell ? 1 : 0))),
    area_codes: grid,
  };
}

export function cloneMap(map: EditorMap): EditorMap {
  return structuredClone(map);
}
