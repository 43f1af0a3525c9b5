/** Editor state: a map model, primitive edit operations, undo/redo.
 *
 * Every operation snapshots the model before mutating, so undo restores the
 * exact prior state; no-op calls (painting a tile to its current value, etc.)
 * push nothing. Area painting keeps the nesting invariant the wire format
 * implies: adding a tile to an area adds it to all ancestors, removing one
 * removes it from all descendants.
 */

import type { AgentDoc, ItemTypeDoc, MapDocument, Placement, ValidationReport } from "./types";
import type { EditorMap } from "./mapmodel";
import { cloneMap, tileKey, toDocument } from "./mapmodel";
import { validateEditorMap } from "./validation";

const MAX_UNDO = 200;

export interface Tile {
  x: number;
  y: number;
}

export class EditorStore {
  private map: EditorMap;
  private undoStack: EditorMap[] = [];
  private redoStack: EditorMap[] = [];
  private listeners = new Set<() => void>();
  revision = 0;

  constructor(map: EditorMap) {
    this.map = map;
  }

  get current(): Readonly<EditorMap> {
    return this.map;
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  get canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  document(): MapDocument {
    return toDocument(this.map);
  }

  validate(): ValidationReport {
    return validateEditorMap(this.map);
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) return false;
    this.redoStack.push(this.map);
    this.map = prev;
    this.bump();
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (next === undefined) return false;
    this.undoStack.push(this.map);
    this.map = next;
    this.bump();
    return true;
  }

  private bump(): void {
    this.revision += 1;
    for (const listener of this.listeners) listener();
  }

  /** Snapshot, mutate, notify. The mutation returns false to signal a no-op,
   * in which case the snapshot is discarded and nothing changed. */
  private mutate(fn: (map: EditorMap) => boolean): boolean {
    const before = cloneMap(this.map);
    if (!fn(this.map)) return false;
    this.undoStack.push(before);
    if (this.undoStack.length > MAX_UNDO) this.undoStack.shift();
    this.redoStack = [];
    this.bump();
    return true;
  }

  private inBounds(x: number, y: number): boolean {
    return x >= 0 && x < this.map.width && y >= 0 && y < this.map.height;
  }

  // --- terrain ---------------------------------------------------------------

  paintWalkable(tiles: Tile[], walkable: boolean): boolean {
    return this.mutate((map) => {
      let changed = false;
      for (const { x, y } of tiles) {
        if (!this.inBounds(x, y)) continue;
        if (map.walkable[y]![x] !== walkable) {
          map.walkable[y]![x] = walkable;
          changed = true;
        }
      }
      return changed;
    });
  }

  // --- areas -----------------------------------------------------------------

  addArea(id: string, name: string, kind: string, parent: string | null = null): boolean {
    return this.mutate((map) => {
      if (map.areas.has(id)) return false;
      map.areas.set(id, { id, name, kind, parent, tiles: new Set() });
      return true;
    });
  }

  setAreaMeta(
    id: string,
    patch: Partial<Pick<{ name: string; kind: string; parent: string | null }, "name" | "kind" | "parent">>,
  ): boolean {
    return this.mutate((map) => {
      const area = map.areas.get(id);
      if (area === undefined) return false;
      let changed = false;
      if (patch.name !== undefined && patch.name !== area.name) {
        area.name = patch.name;
        changed = true;
      }
      if (patch.kind !== undefined && patch.kind !== area.kind) {
        area.kind = patch.kind;
        changed = true;
      }
      if (patch.parent !== undefined && patch.parent !== area.parent) {
        area.parent = patch.parent;
        changed = true;
      }
      return changed;
    });
  }

  /** Remove an area; children are detached (parent set to null) rather than
   * left dangling. References from agents' home_area are left for validation
   * to flag, since silently reassigning homes would surprise the author. */
  removeArea(id: string): boolean {
    return this.mutate((map) => {
      if (!map.areas.delete(id)) return false;
      for (const other of map.areas.values()) {
        if (other.parent === id) other.parent = null;
      }
      return true;
    });
  }

  private ancestorIds(areaId: string): string[] {
    const chain: string[] = [];
    const seen = new Set<string>([areaId]);
    let current = this.map.areas.get(areaId)?.parent ?? null;
    while (current !== null && this.map.areas.has(current) && !seen.has(current)) {
      chain.push(current);
      seen.add(current);
      current = this.map.areas.get(current)?.parent ?? null;
    }
    return chain;
  }

  private descendantIds(areaId: string): string[] {
    const out: string[] = [];
    for (const other of this.map.areas.keys()) {
      if (other !== areaId && this.ancestorIds(other).includes(areaId)) out.push(other);
    }
    return out;
  }

  paintArea(areaId: string, tiles: Tile[], mode: "add" | "remove"): boolean {
    const ancestors = mode === "add" ? this.ancestorIds(areaId) : [];
    const descendants = mode === "remove" ? this.descendantIds(areaId) : [];
    return this.mutate((map) => {
      const area = map.areas.get(areaId);
      if (area === undefined) return false;
      let changed = false;
      for (const { x, y } of tiles) {
        if (!this.inBounds(x, y)) continue;
        const key = tileKey(x, y);
        if (mode === "add") {
          if (!area.tiles.has(key)) changed = true;
          area.tiles.add(key);
          for (const ancestor of ancestors) map.areas.get(ancestor)!.tiles.add(key);
        } else {
          if (area.tiles.delete(key)) changed = true;
          for (const descendant of descendants) map.areas.get(descendant)!.tiles.delete(key);
        }
      }
      return changed;
    });
  }

  // --- item types ------------------------------------------------------------

  upsertItemType(type: ItemTypeDoc): boolean {
    return this.mutate((map) => {
      const existing = map.itemTypes.get(type.id);
      if (existing !== undefined && JSON.stringify(existing) === JSON.stringify(type)) {
        return false;
      }
      map.itemTypes.set(type.id, {
        ...type,
        properties: { ...type.properties },
      });
      return true;
    });
  }

  removeItemType(id: string): boolean {
    return this.mutate((map) => map.itemTypes.delete(id));
  }

  setTypeProperty(typeId: string, key: string, value: string): boolean {
    return this.mutate((map) => {
      const type = map.itemTypes.get(typeId);
      if (type === undefined || type.properties[key] === value) return false;
      type.properties[key] = value;
      return true;
    });
  }

  removeTypeProperty(typeId: string, key: string): boolean {
    return this.mutate((map) => {
      const type = map.itemTypes.get(typeId);
      if (type === undefined || !(key in type.properties)) return false;
      delete type.properties[key];
      return true;
    });
  }

  // --- items -----------------------------------------------------------------

  placeItem(id: string, typeId: string, placement: Placement): boolean {
    return this.mutate((map) => {
      if (map.items.has(id)) return false;
      map.items.set(id, { id, type_id: typeId, placement: { ...placement } });
      return true;
    });
  }

  moveItem(id: string, placement: Placement): boolean {
    return this.mutate((map) => {
      const item = map.items.get(id);
      if (item === undefined || JSON.stringify(item.placement) === JSON.stringify(placement)) {
        return false;
      }
      item.placement = { ...placement };
      return true;
    });
  }

  removeItem(id: string): boolean {
    return this.mutate((map) => map.items.delete(id));
  }

  // --- agents ----------------------------------------------------------------

  upsertAgent(agent: AgentDoc): boolean {
    return this.mutate((map) => {
      const existing = map.agents.get(agent.id);
      if (existing !== undefined && JSON.stringify(existing) === JSON.stringify(agent)) {
        return false;
      }
      map.agents.set(agent.id, {
        ...agent,
        core_traits: [...agent.core_traits],
        start_pos: { ...agent.start_pos },
      });
      return true;
    });
  }

  removeAgent(id: string): boolean {
    return this.mutate((map) => map.agents.delete(id));
  }

  // --- map-level -------------------------------------------------------------

  rename(name: string): boolean {
    return this.mutate((map) => {
      if (map.name === name) return false;
      map.name = name;
      return true;
    });
  }

  /** Resize the grid, preserving overlapping cells; new cells are walkable,
   * area tiles outside the new bounds are dropped. */
  resize(width: number, height: number): boolean {
    if (width <= 0 || height <= 0) return false;
    return this.mutate((map) => {
      if (map.width === width && map.height === height) return false;
      const walkable = Array.from({ length: height }, (_, y) =>
        Array.from({ length: width }, (_, x) => map.walkable[y]?.[x] ?? true),
      );
      map.walkable = walkable;
      map.width = width;
      map.height = height;
      for (const area of map.areas.values()) {
        for (const key of [...area.tiles]) {
          const [xs = "0", ys = "0"] = key.split(",");
          if (Number(xs) >= width || Number(ys) >= height) area.tiles.delete(key);
        }
      }
      return true;
    });
  }
}
