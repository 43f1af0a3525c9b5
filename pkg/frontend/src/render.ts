/** Scene building and canvas drawing for the grid.
 *
 * Scene construction is pure (tested); drawing is a thin pass over the scene.
 * Entities render as colored markers with a glyph derived from their name —
 * there is no sprite dependency, so every map renders out of the box.
 */

import type { EditorMap } from "./mapmodel";
import type { MapDocument, Snapshot } from "./types";
import { parseTileKey } from "./mapmodel";

export const WALKABLE_FILL = "#f2ead8";
export const BLOCKED_FILL = "#48413a";

export interface TilePaint {
  x: number;
  y: number;
  fill: string;
}

export interface GlyphPaint {
  x: number;
  y: number;
  text: string;
  color: string;
  kind: "agent" | "item";
  id: string;
  selected: boolean;
}

export interface Scene {
  width: number;
  height: number;
  tiles: TilePaint[];
  tints: TilePaint[];
  glyphs: GlyphPaint[];
}

export interface Viewport {
  tileSize: number;
  offsetX: number;
  offsetY: number;
}

/** One-character label for an entity: first letter of its name, uppercased. */
export function glyphFor(name: string): string {
  const first = [...name.trim()][0];
  return first === undefined ? "?" : first.toUpperCase();
}

/** Deterministic color from an id, spread around the hue wheel. */
export function colorFor(id: string): string {
  let hash = 0;
  for (const ch of id) hash = (hash * 31 + ch.codePointAt(0)!) >>> 0;
  return `hsl(${hash % 360}, 62%, 42%)`;
}

export function areaTint(code: number): string {
  return `hsla(${(code * 67) % 360}, 70%, 50%, 0.22)`;
}

export function fitViewport(
  gridWidth: number,
  gridHeight: number,
  canvasWidth: number,
  canvasHeight: number,
): Viewport {
  const tileSize = Math.max(
    1,
    Math.floor(Math.min(canvasWidth / gridWidth, canvasHeight / gridHeight)),
  );
  return {
    tileSize,
    offsetX: Math.floor((canvasWidth - gridWidth * tileSize) / 2),
    offsetY: Math.floor((canvasHeight - gridHeight * tileSize) / 2),
  };
}

/** Grid tile under a canvas point, or null when outside the grid. */
export function tileAtPoint(
  viewport: Viewport,
  gridWidth: number,
  gridHeight: number,
  px: number,
  py: number,
): { x: number; y: number } | null {
  const x = Math.floor((px - viewport.offsetX) / viewport.tileSize);
  const y = Math.floor((py - viewport.offsetY) / viewport.tileSize);
  if (x < 0 || x >= gridWidth || y < 0 || y >= gridHeight) return null;
  return { x, y };
}

function baseTiles(width: number, height: number, walkable: boolean[][]): TilePaint[] {
  const tiles: TilePaint[] = [];
  for (let y = 0; y < height; y += 1) {
    for (let x = 0; x < width; x += 1) {
      tiles.push({ x, y, fill: walkable[y]?.[x] ? WALKABLE_FILL : BLOCKED_FILL });
    }
  }
  return tiles;
}

/** Scene for the editor: terrain, area tints, placed items, agent starts. */
export function editorScene(map: EditorMap, selectedAreaId: string | null): Scene {
  const tints: TilePaint[] = [];
  const sortedAreaIds = [...map.areas.keys()].sort();
  sortedAreaIds.forEach((areaId, index) => {
    const area = map.areas.get(areaId)!;
    const fill =
      areaId === selectedAreaId ? "hsla(48, 100%, 50%, 0.45)" : areaTint(index + 1);
    for (const key of area.tiles) {
      const { x, y } = parseTileKey(key);
      tints.push({ x, y, fill });
    }
  });

  const glyphs: GlyphPaint[] = [];
  for (const item of [...map.items.values()].sort((a, b) => (a.id < b.id ? -1 : 1))) {
    if (item.placement.kind !== "tile") continue;
    const type = map.itemTypes.get(item.type_id);
    glyphs.push({
      x: item.placement.x,
      y: item.placement.y,
      text: glyphFor(type?.name ?? item.type_id),
      color: colorFor(item.type_id),
      kind: "item",
      id: item.id,
      selected: false,
    });
  }
  for (const agent of [...map.agents.values()].sort((a, b) => (a.id < b.id ? -1 : 1))) {
    glyphs.push({
      x: agent.start_pos.x,
      y: agent.start_pos.y,
      text: glyphFor(agent.name),
      color: colorFor(agent.id),
      kind: "agent",
      id: agent.id,
      selected: false,
    });
  }
  return { width: map.width, height: map.height, tiles: baseTiles(map.width, map.height, map.walkable.map((r) => [...r])), tints, glyphs };
}

/** Scene for playback: terrain from the map document, entities from the
 * snapshot. Items in bags or containers are not on the ground, so only
 * tile-placed items draw; agents draw at their snapshot positions. */
export function playbackScene(
  doc: MapDocument,
  snapshot: Snapshot,
  selectedId: string | null,
): Scene {
  const walkable = doc.walkable.map((row) => row.map((cell) => Boolean(cell)));
  const typeNames = new Map(doc.item_types.map((t) => [t.id, t.name]));
  const itemTypes = new Map(doc.items.map((it) => [it.id, it.type_id]));

  const glyphs: GlyphPaint[] = [];
  for (const itemId of Object.keys(snapshot.items).sort()) {
    const placement = snapshot.items[itemId]!;
    if (placement.kind !== "tile") continue;
    const typeId = itemTypes.get(itemId) ?? itemId;
    glyphs.push({
      x: placement.x,
      y: placement.y,
      text: glyphFor(typeNames.get(typeId) ?? typeId),
      color: colorFor(typeId),
      kind: "item",
      id: itemId,
      selected: itemId === selectedId,
    });
  }
  const displayNames = new Map(doc.agents.map((ag) => [ag.id, ag.name]));
  for (const agentId of Object.keys(snapshot.agents).sort()) {
    const agent = snapshot.agents[agentId]!;
    glyphs.push({
      x: agent.pos[0],
      y: agent.pos[1],
      text: glyphFor(displayNames.get(agentId) ?? agentId),
      color: colorFor(agentId),
      kind: "agent",
      id: agentId,
      selected: agentId === selectedId,
    });
  }
  return { width: doc.width, height: doc.height, tiles: baseTiles(doc.width, doc.height, walkable), tints: [], glyphs };
}

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene, viewport: Viewport): void {
  const { tileSize, offsetX, offsetY } = viewport;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (const tile of scene.tiles) {
    ctx.fillStyle = tile.fill;
    ctx.fillRect(offsetX + tile.x * tileSize, offsetY + tile.y * tileSize, tileSize, tileSize);
  }
  for (const tint of scene.tints) {
    ctx.fillStyle = tint.fill;
    ctx.fillRect(offsetX + tint.x * tileSize, offsetY + tint.y * tileSize, tileSize, tileSize);
  }
  if (tileSize >= 8) {
    ctx.strokeStyle = "rgba(0, 0, 0, 0.08)";
    ctx.lineWidth = 1;
    for (let x = 0; x <= scene.width; x += 1) {
      ctx.beginPath();
      ctx.moveTo(offsetX + x * tileSize, offsetY);
      ctx.lineTo(offsetX + x * tileSize, offsetY + scene.height * tileSize);
      ctx.stroke();
    }
    for (let y = 0; y <= scene.height; y += 1) {
      ctx.beginPath();
      ctx.moveTo(offsetX, offsetY + y * tileSize);
      ctx.lineTo(offsetX + scene.width * tileSize, offsetY + y * tileSize);
      ctx.stroke();
    }
  }
  for (const glyph of scene.glyphs) {
    const cx = offsetX + glyph.x * tileSize + tileSize / 2;
    const cy = offsetY + glyph.y * tileSize + tileSize / 2;
    const radius = glyph.kind === "agent" ? tileSize * 0.42 : tileSize * 0.3;
    ctx.beginPath();
    if (glyph.kind === "agent") {
      ctx.arc(cx, cy, radius, 0, Math.PI * 2);
    } else {
      ctx.rect(cx - radius, cy - radius, radius * 2, radius * 2);
    }
    ctx.fillStyle = glyph.color;
    ctx.fill();
    if (glyph.selected) {
      ctx.strokeStyle = "#ffd400";
      ctx.lineWidth = Math.max(2, tileSize * 0.1);
      ctx.stroke();
    }
    ctx.fillStyle = "#ffffff";
    ctx.font = `bold ${Math.max(8, Math.floor(tileSize * 0.5))}px system-ui, sans-serif`;
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(glyph.text, cx, cy);
  }
}
