/** View models for the inspection side panel.
 *
 * Pure projections from a map document plus current placements (either the
 * document's own, in the editor, or a replay snapshot's, in the viewer) into
 * the strings and lists the panel shows.
 */

import type { MapDocument, Placement, Snapshot } from "./types";

export interface BagEntry {
  id: string;
  typeName: string;
}

export interface AgentPanelModel {
  id: string;
  name: string;
  status: string;
  currentAction: string | null;
  pos: [number, number];
  bag: BagEntry[];
  dialogue: { topic: string; withNames: string[]; utterances: number } | null;
}

export interface ItemPanelModel {
  id: string;
  typeName: string;
  portable: boolean;
  capacity: number;
  properties: Record<string, string>;
  location: string;
  contents: BagEntry[];
}

function typeNameOf(doc: MapDocument, itemId: string): string {
  const item = doc.items.find((it) => it.id === itemId);
  if (item === undefined) return itemId;
  return doc.item_types.find((t) => t.id === item.type_id)?.name ?? item.type_id;
}

export function agentPanel(
  doc: MapDocument,
  snapshot: Snapshot,
  agentId: string,
): AgentPanelModel | null {
  const agent = snapshot.agents[agentId];
  if (agent === undefined) return null;
  const profile = doc.agents.find((ag) => ag.id === agentId);
  const name = profile?.name ?? agentId;
  const session = snapshot.dialogues.find((d) => d.participants.includes(agentId));
  const nameOf = (id: string) => doc.agents.find((ag) => ag.id === id)?.name ?? id;
  return {
    id: agentId,
    name,
    status: agent.status,
    currentAction: agent.current_action,
    pos: [agent.pos[0], agent.pos[1]],
    bag: agent.bag.map((itemId) => ({ id: itemId, typeName: typeNameOf(doc, itemId) })),
    dialogue:
      session === undefined
        ? null
        : {
            topic: session.topic,
            withNames: session.participants.filter((p) => p !== agentId).map(nameOf),
            utterances: session.utterances,
          },
  };
}

/** Human description of where an item sits, following container chains:
 * "in crate (on tile (3, 4))", "in Ada's bag", "on tile (7, 2)". */
export function describePlacement(
  doc: MapDocument,
  placements: Record<string, Placement>,
  placement: Placement,
  depth = 0,
): string {
  if (placement.kind === "tile") return `on tile (${placement.x}, ${placement.y})`;
  if (placement.kind === "bag") {
    const owner = doc.agents.find((ag) => ag.id === placement.agent_id);
    return `in ${owner?.name ?? placement.agent_id}'s bag`;
  }
  const holderName = typeNameOf(doc, placement.item_id);
  const holderPlacement = placements[placement.item_id];
  if (holderPlacement === undefined || depth >= 8) return `in ${holderName}`;
  return `in ${holderName} (${describePlacement(doc, placements, holderPlacement, depth + 1)})`;
}

export function itemPanel(
  doc: MapDocument,
  placements: Record<string, Placement>,
  itemId: string,
): ItemPanelModel | null {
  const item = doc.items.find((it) => it.id === itemId);
  const placement = placements[itemId];
  if (item === undefined || placement === undefined) return null;
  const type = doc.item_types.find((t) => t.id === item.type_id);
  const contents = Object.entries(placements)
    .filter(([, p]) => p.kind === "container" && p.item_id === itemId)
    .map(([id]) => ({ id, typeName: typeNameOf(doc, id) }))
    .sort((a, b) => (a.id < b.id ? -1 : 1));
  return {
    id: itemId,
    typeName: type?.name ?? item.type_id,
    portable: type?.portable ?? true,
    capacity: type?.container_capacity ?? 0,
    properties: { ...(type?.properties ?? {}) },
    location: describePlacement(doc, placements, placement),
    contents,
  };
}

/** The document's own placements, for inspecting items while editing. */
export function documentPlacements(doc: MapDocument): Record<string, Placement> {
  return Object.fromEntries(doc.items.map((it) => [it.id, it.placement]));
}

/** Simulated wall-clock label for a tick: "HH:MM", or "day N, HH:MM" once a
 * run crosses midnight. */
export function clockLabel(startTime: string, minutesPerTick: number, tick: number): string {
  const [h = "0", m = "0"] = startTime.split(":");
  const total = Number(h) * 60 + Number(m) + minutesPerTick * tick;
  const day = Math.floor(total / 1440);
  const hh = String(Math.floor((total % 1440) / 60)).padStart(2, "0");
  const mm = String(total % 60).padStart(2, "0");
  return day > 0 ? `day ${day + 1}, ${hh}:${mm}` : `${hh}:${mm}`;
}
