/** Wire types for the townlet HTTP API.
 *
 * These mirror the JSON shapes the backend serves; the studio never invents
 * fields of its own on these objects so that documents round-trip untouched.
 */

// --- map documents -----------------------------------------------------------

export const FORMAT_NAME = "townlet-map";
export const FORMAT_VERSION = 1;

export const MAX_AGENTS = 15;
export const MAX_ITEM_TYPES = 100;

export const AREA_KINDS = ["building", "room", "sector"] as const;
export type AreaKind = (typeof AREA_KINDS)[number];

export interface AreaDoc {
  id: string;
  name: string;
  kind: string;
  parent: string | null;
  code: number;
}

export interface ItemTypeDoc {
  id: string;
  name: string;
  properties: Record<string, string>;
  portable: boolean;
  container_capacity: number;
}

export type Placement =
  | { kind: "tile"; x: number; y: number }
  | { kind: "container"; item_id: string }
  | { kind: "bag"; agent_id: string };

export interface ItemDoc {
  id: string;
  type_id: string;
  placement: Placement;
}

export interface AgentDoc {
  id: string;
  name: string;
  personality: string;
  core_traits: string[];
  lifestyle: string;
  home_area: string;
  start_pos: { x: number; y: number };
  movement_speed: number;
}

export interface MapDocument {
  format: string;
  version: number;
  id: string;
  name: string;
  width: number;
  height: number;
  areas: AreaDoc[];
  item_types: ItemTypeDoc[];
  items: ItemDoc[];
  agents: AgentDoc[];
  walkable: number[][];
  area_codes: number[][];
  map_hash?: string;
}

export interface MapSummary {
  id: string;
  name: string;
  width: number;
  height: number;
  area_count: number;
  item_count: number;
  agent_count: number;
}

export interface MapSaved {
  ok: boolean;
  id: string;
  map_hash: string;
}

export interface Violation {
  code: string;
  subject: string;
  message: string;
}

export interface ValidationReport {
  ok: boolean;
  violations: Violation[];
}

// --- traces ------------------------------------------------------------------

export interface TraceSummary {
  id: string;
  map_id: string;
  variant: string;
  scenario_id: string | null;
  scenario_name: string | null;
  agents: string[];
  created: string;
}

export interface TraceHeader {
  type: "header";
  format_version: number;
  map_id: string;
  map_hash: string;
  scenario: Record<string, unknown>;
  variant: string;
  seed: number;
  minutes_per_tick: number;
  start_time: string;
  backend_kind: string;
  created: string;
  agents: string[];
}

export interface TraceHeaderDetail {
  header: TraceHeader;
  final_tick: number;
  event_count: number;
}

export interface SimEvent {
  type: "event";
  tick: number;
  seq: number;
  kind: string;
  agent: string | null;
  data: Record<string, unknown>;
}

export interface EventWindow {
  trace_id: string;
  from_tick: number;
  to_tick: number;
  events: SimEvent[];
}

export interface AgentSnapshot {
  pos: [number, number];
  status: string;
  current_action: string | null;
  bag: string[];
}

export interface DialogueSnapshot {
  id: string;
  participants: string[];
  topic: string;
  utterances: number;
}

export interface Snapshot {
  tick: number;
  agents: Record<string, AgentSnapshot>;
  items: Record<string, Placement>;
  dialogues: DialogueSnapshot[];
}

export interface SnapshotResponse {
  trace_id: string;
  snapshot: Snapshot;
}
