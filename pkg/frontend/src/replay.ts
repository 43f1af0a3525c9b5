/** Event-sourced replay state.
 *
 * A trace is a header plus an ordered event stream; dynamic state at tick T
 * is the map's initial state with every event of tick <= T applied. This
 * reducer applies events the same way the backend does, so a state seeded
 * from any snapshot endpoint response and advanced over fetched events stays
 * bit-equal to what the endpoint would return at the later tick.
 */

import type { DialogueSnapshot, Placement, SimEvent, Snapshot } from "./types";

export interface WorkingAgent {
  pos: [number, number];
  status: string;
  current_action: string | null;
}

export interface ReplayState {
  tick: number;
  agents: Map<string, WorkingAgent>;
  items: Map<string, Placement>;
  dialogues: DialogueSnapshot[];
}

export function stateFromSnapshot(snapshot: Snapshot): ReplayState {
  const agents = new Map<string, WorkingAgent>();
  for (const [id, agent] of Object.entries(snapshot.agents)) {
    agents.set(id, {
      pos: [agent.pos[0], agent.pos[1]],
      status: agent.status,
      current_action: agent.current_action,
    });
  }
  const items = new Map<string, Placement>();
  for (const [id, placement] of Object.entries(snapshot.items)) {
    items.set(id, { ...placement });
  }
  return {
    tick: snapshot.tick,
    agents,
    items,
    dialogues: snapshot.dialogues.map((d) => ({ ...d, participants: [...d.participants] })),
  };
}

function asStringArray(value: unknown): string[] {
  return Array.isArray(value) ? value.map(String) : [];
}

export function applyEvent(state: ReplayState, event: SimEvent): void {
  const data = event.data;
  switch (event.kind) {
    case "Move": {
      const entry = state.agents.get(event.agent!);
      if (entry === undefined) return;
      const to = data.to as [number, number];
      entry.pos = [to[0], to[1]];
      entry.status = String(data.status);
      return;
    }
    case "PickUp": {
      state.items.set(String(data.item), { kind: "bag", agent_id: event.agent! });
      const entry = state.agents.get(event.agent!);
      if (entry !== undefined) entry.status = String(data.status);
      return;
    }
    case "PutDown": {
      state.items.set(String(data.item), { ...(data.placement as Placement) });
      return;
    }
    case "ActionStart": {
      const entry = state.agents.get(event.agent!);
      if (entry === undefined) return;
      entry.status = "Executing";
      entry.current_action = String(data.description);
      return;
    }
    case "ActionEnd": {
      const entry = state.agents.get(event.agent!);
      if (entry === undefined) return;
      entry.status = "Idle";
      entry.current_action = null;
      return;
    }
    case "StatusChange": {
      const entry = state.agents.get(event.agent!);
      if (entry === undefined) return;
      entry.status = String(data.status);
      entry.current_action = data.current_action === null ? null : String(data.current_action);
      return;
    }
    case "DialogueStart": {
      const participants = asStringArray(data.participants);
      for (const participant of participants) {
        const entry = state.agents.get(participant);
        if (entry !== undefined) entry.status = "InDialogue";
      }
      state.dialogues.push({
        id: String(data.session),
        participants,
        topic: String(data.topic),
        utterances: 0,
      });
      return;
    }
    case "DialogueUtterance": {
      for (const session of state.dialogues) {
        if (session.id === String(data.session)) session.utterances += 1;
      }
      return;
    }
    case "DialogueEnd": {
      const session = String(data.session);
      state.dialogues = state.dialogues.filter((d) => d.id !== session);
      const resumed = data.resumed as Record<
        string,
        { status: string; current_action: string | null }
      >;
      for (const participant of Object.keys(resumed).sort()) {
        const entry = state.agents.get(participant);
        if (entry === undefined) continue;
        entry.status = resumed[participant]!.status;
        entry.current_action = resumed[participant]!.current_action;
      }
      return;
    }
    default:
      return; // PlanCreated / PerceptionBatch / LlmCall / Warning carry no state
  }
}

/** Canonical snapshot of the state: sorted keys, bags derived from item
 * placements — the same shape the snapshot endpoint returns. */
export function snapshotOf(state: ReplayState): Snapshot {
  const bagByAgent = new Map<string, string[]>();
  for (const [itemId, placement] of state.items) {
    if (placement.kind === "bag") {
      const bag = bagByAgent.get(placement.agent_id) ?? [];
      bag.push(itemId);
      bagByAgent.set(placement.agent_id, bag);
    }
  }
  const agents: Snapshot["agents"] = {};
  for (const id of [...state.agents.keys()].sort()) {
    const entry = state.agents.get(id)!;
    agents[id] = {
      pos: [entry.pos[0], entry.pos[1]],
      status: entry.status,
      current_action: entry.current_action,
      bag: (bagByAgent.get(id) ?? []).sort(),
    };
  }
  const items: Snapshot["items"] = {};
  for (const id of [...state.items.keys()].sort()) {
    items[id] = { ...state.items.get(id)! };
  }
  return {
    tick: state.tick,
    agents,
    items,
    dialogues: [...state.dialogues]
      .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0))
      .map((d) => ({ ...d, participants: [...d.participants] })),
  };
}
