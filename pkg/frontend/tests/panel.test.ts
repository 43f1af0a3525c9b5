/** Inspection panel view models: bag listings with resolved type names,
 * placement chains, dialogue context, and the simulated clock label. */

import { describe, expect, it } from "vitest";
import { agentPanel, clockLabel, describePlacement, documentPlacements, itemPanel } from "../src/panel";
import type { MapDocument, Snapshot } from "../src/types";
import { loadJsonFixture } from "./helpers";

const doc = loadJsonFixture<MapDocument>("map_document.json");
const [firstAgent] = doc.agents;
const [firstType] = doc.item_types;
if (firstAgent === undefined || firstType === undefined) throw new Error("fixture too small");

function snapshotWith(overrides: Partial<Snapshot>): Snapshot {
  return {
    tick: 10,
    agents: {},
    items: {},
    dialogues: [],
    ...overrides,
  };
}

describe("agentPanel", () => {
  it("resolves display names, bag type names, and dialogue context", () => {
    const [a, b] = doc.agents;
    if (a === undefined || b === undefined) throw new Error("need two agents in fixture");
    const item = doc.items.find((it) => it.type_id === firstType.id) ?? doc.items[0]!;
    const snapshot = snapshotWith({
      agents: {
        [a.id]: { pos: [4, 5], status: "InDialogue", current_action: "set the table", bag: [item.id] },
        [b.id]: { pos: [4, 6], status: "InDialogue", current_action: null, bag: [] },
      },
      items: { [item.id]: { kind: "bag", agent_id: a.id } },
      dialogues: [{ id: "dlg-1", participants: [a.id, b.id], topic: "dinner plans", utterances: 3 }],
    });

    const model = agentPanel(doc, snapshot, a.id)!;
    expect(model.name).toBe(a.name);
    expect(model.status).toBe("InDialogue");
    expect(model.currentAction).toBe("set the table");
    expect(model.pos).toEqual([4, 5]);
    expect(model.bag).toEqual([
      { id: item.id, typeName: doc.item_types.find((t) => t.id === item.type_id)!.name },
    ]);
    expect(model.dialogue).toEqual({ topic: "dinner plans", withNames: [b.name], utterances: 3 });
  });

  it("returns null for agents missing from the snapshot", () => {
    expect(agentPanel(doc, snapshotWith({}), "nobody")).toBeNull();
  });
});

describe("describePlacement", () => {
  it("names tiles, bags, and container chains", () => {
    const item = doc.items[0]!;
    const holder = doc.items[1] ?? item;
    const placements = {
      [item.id]: { kind: "container", item_id: holder.id } as const,
      [holder.id]: { kind: "tile", x: 3, y: 4 } as const,
    };
    expect(describePlacement(doc, placements, { kind: "tile", x: 1, y: 2 })).toBe("on tile (1, 2)");
    expect(describePlacement(doc, placements, { kind: "bag", agent_id: firstAgent.id })).toBe(
      `in ${firstAgent.name}'s bag`,
    );
    const holderType = doc.item_types.find((t) => t.id === holder.type_id)!.name;
    expect(describePlacement(doc, placements, { kind: "container", item_id: holder.id })).toBe(
      `in ${holderType} (on tile (3, 4))`,
    );
  });

  it("caps runaway chains instead of recursing forever", () => {
    const item = doc.items[0]!;
    const placements = { [item.id]: { kind: "container", item_id: item.id } as const };
    const text = describePlacement(doc, placements, { kind: "container", item_id: item.id });
    expect(text.length).toBeLessThan(500);
  });
});

describe("itemPanel", () => {
  it("lists type facts, location, and contents", () => {
    const container = doc.items[0]!;
    const inner = doc.items[1]!;
    const placements = {
      [container.id]: { kind: "tile", x: 2, y: 2 } as const,
      [inner.id]: { kind: "container", item_id: container.id } as const,
    };
    const model = itemPanel(doc, placements, container.id)!;
    expect(model.id).toBe(container.id);
    expect(model.location).toBe("on tile (2, 2)");
    expect(model.contents).toEqual([
      { id: inner.id, typeName: doc.item_types.find((t) => t.id === inner.type_id)!.name },
    ]);
  });

  it("returns null for unknown items", () => {
    expect(itemPanel(doc, {}, "ghost")).toBeNull();
  });

  it("documentPlacements reflects the document's own placements", () => {
    const placements = documentPlacements(doc);
    for (const item of doc.items) {
      expect(placements[item.id]).toEqual(item.placement);
    }
  });
});

describe("clockLabel", () => {
  it("advances from the start time by minutes per tick", () => {
    expect(clockLabel("07:00", 1, 0)).toBe("07:00");
    expect(clockLabel("07:00", 1, 30)).toBe("07:30");
    expect(clockLabel("07:00", 1, 600)).toBe("17:00");
    expect(clockLabel("23:50", 1, 5)).toBe("23:55");
  });

  it("labels runs that cross midnight", () => {
    expect(clockLabel("23:50", 1, 20)).toBe("day 2, 00:10");
    expect(clockLabel("07:00", 30, 40)).toBe("day 2, 03:00");
  });
});
