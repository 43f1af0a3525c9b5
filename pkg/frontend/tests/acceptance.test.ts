/** End-to-end acceptance against a live backend.
 *
 * A real `townlet serve` process is started on a scratch data directory and
 * everything goes through HTTP, exactly as the deployed studio would:
 *
 *  - editor round trip: a map authored through the editor store — nested
 *    containers, a type with properties, three agents — passes local
 *    validation, saves with a 200, reads back identically, and the stored
 *    bundle passes `townlet validate-map`;
 *  - never looser: documents the local validator rejects are also rejected
 *    by the server, with the local codes a subset of the server's;
 *  - viewer fidelity: for random ticks of a reference trace, state reached
 *    by jumping to an earlier snapshot and streaming events equals the
 *    snapshot endpoint's answer, and the rendered scene places every agent
 *    at that position.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdirSync, mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { StudioApi, SaveRejected } from "../src/api";
import { EditorStore } from "../src/editor";
import { blankMap, fromDocument } from "../src/mapmodel";
import { Player } from "../src/player";
import { playbackScene } from "../src/render";
import { mulberry32 } from "./helpers";

const run = promisify(execFile);

const PORT = 8700 + (process.pid % 250);
const BASE = `http://127.0.0.1:${PORT}`;

let dataDir: string;
let server: ChildProcess;
let api: StudioApi;

async function waitForHealth(): Promise<void> {
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/api/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error(`backend never became healthy on ${BASE}`);
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "studio-acceptance-"));
  mkdirSync(join(dataDir, "traces"));
  await run("townlet", [
    "simulate",
    "--scenario",
    "friends_dinner",
    "--variant",
    "basic",
    "--ticks",
    "1000",
    "--seed",
    "11",
    "--out",
    join(dataDir, "traces", "ref.jsonl"),
  ]);
  server = spawn("townlet", ["serve", "--data-dir", dataDir, "--port", String(PORT)], {
    stdio: "ignore",
  });
  api = new StudioApi(BASE);
  await waitForHealth();
});

afterAll(() => {
  server?.kill();
  if (dataDir !== undefined) rmSync(dataDir, { recursive: true, force: true });
});

/** A small homestead authored entirely through editor operations: a house
 * with a kitchen inside it, a yard, a pantry holding a crate holding a jar
 * (nested containers), a jar type with properties, and three residents. */
function authorHomestead(id = "homestead"): EditorStore {
  const store = new EditorStore(blankMap(id, "The Homestead", 16, 12));

  const rect = (x0: number, y0: number, x1: number, y1: number) => {
    const tiles = [];
    for (let y = y0; y <= y1; y += 1) for (let x = x0; x <= x1; x += 1) tiles.push({ x, y });
    return tiles;
  };

  store.paintWalkable(rect(0, 5, 0, 7), false); // a wall segment

  store.addArea("house", "House", "building");
  store.paintArea("house", rect(2, 2, 9, 7), "add");
  store.addArea("kitchen", "Kitchen", "room", "house");
  store.paintArea("kitchen", rect(2, 2, 5, 4), "add");
  store.addArea("yard", "Yard", "sector");
  store.paintArea("yard", rect(11, 2, 15, 9), "add");

  store.upsertItemType({ id: "pantry", name: "pantry shelf", properties: {}, portable: false, container_capacity: 4 });
  store.upsertItemType({ id: "crate", name: "wooden crate", properties: {}, portable: true, container_capacity: 2 });
  store.upsertItemType({ id: "jar", name: "mason jar", properties: {}, portable: true, container_capacity: 0 });
  store.setTypeProperty("jar", "contents", "flour");
  store.setTypeProperty("jar", "sealed", "yes");

  store.placeItem("pantry_1", "pantry", { kind: "tile", x: 3, y: 3 });
  store.placeItem("crate_1", "crate", { kind: "container", item_id: "pantry_1" });
  store.placeItem("jar_1", "jar", { kind: "container", item_id: "crate_1" });
  store.placeItem("jar_2", "jar", { kind: "tile", x: 12, y: 3 });

  const resident = (id: string, name: string, x: number, y: number, home: string) => ({
    id,
    name,
    personality: "practical and curious",
    core_traits: ["neighborly"],
    lifestyle: "keeps a steady routine",
    home_area: home,
    start_pos: { x, y },
    movement_speed: 4.0,
  });
  store.upsertAgent(resident("ada", "Ada", 3, 3, "kitchen"));
  store.upsertAgent(resident("bo", "Bo", 7, 6, "house"));
  store.upsertAgent(resident("cy", "Cy", 12, 5, "yard"));

  return store;
}

describe("editor round trip", () => {
  it("an authored map saves over HTTP and the stored bundle validates", async () => {
    const store = authorHomestead();

    const local = store.validate();
    expect(local).toEqual({ ok: true, violations: [] });

    const saved = await api.saveMap("homestead", store.document());
    expect(saved.ok).toBe(true);
    expect(saved.map_hash).toMatch(/^[0-9a-f]{64}$/);

    // Reading it back yields the same document the editor produced.
    const fetched = await api.getMap("homestead");
    expect(fetched.map_hash).toBe(saved.map_hash);
    delete fetched.map_hash;
    expect(fetched).toEqual(store.document());

    // And the editor can re-open it losslessly.
    const reopened = new EditorStore(fromDocument(fetched));
    expect(reopened.document()).toEqual(store.document());

    // The persisted bundle passes the backend's own validator CLI.
    const { stdout } = await run("townlet", ["validate-map", join(dataDir, "maps", "homestead")]);
    expect(JSON.parse(stdout)).toEqual({ ok: true, violations: [] });
  });

  it("appears in the map listing with authored counts", async () => {
    const listed = (await api.listMaps()).find((m) => m.id === "homestead");
    expect(listed).toMatchObject({
      name: "The Homestead",
      width: 16,
      height: 12,
      area_count: 3,
      item_count: 4,
      agent_count: 3,
    });
  });
});

describe("local validation is never looser than the server", () => {
  function breakages(): { label: string; store: EditorStore }[] {
    const out: { label: string; store: EditorStore }[] = [];

    const overLimit = authorHomestead("homestead-broken");
    for (let i = 0; i < 13; i += 1) {
      overLimit.upsertAgent({
        id: `extra_${i}`,
        name: `Extra ${i}`,
        personality: "",
        core_traits: [],
        lifestyle: "",
        home_area: "yard",
        start_pos: { x: 13, y: 8 },
        movement_speed: 4.0,
      });
    }
    out.push({ label: "sixteen agents", store: overLimit });

    const badKind = authorHomestead("homestead-broken");
    badKind.setAreaMeta("yard", { kind: "garden" });
    out.push({ label: "unknown area kind", store: badKind });

    const cycle = authorHomestead("homestead-broken");
    cycle.moveItem("pantry_1", { kind: "container", item_id: "crate_1" }); // crate in pantry, pantry in crate
    out.push({ label: "containment cycle", store: cycle });

    const overCapacity = authorHomestead("homestead-broken");
    overCapacity.placeItem("jar_3", "jar", { kind: "container", item_id: "crate_1" });
    overCapacity.placeItem("jar_4", "jar", { kind: "container", item_id: "crate_1" });
    out.push({ label: "crate over capacity", store: overCapacity });

    const badStart = authorHomestead("homestead-broken");
    const ada = badStart.current.agents.get("ada")!;
    badStart.upsertAgent({ ...ada, start_pos: { x: 0, y: 6 } }); // the wall segment
    out.push({ label: "agent on blocked tile", store: badStart });

    const badSpeed = authorHomestead("homestead-broken");
    const bo = badSpeed.current.agents.get("bo")!;
    badSpeed.upsertAgent({ ...bo, movement_speed: 0 });
    out.push({ label: "zero movement speed", store: badSpeed });

    const dupNames = authorHomestead("homestead-broken");
    dupNames.setAreaMeta("yard", { name: "House" });
    out.push({ label: "duplicate area names", store: dupNames });

    return out;
  }

  it.each(breakages())("$label: server rejects with a superset of local codes", async ({ store }) => {
    const local = store.validate();
    expect(local.ok).toBe(false);

    const err = await api.saveMap("homestead-broken", store.document()).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(SaveRejected);
    const serverCodes = new Set((err as SaveRejected).report.violations.map((v) => v.code));
    for (const violation of local.violations) {
      expect(serverCodes, `server should flag ${violation.code}`).toContain(violation.code);
    }
  });

  it("rejected maps are never persisted", async () => {
    const ids = (await api.listMaps()).map((m) => m.id);
    expect(ids).not.toContain("homestead-broken");
  });
});

describe("viewer fidelity", () => {
  it("player state and rendered agent positions match the snapshot endpoint at 10 random ticks", async () => {
    const traces = await api.listTraces();
    expect(traces.map((t) => t.id)).toContain("ref");
    const detail = await api.traceHeader("ref");
    const doc = await api.getMap(detail.header.map_id);
    expect(detail.final_tick).toBeGreaterThan(100);

    const rand = mulberry32(0x5eed);
    for (let round = 0; round < 10; round += 1) {
      const target = Math.floor(rand() * (detail.final_tick + 1));
      const anchor = Math.max(0, target - 50 - Math.floor(rand() * 400));

      const player = new Player(api, "ref", detail.final_tick);
      await player.jump(anchor);
      await player.seekForward(target);

      const local = player.snapshot();
      const { snapshot: remote } = await api.traceSnapshot("ref", target);
      expect(local, `tick ${target} via anchor ${anchor}`).toEqual(remote);

      const scene = playbackScene(doc, local!, null);
      for (const [agentId, agent] of Object.entries(remote.agents)) {
        const glyph = scene.glyphs.find((g) => g.kind === "agent" && g.id === agentId);
        expect(glyph, `agent ${agentId} at tick ${target}`).toMatchObject({
          x: agent.pos[0],
          y: agent.pos[1],
        });
        expect(local!.agents[agentId]!.bag).toEqual(agent.bag);
      }
    }
  }, 120_000);

  it("direct jumps land on the same state as streaming", async () => {
    const detail = await api.traceHeader("ref");
    const streamed = new Player(api, "ref", detail.final_tick);
    await streamed.jump(0);
    await streamed.seekForward(detail.final_tick);

    const jumped = new Player(api, "ref", detail.final_tick);
    await jumped.jump(detail.final_tick);

    expect(streamed.snapshot()).toEqual(jumped.snapshot());
  });
});
