/** Studio entry point: hash routing between the map list, the editor, the
 * trace list, and the playback viewer. All data comes from the backend HTTP
 * API via StudioApi. */

import { StudioApi } from "./api";
import { mountEditor } from "./views/editorView";
import { mountPlayer } from "./views/playerView";
import { clear, el } from "./views/dom";

const api = new StudioApi("");
const view = document.getElementById("view")!;
const conn = document.getElementById("conn")!;

let cleanup: (() => void) | null = null;

function setActiveNav(page: string): void {
  for (const link of document.querySelectorAll<HTMLAnchorElement>("[data-nav]")) {
    link.classList.toggle("active", link.dataset["nav"] === page);
  }
}

function showError(err: unknown): void {
  clear(view);
  view.append(
    el(
      "div",
      { class: "list-page" },
      el("h2", { text: "something went wrong" }),
      el("p", { class: "status-line error", text: err instanceof Error ? err.message : String(err) }),
      el("p", {}, el("a", { href: "#/maps", text: "back to maps" })),
    ),
  );
}

async function showMaps(): Promise<void> {
  setActiveNav("maps");
  const maps = await api.listMaps();
  clear(view);
  const table = el("table");
  table.append(
    el(
      "tr",
      {},
      ...["id", "name", "size", "areas", "items", "agents"].map((h) => el("th", { text: h })),
    ),
  );
  for (const summary of maps) {
    table.append(
      el(
        "tr",
        { class: "row", onclick: () => (location.hash = `#/edit/${summary.id}`) },
        el("td", { text: summary.id }),
        el("td", { text: summary.name }),
        el("td", { text: `${summary.width}×${summary.height}` }),
        el("td", { text: String(summary.area_count) }),
        el("td", { text: String(summary.item_count) }),
        el("td", { text: String(summary.agent_count) }),
      ),
    );
  }
  view.append(
    el(
      "div",
      { class: "list-page" },
      el("h2", { text: "maps" }),
      el("p", { class: "muted", text: "Click a map to edit it, or start a fresh one." }),
      el("p", {}, el("button", {
        class: "primary",
        text: "new map",
        onclick: () => {
          const id = window.prompt("new map id (letters, digits, underscores):");
          if (id === null || id === "") return;
          location.hash = `#/new/${id}`;
        },
      })),
      table,
    ),
  );
}

async function showTraces(): Promise<void> {
  setActiveNav("traces");
  const traces = await api.listTraces();
  clear(view);
  const table = el("table");
  table.append(
    el(
      "tr",
      {},
      ...["id", "scenario", "variant", "map", "agents", "created"].map((h) => el("th", { text: h })),
    ),
  );
  for (const summary of traces) {
    table.append(
      el(
        "tr",
        { class: "row", onclick: () => (location.hash = `#/play/${summary.id}`) },
        el("td", { text: summary.id }),
        el("td", { text: summary.scenario_name ?? summary.scenario_id ?? "—" }),
        el("td", { text: summary.variant }),
        el("td", { text: summary.map_id }),
        el("td", { text: summary.agents.join(", ") }),
        el("td", { text: summary.created }),
      ),
    );
  }
  view.append(
    el(
      "div",
      { class: "list-page" },
      el("h2", { text: "traces" }),
      el("p", {
        class: "muted",
        text: "Traces land here when runs write into the backend's data directory. Click one to replay it.",
      }),
      table,
    ),
  );
}

async function route(): Promise<void> {
  if (cleanup !== null) {
    cleanup();
    cleanup = null;
  }
  const hash = location.hash || "#/maps";
  const [, page = "maps", arg = ""] = hash.replace(/^#\//, "").match(/^([^/]*)\/?(.*)$/) ?? [];
  try {
    if (page === "maps" || page === "") {
      await showMaps();
    } else if (page === "edit" && arg !== "") {
      setActiveNav("maps");
      cleanup = await mountEditor(view, api, decodeURIComponent(arg), false);
    } else if (page === "new" && arg !== "") {
      setActiveNav("maps");
      cleanup = await mountEditor(view, api, decodeURIComponent(arg), true);
    } else if (page === "traces") {
      await showTraces();
    } else if (page === "play" && arg !== "") {
      setActiveNav("traces");
      cleanup = await mountPlayer(view, api, decodeURIComponent(arg));
    } else {
      location.hash = "#/maps";
    }
  } catch (err) {
    showError(err);
  }
}

async function checkHealth(): Promise<void> {
  try {
    await api.health();
    conn.classList.add("ok");
    conn.classList.remove("bad");
    conn.title = "backend reachable";
  } catch {
    conn.classList.add("bad");
    conn.classList.remove("ok");
    conn.title = "backend unreachable";
  }
}

window.addEventListener("hashchange", () => void route());
void route();
void checkHealth();
setInterval(() => void checkHealth(), 15_000);
