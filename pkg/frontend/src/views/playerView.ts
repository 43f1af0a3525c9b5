/** Trace playback: transport controls, canvas scene, inspection panel.
 *
 * An animation-frame loop feeds wall time into the Player, which advances
 * over buffered events only — network fetches never block the frame. The
 * slider and jump field land exactly via the snapshot endpoint.
 */

import { StudioApi } from "../api";
import { agentPanel, clockLabel, itemPanel } from "../panel";
import { Player, SPEEDS } from "../player";
import { drawScene, fitViewport, playbackScene, tileAtPoint } from "../render";
import type { MapDocument } from "../types";
import { clear, el } from "./dom";

export async function mountPlayer(
  root: HTMLElement,
  api: StudioApi,
  traceId: string,
): Promise<() => void> {
  const detail = await api.traceHeader(traceId);
  const doc: MapDocument = await api.getMap(detail.header.map_id);
  const player = new Player(api, traceId, detail.final_tick);

  let selectedId: string | null = null;
  let dragging = false;

  const canvas = el("canvas");
  const stage = el("div", { class: "stage" }, canvas);
  const toolbar = el("div", { class: "toolbar" });
  const sidebar = el("div", { class: "sidebar" });
  const inspector = el("div", { class: "inspector" });
  const bench = el("div", { class: "workbench" }, toolbar, sidebar, stage, inspector);
  clear(root);
  root.append(bench);

  // --- transport ---------------------------------------------------------------

  const playButton = el("button", {
    class: "primary",
    text: "▶",
    onclick: () => {
      if (player.playing) player.pause();
      else player.play();
      renderTransport();
    },
  });
  const speedSelect = el(
    "select",
    {
      title: "playback speed",
      onchange: (ev) => player.setSpeed(Number((ev.target as HTMLSelectElement).value)),
    },
    ...SPEEDS.map((speed) =>
      el("option", { value: String(speed), selected: speed === 1, text: `${speed}×` }),
    ),
  );
  const slider = el("input", {
    type: "range",
    min: "0",
    max: String(detail.final_tick),
    value: "0",
  });
  slider.addEventListener("input", () => {
    dragging = true;
    readout.textContent = tickText(Number(slider.value));
  });
  slider.addEventListener("change", () => {
    dragging = false;
    void player.jump(Number(slider.value));
  });
  const jumpField = el("input", {
    type: "number",
    min: "0",
    max: String(detail.final_tick),
    title: "jump to tick",
  });
  jumpField.addEventListener("change", () => {
    void player.jump(Number((jumpField as HTMLInputElement).value));
  });
  const readout = el("span", { class: "tick-readout" });

  function tickText(tick: number): string {
    const clock = clockLabel(detail.header.start_time, detail.header.minutes_per_tick, tick);
    return `tick ${tick} / ${detail.final_tick} · ${clock}`;
  }

  function renderTransport(): void {
    playButton.textContent = player.playing ? "⏸" : "▶";
  }

  toolbar.append(
    el("span", { class: "muted", text: `${traceId} on ${detail.header.map_id}` }),
    playButton,
    speedSelect,
    el("div", { class: "transport" }, slider),
    jumpField,
    readout,
  );

  // --- sidebar: run facts --------------------------------------------------------

  function renderSidebar(): void {
    clear(sidebar);
    sidebar.append(el("h3", { text: "run" }));
    const scenarioName = detail.header.scenario["name"];
    const rows: [string, string][] = [
      ["scenario", typeof scenarioName === "string" ? scenarioName : "—"],
      ["variant", detail.header.variant],
      ["seed", String(detail.header.seed)],
      ["backend", detail.header.backend_kind],
      ["events", String(detail.event_count)],
      ["ticks", String(detail.final_tick)],
    ];
    for (const [key, value] of rows) {
      sidebar.append(el("div", { class: "kv" }, el("b", { text: key }), value));
    }
    sidebar.append(el("h3", { text: "agents" }));
    const list = el("ul", { class: "entity-list" });
    for (const agentId of [...detail.header.agents].sort()) {
      const profile = doc.agents.find((ag) => ag.id === agentId);
      list.append(
        el(
          "li",
          {
            class: selectedId === agentId ? "selected" : "",
            onclick: () => {
              selectedId = selectedId === agentId ? null : agentId;
              renderSidebar();
              renderInspector();
            },
          },
          profile?.name ?? agentId,
        ),
      );
    }
    sidebar.append(list);
    if (player.lastError !== null) {
      sidebar.append(el("p", { class: "status-line error", text: player.lastError }));
    }
  }

  // --- inspector -----------------------------------------------------------------

  function renderInspector(): void {
    clear(inspector);
    const snapshot = player.snapshot();
    if (snapshot === null || selectedId === null) {
      inspector.append(
        el("h3", { text: "inspector" }),
        el("p", { class: "muted", text: "Click an agent or item on the map." }),
      );
      return;
    }
    const asAgent = agentPanel(doc, snapshot, selectedId);
    if (asAgent !== null) {
      inspector.append(el("h3", { text: asAgent.name }));
      inspector.append(
        el("div", { class: "kv" }, el("b", { text: "status" }), asAgent.status),
        el("div", { class: "kv" }, el("b", { text: "doing" }), asAgent.currentAction ?? "—"),
        el("div", { class: "kv" }, el("b", { text: "at" }), `(${asAgent.pos[0]}, ${asAgent.pos[1]})`),
      );
      inspector.append(el("h3", { text: "bag" }));
      if (asAgent.bag.length === 0) {
        inspector.append(el("p", { class: "muted", text: "(empty)" }));
      } else {
        const bagList = el("ul", { class: "entity-list" });
        for (const entry of asAgent.bag) {
          bagList.append(el("li", {}, `${entry.typeName} (${entry.id})`));
        }
        inspector.append(bagList);
      }
      if (asAgent.dialogue !== null) {
        inspector.append(
          el("h3", { text: "talking" }),
          el("div", { class: "kv" }, el("b", { text: "with" }), asAgent.dialogue.withNames.join(", ")),
          el("div", { class: "kv" }, el("b", { text: "topic" }), asAgent.dialogue.topic),
          el("div", { class: "kv" }, el("b", { text: "lines" }), String(asAgent.dialogue.utterances)),
        );
      }
      return;
    }
    const asItem = itemPanel(doc, snapshot.items, selectedId);
    if (asItem !== null) {
      inspector.append(el("h3", { text: asItem.typeName }));
      inspector.append(
        el("div", { class: "kv" }, el("b", { text: "id" }), asItem.id),
        el("div", { class: "kv" }, el("b", { text: "where" }), asItem.location),
        el(
          "div",
          { class: "kv" },
          el("b", { text: "holds" }),
          asItem.contents.length === 0 ? "(empty)" : asItem.contents.map((c) => c.typeName).join(", "),
        ),
      );
      const props = Object.entries(asItem.properties);
      if (props.length > 0) {
        inspector.append(el("h3", { text: "properties" }));
        for (const [key, value] of props) {
          inspector.append(el("div", { class: "kv" }, el("b", { text: key }), value));
        }
      }
    }
  }

  // --- canvas --------------------------------------------------------------------

  function redraw(): void {
    const rect = stage.getBoundingClientRect();
    if (canvas.width !== rect.width || canvas.height !== rect.height) {
      canvas.width = rect.width;
      canvas.height = rect.height;
    }
    const ctx = canvas.getContext("2d");
    const snapshot = player.snapshot();
    if (ctx === null || snapshot === null) return;
    const scene = playbackScene(doc, snapshot, selectedId);
    drawScene(ctx, scene, fitViewport(doc.width, doc.height, canvas.width, canvas.height));
  }

  canvas.addEventListener("pointerdown", (ev) => {
    const snapshot = player.snapshot();
    if (snapshot === null) return;
    const rect = canvas.getBoundingClientRect();
    const viewport = fitViewport(doc.width, doc.height, canvas.width, canvas.height);
    const tile = tileAtPoint(viewport, doc.width, doc.height, ev.clientX - rect.left, ev.clientY - rect.top);
    if (tile === null) return;
    const scene = playbackScene(doc, snapshot, selectedId);
    const hit = [...scene.glyphs].reverse().find((g) => g.x === tile.x && g.y === tile.y);
    selectedId = hit?.id ?? null;
    renderSidebar();
    renderInspector();
  });

  // --- frame loop ------------------------------------------------------------------

  let rafId = 0;
  let lastFrame = performance.now();
  let lastDrawnTick = -1;
  let lastInspectedTick = -1;

  function frame(now: number): void {
    const dt = Math.min(0.25, (now - lastFrame) / 1000);
    lastFrame = now;
    player.elapse(dt);
    const tick = player.tick;
    if (tick !== null && tick !== lastDrawnTick) {
      lastDrawnTick = tick;
      if (!dragging) {
        slider.value = String(tick);
        readout.textContent = tickText(tick);
      }
      redraw();
      if (tick !== lastInspectedTick && selectedId !== null) {
        lastInspectedTick = tick;
        renderInspector();
      }
      renderTransport();
    }
    rafId = requestAnimationFrame(frame);
  }

  const unsubscribe = player.subscribe(() => {
    const tick = player.tick;
    if (tick !== null && !dragging) {
      slider.value = String(tick);
      readout.textContent = tickText(tick);
    }
    redraw();
    renderInspector();
    renderSidebar();
  });

  renderSidebar();
  renderInspector();
  renderTransport();
  await player.jump(0);
  rafId = requestAnimationFrame(frame);

  return () => {
    cancelAnimationFrame(rafId);
    unsubscribe();
    player.pause();
  };
}
