/** Map editor: palette, canvas painting, inspector, inline validation, save.
 *
 * Edits go through the EditorStore (undoable); brush strokes commit as one
 * operation on pointer-up so undo removes a stroke, not a tile. Validation
 * reruns on every revision and renders inline; save is disabled while local
 * violations exist or another save is in flight, and a server rejection's
 * report is rendered in the same panel.
 */

import { ApiError, SaveRejected, StudioApi } from "../api";
import { EditorStore } from "../editor";
import { blankMap, fromDocument, tileKey } from "../mapmodel";
import { documentPlacements, itemPanel } from "../panel";
import { drawScene, editorScene, fitViewport, tileAtPoint } from "../render";
import type { Placement, ValidationReport, Violation } from "../types";
import { AREA_KINDS } from "../types";
import { clear, el } from "./dom";

type Tool =
  | { kind: "select" }
  | { kind: "walkable"; value: boolean }
  | { kind: "area"; mode: "add" | "remove" }
  | { kind: "item" }
  | { kind: "agent-start" };

type Selection =
  | { type: "area"; id: string }
  | { type: "itemType"; id: string }
  | { type: "item"; id: string }
  | { type: "agent"; id: string }
  | null;

export async function mountEditor(
  root: HTMLElement,
  api: StudioApi,
  mapId: string,
  fresh: boolean,
): Promise<() => void> {
  const store = fresh
    ? new EditorStore(blankMap(mapId, mapId, 24, 18))
    : new EditorStore(fromDocument(await api.getMap(mapId)));

  let tool: Tool = { kind: "select" };
  let selection: Selection = null;
  let saving = false;
  let statusText = fresh ? "new map (not saved yet)" : "loaded";
  let statusKind: "" | "ok" | "error" = "";
  let serverReport: ValidationReport | null = null;
  let stroke: { tiles: Map<string, { x: number; y: number }> } | null = null;

  const canvas = el("canvas");
  const stage = el("div", { class: "stage" }, canvas);
  const toolbar = el("div", { class: "toolbar" });
  const sidebar = el("div", { class: "sidebar" });
  const inspector = el("div", { class: "inspector" });
  const bench = el("div", { class: "workbench" }, toolbar, sidebar, stage, inspector);
  clear(root);
  root.append(bench);

  // --- canvas ----------------------------------------------------------------

  function redraw(): void {
    const rect = stage.getBoundingClientRect();
    if (canvas.width !== rect.width || canvas.height !== rect.height) {
      canvas.width = rect.width;
      canvas.height = rect.height;
    }
    const ctx = canvas.getContext("2d");
    if (ctx === null) return;
    const map = store.current;
    const scene = editorScene(map, selection?.type === "area" ? selection.id : null);
    if (stroke !== null) {
      const fill =
        tool.kind === "walkable"
          ? tool.value
            ? "rgba(124, 182, 106, 0.5)"
            : "rgba(224, 108, 90, 0.5)"
          : "rgba(224, 164, 60, 0.5)";
      for (const { x, y } of stroke.tiles.values()) scene.tints.push({ x, y, fill });
    }
    for (const glyph of scene.glyphs) {
      glyph.selected =
        (selection?.type === "agent" && glyph.kind === "agent" && glyph.id === selection.id) ||
        (selection?.type === "item" && glyph.kind === "item" && glyph.id === selection.id);
    }
    drawScene(ctx, scene, fitViewport(map.width, map.height, canvas.width, canvas.height));
  }

  function tileUnder(ev: PointerEvent): { x: number; y: number } | null {
    const rect = canvas.getBoundingClientRect();
    const map = store.current;
    const viewport = fitViewport(map.width, map.height, canvas.width, canvas.height);
    return tileAtPoint(viewport, map.width, map.height, ev.clientX - rect.left, ev.clientY - rect.top);
  }

  function nextId(prefix: string, taken: Iterable<string>): string {
    const used = new Set(taken);
    let n = 1;
    while (used.has(`${prefix}_${n}`)) n += 1;
    return `${prefix}_${n}`;
  }

  function onPointerDown(ev: PointerEvent): void {
    const tile = tileUnder(ev);
    if (tile === null) return;
    const map = store.current;
    if (tool.kind === "walkable" || tool.kind === "area") {
      if (tool.kind === "area" && selection?.type !== "area") {
        setStatus("pick an area in the sidebar first", "error");
        return;
      }
      stroke = { tiles: new Map([[tileKey(tile.x, tile.y), tile]]) };
      canvas.setPointerCapture(ev.pointerId);
      redraw();
      return;
    }
    if (tool.kind === "item") {
      if (selection?.type !== "itemType") {
        setStatus("pick an item type in the sidebar first", "error");
        return;
      }
      const id = nextId("item", map.items.keys());
      store.placeItem(id, selection.id, { kind: "tile", x: tile.x, y: tile.y });
      return;
    }
    if (tool.kind === "agent-start") {
      if (selection?.type !== "agent") {
        setStatus("pick an agent in the sidebar first", "error");
        return;
      }
      const agent = map.agents.get(selection.id);
      if (agent !== undefined) {
        store.upsertAgent({ ...agent, start_pos: { x: tile.x, y: tile.y } });
      }
      return;
    }
    // Select tool: topmost glyph wins (agents draw above items).
    const key = tileKey(tile.x, tile.y);
    const agentHit = [...map.agents.values()].find(
      (ag) => tileKey(ag.start_pos.x, ag.start_pos.y) === key,
    );
    if (agentHit !== undefined) {
      selection = { type: "agent", id: agentHit.id };
      renderAll();
      return;
    }
    const itemHit = [...map.items.values()].find(
      (it) => it.placement.kind === "tile" && tileKey(it.placement.x, it.placement.y) === key,
    );
    if (itemHit !== undefined) {
      selection = { type: "item", id: itemHit.id };
      renderAll();
      return;
    }
    selection = null;
    renderAll();
  }

  function onPointerMove(ev: PointerEvent): void {
    if (stroke === null) return;
    const tile = tileUnder(ev);
    if (tile === null) return;
    const key = tileKey(tile.x, tile.y);
    if (!stroke.tiles.has(key)) {
      stroke.tiles.set(key, tile);
      redraw();
    }
  }

  function onPointerUp(): void {
    if (stroke === null) return;
    const tiles = [...stroke.tiles.values()];
    stroke = null;
    if (tool.kind === "walkable") {
      store.paintWalkable(tiles, tool.value);
    } else if (tool.kind === "area" && selection?.type === "area") {
      store.paintArea(selection.id, tiles, tool.mode);
    }
    redraw();
  }

  canvas.addEventListener("pointerdown", onPointerDown);
  canvas.addEventListener("pointermove", onPointerMove);
  canvas.addEventListener("pointerup", onPointerUp);

  // --- toolbar ---------------------------------------------------------------

  function setStatus(text: string, kind: "" | "ok" | "error" = ""): void {
    statusText = text;
    statusKind = kind;
    renderToolbar();
  }

  async function save(): Promise<void> {
    if (saving) return;
    saving = true;
    serverReport = null;
    setStatus("saving…");
    try {
      const saved = await api.saveMap(mapId, store.document());
      setStatus(`saved (${saved.map_hash.slice(0, 10)}…)`, "ok");
    } catch (err) {
      if (err instanceof SaveRejected) {
        serverReport = err.report;
        setStatus("rejected by server — see violations", "error");
      } else if (err instanceof ApiError) {
        setStatus(err.message, "error");
      } else {
        setStatus(String(err), "error");
      }
    } finally {
      saving = false;
      renderAll();
    }
  }

  function renderToolbar(): void {
    const report = store.validate();
    clear(toolbar);
    toolbar.append(
      el("input", {
        type: "text",
        value: store.current.name,
        title: "map name",
        onchange: (ev) => store.rename((ev.target as HTMLInputElement).value),
      }),
      el("span", { class: "muted", text: `${store.current.width}×${store.current.height} · ${mapId}` }),
      el("button", {
        text: "undo",
        disabled: !store.canUndo,
        onclick: () => store.undo(),
      }),
      el("button", {
        text: "redo",
        disabled: !store.canRedo,
        onclick: () => store.redo(),
      }),
      el("button", {
        class: "primary",
        text: saving ? "saving…" : "save",
        disabled: saving || !report.ok,
        title: report.ok ? "PUT the map to the backend" : "fix the listed violations first",
        onclick: () => void save(),
      }),
      el("span", { class: `status-line ${statusKind}`, text: statusText }),
    );
  }

  // --- sidebar -----------------------------------------------------------------

  function toolButton(label: string, active: boolean, onClick: () => void): HTMLButtonElement {
    return el("button", { class: active ? "active" : "", text: label, onclick: onClick });
  }

  function setTool(next: Tool): void {
    tool = next;
    renderAll();
  }

  function renderSidebar(): void {
    const map = store.current;
    clear(sidebar);

    sidebar.append(el("h3", { text: "tools" }));
    const tools = el("div", { class: "tool-grid" });
    tools.append(
      toolButton("select / inspect", tool.kind === "select", () => setTool({ kind: "select" })),
      toolButton(
        "paint walkable",
        tool.kind === "walkable" && tool.value,
        () => setTool({ kind: "walkable", value: true }),
      ),
      toolButton(
        "paint blocked",
        tool.kind === "walkable" && !tool.value,
        () => setTool({ kind: "walkable", value: false }),
      ),
      toolButton(
        "area: add tiles",
        tool.kind === "area" && tool.mode === "add",
        () => setTool({ kind: "area", mode: "add" }),
      ),
      toolButton(
        "area: remove tiles",
        tool.kind === "area" && tool.mode === "remove",
        () => setTool({ kind: "area", mode: "remove" }),
      ),
      toolButton("place item", tool.kind === "item", () => setTool({ kind: "item" })),
      toolButton("move agent start", tool.kind === "agent-start", () =>
        setTool({ kind: "agent-start" }),
      ),
    );
    sidebar.append(tools);

    const section = <T extends { id: string }>(
      title: string,
      entries: T[],
      selType: Exclude<Selection, null>["type"],
      label: (entry: T) => string,
      onAdd: () => void,
    ) => {
      sidebar.append(
        el(
          "h3",
          {},
          title + " ",
          el("button", { text: "+", title: `add ${title.slice(0, -1)}`, onclick: onAdd }),
        ),
      );
      const list = el("ul", { class: "entity-list" });
      for (const entry of entries.sort((a, b) => (a.id < b.id ? -1 : 1))) {
        const selected = selection?.type === selType && selection.id === entry.id;
        list.append(
          el(
            "li",
            {
              class: selected ? "selected" : "",
              onclick: () => {
                selection = { type: selType, id: entry.id } as Selection;
                renderAll();
              },
            },
            label(entry),
          ),
        );
      }
      sidebar.append(list);
    };

    section(
      "areas",
      [...map.areas.values()],
      "area",
      (a) => `${a.name} (${a.kind}${a.parent !== null ? ` ⊂ ${a.parent}` : ""})`,
      () => {
        const id = window.prompt("area id (letters, digits, underscores):");
        if (id === null || id === "") return;
        if (store.addArea(id, id, "room")) selection = { type: "area", id };
        renderAll();
      },
    );
    section(
      "item types",
      [...map.itemTypes.values()],
      "itemType",
      (t) => `${t.name}${t.container_capacity > 0 ? ` [holds ${t.container_capacity}]` : ""}`,
      () => {
        const id = window.prompt("item type id:");
        if (id === null || id === "") return;
        if (
          store.upsertItemType({
            id,
            name: id.replaceAll("_", " "),
            properties: {},
            portable: true,
            container_capacity: 0,
          })
        ) {
          selection = { type: "itemType", id };
        }
        renderAll();
      },
    );
    section(
      "items",
      [...map.items.values()],
      "item",
      (it) => `${it.id} : ${map.itemTypes.get(it.type_id)?.name ?? it.type_id}`,
      () => setTool({ kind: "item" }),
    );
    section(
      "agents",
      [...map.agents.values()],
      "agent",
      (ag) => `${ag.name} @ (${ag.start_pos.x}, ${ag.start_pos.y})`,
      () => {
        const id = window.prompt("agent id:");
        if (id === null || id === "") return;
        const firstArea = [...map.areas.keys()].sort()[0] ?? "";
        if (
          store.upsertAgent({
            id,
            name: id.replaceAll("_", " "),
            personality: "",
            core_traits: [],
            lifestyle: "",
            home_area: firstArea,
            start_pos: firstWalkable(),
            movement_speed: 4.0,
          })
        ) {
          selection = { type: "agent", id };
        }
        renderAll();
      },
    );

    sidebar.append(el("h3", { text: "validation" }));
    const local = store.validate();
    const problems: { source: string; violation: Violation }[] = [
      ...local.violations.map((violation) => ({ source: "local", violation })),
      ...(serverReport?.violations ?? []).map((violation) => ({ source: "server", violation })),
    ];
    if (problems.length === 0) {
      sidebar.append(el("div", { class: "all-clear", text: "✓ no violations" }));
    } else {
      const list = el("ul", { class: "violations" });
      for (const { source, violation } of problems) {
        list.append(
          el(
            "li",
            {},
            el("code", { text: violation.code }),
            ` ${violation.subject}: ${violation.message}`,
            source === "server" ? el("span", { class: "muted", text: " (server)" }) : null,
          ),
        );
      }
      sidebar.append(list);
    }
  }

  function firstWalkable(): { x: number; y: number } {
    const map = store.current;
    for (let y = 0; y < map.height; y += 1) {
      for (let x = 0; x < map.width; x += 1) {
        if (map.walkable[y]?.[x]) return { x, y };
      }
    }
    return { x: 0, y: 0 };
  }

  // --- inspector ---------------------------------------------------------------

  function labeled(label: string, control: HTMLElement): HTMLElement[] {
    return [el("span", { class: "muted", text: label }), control];
  }

  function renderInspector(): void {
    const map = store.current;
    clear(inspector);
    if (selection === null) {
      inspector.append(
        el("h3", { text: "inspector" }),
        el("p", { class: "muted", text: "Select an area, item type, item, or agent." }),
      );
      return;
    }

    if (selection.type === "area") {
      const area = map.areas.get(selection.id);
      if (area === undefined) return void (selection = null);
      inspector.append(el("h3", { text: `area ${area.id}` }));
      const grid = el("div", { class: "form-grid" });
      grid.append(
        ...labeled(
          "name",
          el("input", {
            type: "text",
            value: area.name,
            onchange: (ev) => store.setAreaMeta(area.id, { name: (ev.target as HTMLInputElement).value }),
          }),
        ),
        ...labeled(
          "kind",
          el(
            "select",
            {
              onchange: (ev) => store.setAreaMeta(area.id, { kind: (ev.target as HTMLSelectElement).value }),
            },
            ...AREA_KINDS.map((kind) =>
              el("option", { value: kind, selected: kind === area.kind, text: kind }),
            ),
          ),
        ),
        ...labeled(
          "parent",
          el(
            "select",
            {
              onchange: (ev) => {
                const value = (ev.target as HTMLSelectElement).value;
                store.setAreaMeta(area.id, { parent: value === "" ? null : value });
              },
            },
            el("option", { value: "", selected: area.parent === null, text: "(none)" }),
            ...[...map.areas.keys()]
              .filter((id) => id !== area.id)
              .sort()
              .map((id) => el("option", { value: id, selected: id === area.parent, text: id })),
          ),
        ),
      );
      inspector.append(
        grid,
        el("p", { class: "muted", text: `${area.tiles.size} tiles — paint with the area tools.` }),
        el("button", {
          text: "delete area",
          onclick: () => {
            store.removeArea(area.id);
            selection = null;
            renderAll();
          },
        }),
      );
      return;
    }

    if (selection.type === "itemType") {
      const type = map.itemTypes.get(selection.id);
      if (type === undefined) return void (selection = null);
      inspector.append(el("h3", { text: `item type ${type.id}` }));
      const grid = el("div", { class: "form-grid" });
      grid.append(
        ...labeled(
          "name",
          el("input", {
            type: "text",
            value: type.name,
            onchange: (ev) => store.upsertItemType({ ...type, name: (ev.target as HTMLInputElement).value }),
          }),
        ),
        ...labeled(
          "portable",
          el("input", {
            type: "checkbox",
            checked: type.portable,
            onchange: (ev) =>
              store.upsertItemType({ ...type, portable: (ev.target as HTMLInputElement).checked }),
          }),
        ),
        ...labeled(
          "capacity",
          el("input", {
            type: "number",
            value: String(type.container_capacity),
            onchange: (ev) =>
              store.upsertItemType({
                ...type,
                container_capacity: Number((ev.target as HTMLInputElement).value),
              }),
          }),
        ),
      );
      inspector.append(grid, el("h3", { text: "properties" }));
      const props = el("div", { class: "form-grid" });
      for (const [key, value] of Object.entries(type.properties).sort()) {
        props.append(
          el("span", { class: "muted", text: key }),
          el(
            "span",
            {},
            el("input", {
              type: "text",
              value,
              onchange: (ev) =>
                store.setTypeProperty(type.id, key, (ev.target as HTMLInputElement).value),
            }),
            el("button", { text: "×", title: "remove", onclick: () => store.removeTypeProperty(type.id, key) }),
          ),
        );
      }
      inspector.append(
        props,
        el("button", {
          text: "+ property",
          onclick: () => {
            const key = window.prompt("property key:");
            if (key === null || key === "") return;
            store.setTypeProperty(type.id, key, "");
          },
        }),
        el("button", {
          text: "delete type",
          onclick: () => {
            store.removeItemType(type.id);
            selection = null;
            renderAll();
          },
        }),
      );
      return;
    }

    if (selection.type === "item") {
      const item = map.items.get(selection.id);
      if (item === undefined) return void (selection = null);
      const doc = store.document();
      const model = itemPanel(doc, documentPlacements(doc), item.id);
      inspector.append(el("h3", { text: `item ${item.id}` }));
      if (model !== null) {
        inspector.append(
          el("div", { class: "kv" }, el("b", { text: "type" }), model.typeName),
          el("div", { class: "kv" }, el("b", { text: "where" }), model.location),
          el(
            "div",
            { class: "kv" },
            el("b", { text: "holds" }),
            model.contents.length === 0
              ? "(empty)"
              : model.contents.map((entry) => entry.typeName).join(", "),
          ),
        );
      }
      const containers = [...map.items.values()]
        .filter((other) => {
          if (other.id === item.id) return false;
          const t = map.itemTypes.get(other.type_id);
          return t !== undefined && t.container_capacity > 0;
        })
        .map((other) => other.id)
        .sort();
      const moveRow = el("div", { class: "form-grid" });
      moveRow.append(
        ...labeled(
          "put into",
          el(
            "select",
            {
              onchange: (ev) => {
                const value = (ev.target as HTMLSelectElement).value;
                if (value === "") return;
                const placement: Placement =
                  value === "@ground"
                    ? { kind: "tile", ...firstWalkable() }
                    : { kind: "container", item_id: value };
                store.moveItem(item.id, placement);
              },
            },
            el("option", { value: "", selected: true, text: "choose…" }),
            el("option", { value: "@ground", text: "(ground, first walkable tile)" }),
            ...containers.map((id) => el("option", { value: id, text: id })),
          ),
        ),
      );
      inspector.append(
        moveRow,
        el("p", { class: "muted", text: "Drop it elsewhere with the place-item tool after deleting, or move via the list above." }),
        el("button", {
          text: "delete item",
          onclick: () => {
            store.removeItem(item.id);
            selection = null;
            renderAll();
          },
        }),
      );
      return;
    }

    const agent = map.agents.get(selection.id);
    if (agent === undefined) return void (selection = null);
    inspector.append(el("h3", { text: `agent ${agent.id}` }));
    const grid = el("div", { class: "form-grid" });
    grid.append(
      ...labeled(
        "name",
        el("input", {
          type: "text",
          value: agent.name,
          onchange: (ev) => store.upsertAgent({ ...agent, name: (ev.target as HTMLInputElement).value }),
        }),
      ),
      ...labeled(
        "personality",
        el("input", {
          type: "text",
          value: agent.personality,
          onchange: (ev) =>
            store.upsertAgent({ ...agent, personality: (ev.target as HTMLInputElement).value }),
        }),
      ),
      ...labeled(
        "traits",
        el("input", {
          type: "text",
          value: agent.core_traits.join(", "),
          title: "comma-separated",
          onchange: (ev) =>
            store.upsertAgent({
              ...agent,
              core_traits: (ev.target as HTMLInputElement).value
                .split(",")
                .map((s) => s.trim())
                .filter((s) => s !== ""),
            }),
        }),
      ),
      ...labeled(
        "lifestyle",
        el("input", {
          type: "text",
          value: agent.lifestyle,
          onchange: (ev) =>
            store.upsertAgent({ ...agent, lifestyle: (ev.target as HTMLInputElement).value }),
        }),
      ),
      ...labeled(
        "home area",
        el(
          "select",
          {
            onchange: (ev) =>
              store.upsertAgent({ ...agent, home_area: (ev.target as HTMLSelectElement).value }),
          },
          ...[...map.areas.keys()]
            .sort()
            .map((id) => el("option", { value: id, selected: id === agent.home_area, text: id })),
          map.areas.has(agent.home_area)
            ? null
            : el("option", { value: agent.home_area, selected: true, text: `${agent.home_area} (missing)` }),
        ),
      ),
      ...labeled(
        "speed",
        el("input", {
          type: "number",
          value: String(agent.movement_speed),
          onchange: (ev) =>
            store.upsertAgent({
              ...agent,
              movement_speed: Number((ev.target as HTMLInputElement).value),
            }),
        }),
      ),
    );
    inspector.append(
      grid,
      el("p", {
        class: "muted",
        text: `start (${agent.start_pos.x}, ${agent.start_pos.y}) — move it with the agent-start tool.`,
      }),
      el("button", {
        text: "delete agent",
        onclick: () => {
          store.removeAgent(agent.id);
          selection = null;
          renderAll();
        },
      }),
    );
  }

  function renderAll(): void {
    renderToolbar();
    renderSidebar();
    renderInspector();
    redraw();
  }

  const unsubscribe = store.subscribe(renderAll);
  renderAll();

  return () => {
    unsubscribe();
    canvas.removeEventListener("pointerdown", onPointerDown);
    canvas.removeEventListener("pointermove", onPointerMove);
    canvas.removeEventListener("pointerup", onPointerUp);
  };
}
