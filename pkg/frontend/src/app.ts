/** Page wiring: part tabs + scatter on the left, pick panel and ranked
 * results on the right.  Pick state lives in the URL, so reloading or
 * sharing the link reproduces the query.
 */

import { ApiClient } from "./api.js";
import { renderResults } from "./results.js";
import { renderScatter } from "./scatter.js";
import { MAX_WEIGHT, PickState, sourceToken } from "./state.js";
import type { Meta, ScatterPoint } from "./types.js";

export async function startApp(root: HTMLElement, api = new ApiClient()): Promise<void> {
  const meta = await api.meta();
  root.innerHTML = `
    <header><h1>partblend</h1>
      <span class="meta">${meta.shape_count} shapes · dim ${meta.dim}</span>
    </header>
    <main>
      <section class="left">
        <nav id="part-tabs"></nav>
        <div id="scatter"></div>
        <div id="hover-thumb"></div>
      </section>
      <section class="right">
        <div id="pick-panel"></div>
        <button id="run" disabled>Run query</button>
        <div id="status"></div>
        <div id="results"></div>
      </section>
    </main>`;

  const state = PickState.fromUrlSearch(window.location.search, meta.parts);
  let activePart = meta.parts[0];
  const scatterCache = new Map<string, ScatterPoint[]>();

  const tabs = root.querySelector("#part-tabs") as HTMLElement;
  const scatterEl = root.querySelector("#scatter") as HTMLElement;
  const hoverEl = root.querySelector("#hover-thumb") as HTMLElement;
  const panelEl = root.querySelector("#pick-panel") as HTMLElement;
  const runBtn = root.querySelector("#run") as HTMLButtonElement;
  const statusEl = root.querySelector("#status") as HTMLElement;
  const resultsEl = root.querySelector("#results") as HTMLElement;

  function syncUrl(): void {
    window.history.replaceState(null, "", state.toUrlSearch());
  }

  function renderTabs(): void {
    tabs.textContent = "";
    for (const part of meta.parts) {
      const btn = document.createElement("button");
      btn.textContent = part;
      btn.className = part === activePart ? "tab active" : "tab";
      btn.addEventListener("click", () => {
        activePart = part;
        renderTabs();
        void showScatter();
      });
      tabs.appendChild(btn);
    }
  }

  async function showScatter(): Promise<void> {
    if (!scatterCache.has(activePart)) {
      scatterCache.set(activePart, await api.manifold(activePart));
    }
    const pick = state.get(activePart);
    const selected = pick?.source.kind === "shape" ? pick.source.id : null;
    renderScatter(
      scatterEl,
      scatterCache.get(activePart)!,
      {
        onSelect: (p) => {
          state.setSource(activePart, { kind: "shape", id: p.id });
          refresh();
        },
        onHover: (p) => {
          hoverEl.textContent = "";
          if (p) {
            const img = document.createElement("img");
            img.src = api.silhouetteUrl(p.id, 0);
            img.alt = p.name;
            hoverEl.appendChild(img);
            hoverEl.append(` ${p.name}`);
          }
        },
      },
      selected,
    );
  }

  function renderPanel(): void {
    panelEl.textContent = "";
    for (const part of meta.parts) {
      const pick = state.get(part);
      const row = document.createElement("div");
      row.className = "pick-row";
      row.dataset.part = part;

      const name = document.createElement("span");
      name.className = "pick-part";
      name.textContent = part;

      const source = document.createElement("span");
      source.className = "pick-source";
      source.textContent = pick ? sourceToken(pick.source) : "—";

      const absent = document.createElement("button");
      absent.className = "absent-toggle";
      absent.textContent = "absent";
      absent.classList.toggle("on", pick?.source.kind === "absent");
      absent.addEventListener("click", () => {
        if (pick?.source.kind === "absent") state.clear(part);
        else state.setSource(part, { kind: "absent" });
        refresh();
      });

      const weight = document.createElement("input");
      weight.type = "range";
      weight.min = "0.1";
      weight.max = String(MAX_WEIGHT);
      weight.step = "0.1";
      weight.value = String(pick?.weight ?? 1);
      weight.disabled = !pick;
      weight.addEventListener("input", () => {
        state.setWeight(part, Number(weight.value));
        syncUrl();
      });

      const clear = document.createElement("button");
      clear.textContent = "clear";
      clear.disabled = !pick;
      clear.addEventListener("click", () => {
        state.clear(part);
        refresh();
      });

      row.append(name, source, absent, weight, clear);
      panelEl.appendChild(row);
    }
    runBtn.disabled = !state.canRun();
  }

  async function runQuery(): Promise<void> {
    statusEl.textContent = "querying…";
    try {
      const response = await api.query(state.toQueryJson());
      statusEl.textContent = "";
      renderResults(resultsEl, response.results, meta.parts, {
        onRefine: (shapeId, part) => {
          state.setSource(part, { kind: "shape", id: shapeId });
          refresh();
        },
        thumbnailUrl: (shapeId) => api.silhouetteUrl(shapeId, 0),
      });
    } catch (err) {
      statusEl.textContent = `error: ${(err as Error).message}`;
    }
  }

  function refresh(): void {
    renderPanel();
    syncUrl();
    void showScatter();
  }

  runBtn.addEventListener("click", () => void runQuery());
  renderTabs();
  refresh();
  if (state.canRun()) void runQuery(); // deep link: rerun the encoded query
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void startApp(document.getElementById("app")!);
}
