/** Ranked result gallery: total and per-part cost bars, click to refine. */

import type { RankedResult } from "./types.js";

export interface ResultsHandlers {
  /** Load this result as the pick source for the given part. */
  onRefine(shapeId: number, part: string): void;
  thumbnailUrl?(shapeId: number): string;
}

export function renderResults(
  container: HTMLElement,
  results: RankedResult[],
  parts: string[],
  handlers: ResultsHandlers,
): void {
  container.textContent = "";
  const sorted = [...results].sort((a, b) => a.total_cost - b.total_cost);
  const maxCost = Math.max(...sorted.map((r) => r.total_cost), 1e-12);

  sorted.forEach((r, rank) => {
    const card = document.createElement("div");
    card.className = "result-card";
    card.dataset.shapeId = String(r.shape_id);
    card.dataset.totalCost = String(r.total_cost);

    const title = document.createElement("div");
    title.className = "result-title";
    title.textContent = `#${rank + 1} ${r.name} — cost ${r.total_cost.toFixed(4)}`;
    card.appendChild(title);

    if (handlers.thumbnailUrl) {
      const img = document.createElement("img");
      img.className = "result-thumb";
      img.src = handlers.thumbnailUrl(r.shape_id);
      img.alt = r.name;
      card.appendChild(img);
    }

    const bars = document.createElement("div");
    bars.className = "cost-bars";
    for (const [part, cost] of Object.entries(r.per_part_costs)) {
      const row = document.createElement("div");
      row.className = "cost-row";
      const label = document.createElement("span");
      label.className = "cost-label";
      label.textContent = part;
      const bar = document.createElement("span");
      bar.className = "cost-bar";
      bar.dataset.part = part;
      bar.dataset.cost = String(cost);
      bar.style.width = `${(100 * cost) / maxCost}%`;
      row.append(label, bar);
      bars.appendChild(row);
    }
    card.appendChild(bars);

    const refine = document.createElement("div");
    refine.className = "refine-row";
    for (const part of parts) {
      const btn = document.createElement("button");
      btn.className = "refine-btn";
      btn.dataset.part = part;
      btn.textContent = `use ${part}`;
      btn.addEventListener("click", () => handlers.onRefine(r.shape_id, part));
      refine.appendChild(btn);
    }
    card.appendChild(refine);
    container.appendChild(card);
  });
}
