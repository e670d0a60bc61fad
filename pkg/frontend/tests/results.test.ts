import { describe, expect, it, vi } from "vitest";

import { renderResults } from "../src/results.js";
import { PARTS, RECORDED_RESPONSE } from "./fixtures.js";

function render(results = RECORDED_RESPONSE.results, onRefine = vi.fn()) {
  const container = document.createElement("div");
  renderResults(container, results, PARTS, { onRefine });
  return { container, onRefine };
}

describe("ranked results view", () => {
  it("renders results in ascending total cost order", () => {
    const shuffled = [...RECORDED_RESPONSE.results].reverse();
    const { container } = render(shuffled);
    const costs = [...container.querySelectorAll<HTMLElement>(".result-card")].map(
      (card) => Number(card.dataset.totalCost),
    );
    expect(costs).toEqual([...costs].sort((a, b) => a - b));
    expect(costs).toEqual(RECORDED_RESPONSE.results.map((r) => r.total_cost));
  });

  it("per-part cost bars carry costs that sum to the total", () => {
    const { container } = render();
    for (const card of container.querySelectorAll<HTMLElement>(".result-card")) {
      const total = Number(card.dataset.totalCost);
      const parts = [...card.querySelectorAll<HTMLElement>(".cost-bar")].map(
        (bar) => Number(bar.dataset.cost),
      );
      const sum = parts.reduce((a, b) => a + b, 0);
      expect(Math.abs(sum - total)).toBeLessThanOrEqual(1e-12);
    }
  });

  it("bar widths are proportional to cost", () => {
    const { container } = render();
    const bars = [...container.querySelectorAll<HTMLElement>(".cost-bar")];
    const maxCost = Math.max(
      ...RECORDED_RESPONSE.results.map((r) => r.total_cost),
    );
    for (const bar of bars) {
      const cost = Number(bar.dataset.cost);
      const width = Number.parseFloat(bar.style.width);
      expect(width).toBeCloseTo((100 * cost) / maxCost, 6);
    }
  });

  it("clicking a refine button loads the result as a new pick source", () => {
    const { container, onRefine } = render();
    const firstCard = container.querySelector<HTMLElement>(".result-card")!;
    const legsBtn = firstCard.querySelector<HTMLButtonElement>(
      '.refine-btn[data-part="legs"]',
    )!;
    legsBtn.click();
    expect(onRefine).toHaveBeenCalledWith(5, "legs");
  });

  it("shows rank, name and total cost in the title", () => {
    const { container } = render();
    const titles = [...container.querySelectorAll(".result-title")].map(
      (el) => el.textContent,
    );
    expect(titles[0]).toContain("#1 grid_1_2");
    expect(titles[1]).toContain("#2 grid_2_2");
    expect(titles[0]).toContain("0.0000");
  });

  it("re-rendering replaces previous results", () => {
    const container = document.createElement("div");
    renderResults(container, RECORDED_RESPONSE.results, PARTS, { onRefine: vi.fn() });
    renderResults(container, RECORDED_RESPONSE.results.slice(0, 1), PARTS, {
      onRefine: vi.fn(),
    });
    expect(container.querySelectorAll(".result-card")).toHaveLength(1);
  });
});
