/** SVG scatterplot of one part manifold's server-side 2D projection. */

import type { ScatterPoint } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ScatterHandlers {
  onSelect(point: ScatterPoint): void;
  onHover?(point: ScatterPoint | null): void;
}

export function renderScatter(
  container: HTMLElement,
  points: ScatterPoint[],
  handlers: ScatterHandlers,
  selectedId: number | null = null,
  size = 420,
): SVGSVGElement {
  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "scatter");

  const pad = 18;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const span = Math.max(xMax - xMin, yMax - yMin) || 1;
  const scale = (size - 2 * pad) / span;
  const sx = (x: number) => pad + (x - xMin) * scale;
  const sy = (y: number) => size - pad - (y - yMin) * scale;

  for (const p of points) {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("cx", String(sx(p.x)));
    c.setAttribute("cy", String(sy(p.y)));
    c.setAttribute("r", p.id === selectedId ? "7" : "5");
    c.setAttribute("class", p.id === selectedId ? "pt selected" : "pt");
    c.dataset.shapeId = String(p.id);
    c.addEventListener("click", () => handlers.onSelect(p));
    if (handlers.onHover) {
      c.addEventListener("mouseenter", () => handlers.onHover!(p));
      c.addEventListener("mouseleave", () => handlers.onHover!(null));
    }
    svg.appendChild(c);
  }
  container.appendChild(svg);
  return svg;
}
