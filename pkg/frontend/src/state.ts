/** Pick state: at most one source per part, weights in (0, 10].
 *
 * The state is the single source of truth for the query body and is
 * round-trippable through the URL query string, so every query deep-links.
 */

import type { Pick, PickSource, QueryJson } from "./types.js";

export const MAX_WEIGHT = 10;

export function sourceToken(s: PickSource): string {
  switch (s.kind) {
    case "shape":
      return `shape:${s.id}`;
    case "ext":
      return `ext:${s.id}`;
    case "absent":
      return "absent";
    case "coords":
      return `coords:${s.values.join(",")}`;
  }
}

export function parseSourceToken(token: string): PickSource {
  if (token === "absent") return { kind: "absent" };
  if (token.startsWith("shape:")) {
    const id = Number(token.slice(6));
    if (!Number.isInteger(id) || id < 0) throw new Error(`bad shape id in ${token}`);
    return { kind: "shape", id };
  }
  if (token.startsWith("ext:")) return { kind: "ext", id: token.slice(4) };
  if (token.startsWith("coords:")) {
    const values = token.slice(7).split(",").map(Number);
    if (values.some((v) => !Number.isFinite(v))) throw new Error(`bad coords in ${token}`);
    return { kind: "coords", values };
  }
  throw new Error(`unknown pick source ${token}`);
}

export class PickState {
  readonly parts: string[];
  private picks = new Map<string, Pick>();
  k = 5;

  constructor(parts: string[]) {
    this.parts = [...parts];
  }

  get(part: string): Pick | undefined {
    return this.picks.get(part);
  }

  setSource(part: string, source: PickSource): void {
    if (!this.parts.includes(part)) throw new Error(`unknown part ${part}`);
    const prev = this.picks.get(part);
    this.picks.set(part, { source, weight: prev?.weight ?? 1 });
  }

  setWeight(part: string, weight: number): void {
    if (!(weight > 0 && weight <= MAX_WEIGHT)) {
      throw new Error(`weight must be in (0, ${MAX_WEIGHT}], got ${weight}`);
    }
    const pick = this.picks.get(part);
    if (pick) this.picks.set(part, { ...pick, weight });
  }

  clear(part: string): void {
    this.picks.delete(part);
  }

  clearAll(): void {
    this.picks.clear();
  }

  /** Query is runnable iff at least one part has a source. */
  canRun(): boolean {
    return this.picks.size > 0;
  }

  pickedParts(): string[] {
    return this.parts.filter((p) => this.picks.has(p));
  }

  /** The documented BlendQuery JSON body, exactly. */
  toQueryJson(): QueryJson {
    const picks = this.pickedParts().map((part) => {
      const pick = this.picks.get(part)!;
      const source =
        pick.source.kind === "coords" ? pick.source.values : sourceToken(pick.source);
      return { source, part, weight: pick.weight };
    });
    return { picks, k: this.k };
  }

  /** Encode picks + k into a URL query string (leading "?"). */
  toUrlSearch(): string {
    const params = new URLSearchParams();
    for (const part of this.pickedParts()) {
      const pick = this.picks.get(part)!;
      params.append("pick", `${part}|${sourceToken(pick.source)}|${pick.weight}`);
    }
    params.set("k", String(this.k));
    return `?${params.toString()}`;
  }

  /** Rebuild state from a query string produced by toUrlSearch. */
  static fromUrlSearch(search: string, parts: string[]): PickState {
    const state = new PickState(parts);
    const params = new URLSearchParams(search);
    const k = params.get("k");
    if (k !== null) {
      const n = Number(k);
      if (Number.isInteger(n) && n >= 1) state.k = n;
    }
    for (const entry of params.getAll("pick")) {
      const first = entry.indexOf("|");
      const last = entry.lastIndexOf("|");
      if (first < 0 || last <= first) continue;
      const part = entry.slice(0, first);
      if (!parts.includes(part)) continue;
      const weight = Number(entry.slice(last + 1));
      try {
        state.setSource(part, parseSourceToken(entry.slice(first + 1, last)));
      } catch {
        continue;
      }
      if (weight > 0 && weight <= MAX_WEIGHT) state.setWeight(part, weight);
    }
    return state;
  }
}
