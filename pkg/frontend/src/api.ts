/** Thin client over the documented HTTP endpoints. */

import type { Meta, QueryJson, QueryResponse, ScatterPoint } from "./types.js";

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const r = await fetch(this.base + path);
    if (!r.ok) throw new Error(await errorMessage(r));
    return r.json() as Promise<T>;
  }

  meta(): Promise<Meta> {
    return this.getJson("/api/meta");
  }

  manifold(part: string): Promise<ScatterPoint[]> {
    return this.getJson(`/api/manifold/${encodeURIComponent(part)}?projection=2d`);
  }

  silhouetteUrl(shapeId: number, view: number, part?: string): string {
    const q = part ? `?part=${encodeURIComponent(part)}` : "";
    return `${this.base}/api/shape/${shapeId}/silhouette/${view}${q}`;
  }

  async query(body: QueryJson): Promise<QueryResponse> {
    const r = await fetch(`${this.base}/api/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!r.ok) throw new Error(await errorMessage(r));
    return r.json() as Promise<QueryResponse>;
  }

  async registerExternal(id: string, parts: Record<string, number[]>): Promise<void> {
    const r = await fetch(`${this.base}/api/external`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ id, parts }),
    });
    if (!r.ok) throw new Error(await errorMessage(r));
  }
}

async function errorMessage(r: Response): Promise<string> {
  try {
    const body = (await r.json()) as { message?: string };
    if (body.message) return body.message;
  } catch {
    // non-JSON error body
  }
  return `${r.status} ${r.statusText}`;
}
