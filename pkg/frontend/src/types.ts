/** Wire types for the partblend HTTP API. */

export interface Meta {
  parts: string[];
  shape_count: number;
  shapes: { id: number; name: string }[];
  dim: number;
  fingerprint: string;
}

export interface ScatterPoint {
  id: number;
  name: string;
  x: number;
  y: number;
}

export type PickSource =
  | { kind: "shape"; id: number }
  | { kind: "ext"; id: string }
  | { kind: "absent" }
  | { kind: "coords"; values: number[] };

export interface Pick {
  source: PickSource;
  weight: number;
}

/** One entry of the documented BlendQuery JSON body. */
export interface QueryPickJson {
  source: string | number[];
  part: string;
  weight: number;
}

export interface QueryJson {
  picks: QueryPickJson[];
  k: number;
}

export interface RankedResult {
  shape_id: number;
  name: string;
  total_cost: number;
  per_part_costs: Record<string, number>;
}

export interface QueryResponse {
  results: RankedResult[];
}

export interface ApiError {
  code: string;
  message: string;
}
