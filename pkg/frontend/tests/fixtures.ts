/** Recorded request/response pair from a live `partblend serve` session
 * over a 3x3 grid corpus (64px renders, dim 8).  The request body is the
 * documented BlendQuery JSON, byte-for-byte what the server accepts; the
 * response is the server's ranked result list verbatim (ascending
 * total_cost, per-part costs included).
 */

import type { QueryJson, QueryResponse } from "../src/types.js";

export const PARTS = ["backrest", "seat", "armrests", "legs"];

export const RECORDED_REQUEST: QueryJson = {
  picks: [
    { source: "shape:8", part: "backrest", weight: 2.0 },
    { source: "absent", part: "armrests", weight: 1.0 },
    { source: "shape:4", part: "legs", weight: 1.0 },
  ],
  k: 3,
};

export const RECORDED_RESPONSE: QueryResponse = {
  results: [
    {
      shape_id: 5,
      name: "grid_1_2",
      total_cost: 0.0,
      per_part_costs: { legs: 0.0, backrest: 0.0, armrests: 0.0 },
    },
    {
      shape_id: 8,
      name: "grid_2_2",
      total_cost: 0.989714846596064,
      per_part_costs: { legs: 0.989714846596064, backrest: 0.0, armrests: 0.0 },
    },
    {
      shape_id: 2,
      name: "grid_0_2",
      total_cost: 1.064541187138767,
      per_part_costs: { legs: 1.064541187138767, backrest: 0.0, armrests: 0.0 },
    },
  ],
};
