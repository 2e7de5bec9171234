/** Client-side mirror of the server's weighted scalarization, used only to
 * keep the sliders responsive; the server's POST /select stays authoritative
 * and the app cross-checks against it on slider release. The tie-break chain
 * (score, then f1_obj, then the objective vector lexicographically, then
 * eval id) must match the server exactly. */

import type { FrontPayload, Weights } from "./types";

export interface ScoredPoint {
  eval_id: number;
  score: number;
}

export function normalizeWeights(w: Weights): Weights {
  let total = 0;
  for (const k of Object.keys(w)) {
    if (!(w[k] >= 0) || !isFinite(w[k])) throw new Error(`bad weight for ${k}`);
    total += w[k];
  }
  if (total <= 0) throw new Error("at least one weight must be positive");
  const out: Weights = {};
  for (const k of Object.keys(w)) out[k] = w[k] / total;
  return out;
}

/** Slider edit model: clamp to >= 0; an all-zero attempt restores the
 * previous value of the edited metric and reports a warning. */
export function applySliderChange(
  current: Weights,
  metric: string,
  rawValue: number,
): { weights: Weights; warning: string | null } {
  const next: Weights = { ...current, [metric]: Math.max(0, rawValue) };
  const total = Object.values(next).reduce((a, b) => a + b, 0);
  if (total <= 0) {
    return {
      weights: { ...current },
      warning: "all weights zero; restored previous value",
    };
  }
  return { weights: normalizeWeights(next), warning: null };
}

function compareLex(a: number[], b: number[]): number {
  for (let i = 0; i < Math.min(a.length, b.length); i++) {
    if (a[i] !== b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return a.length - b.length;
}

export function rankFront(front: FrontPayload, weights: Weights): ScoredPoint[] {
  const w = normalizeWeights(weights);
  const ids = front.objective_ids;
  for (const k of Object.keys(w)) {
    if (!ids.includes(k)) throw new Error(`front lacks weighted metric ${k}`);
  }
  const f0col = ids.indexOf("f1_obj");
  const scored = front.points.map((p) => {
    let s = 0;
    for (const k of Object.keys(w)) s += w[k] * p.objectives[ids.indexOf(k)];
    return { point: p, score: s, f0: f0col >= 0 ? p.objectives[f0col] : 0 };
  });
  scored.sort((a, b) => {
    if (a.score !== b.score) return a.score - b.score;
    if (a.f0 !== b.f0) return a.f0 - b.f0;
    const lex = compareLex(a.point.objectives, b.point.objectives);
    if (lex !== 0) return lex;
    return a.point.eval_id - b.point.eval_id;
  });
  return scored.map((s) => ({ eval_id: s.point.eval_id, score: s.score }));
}

export function selectFromFront(front: FrontPayload, weights: Weights): ScoredPoint {
  const ranking = rankFront(front, weights);
  if (ranking.length === 0) throw new Error("empty front");
  return ranking[0];
}
