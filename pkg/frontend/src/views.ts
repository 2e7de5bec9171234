/** View-model helpers: scatter layout with front emphasis, ternary
 * passthrough, and the diverging contrast heatmap palette (white at exactly
 * zero so no-conflict cells, including the diagonal, are visibly neutral). */

import type { ContrastMatrixPayload, FrontPoint, TernaryPoint } from "./types";

export interface ScatterDatum {
  eval_id: number;
  x: number;
  y: number;
  onFront: boolean;
}

export const ZERO_COLOR = "#ffffff";

function channel(v: number): string {
  return Math.round(v).toString(16).padStart(2, "0");
}

/** Diverging palette centered at 0: negative -> blue, positive -> red. */
export function divergingColor(value: number, maxAbs: number): string {
  if (value === 0 || maxAbs <= 0) return ZERO_COLOR;
  const t = Math.min(Math.abs(value) / maxAbs, 1);
  const other = 255 * (1 - t * 0.82);
  return value > 0
    ? `#ff${channel(other)}${channel(other)}`
    : `#${channel(other)}${channel(other)}ff`;
}

export interface HeatmapCell {
  row: string;
  col: string;
  value: number;
  color: string;
}

export function heatmapCells(m: ContrastMatrixPayload): HeatmapCell[] {
  let maxAbs = 0;
  for (const row of m.matrix) {
    for (const v of row) maxAbs = Math.max(maxAbs, Math.abs(v));
  }
  const cells: HeatmapCell[] = [];
  m.metric_ids.forEach((rowId, j) => {
    m.metric_ids.forEach((colId, i) => {
      const v = m.matrix[j][i];
      cells.push({ row: rowId, col: colId, value: v,
                   color: divergingColor(v, maxAbs) });
    });
  });
  return cells;
}

/** Non-dominated filter over 2-d projections for front emphasis in the
 * scatter (display-side only; minimization in both axes). */
export function scatterData(
  points: { eval_id: number; objectives: number[] }[],
  xIdx: number,
  yIdx: number,
): ScatterDatum[] {
  const data = points.map((p) => ({
    eval_id: p.eval_id,
    x: p.objectives[xIdx],
    y: p.objectives[yIdx],
    onFront: true,
  }));
  for (const a of data) {
    for (const b of data) {
      if (b === a) continue;
      if (b.x <= a.x && b.y <= a.y && (b.x < a.x || b.y < a.y)) {
        a.onFront = false;
        break;
      }
    }
  }
  return data;
}

export function ternaryToSvg(
  pts: TernaryPoint[],
  size: number,
): { eval_id: number; px: number; py: number; degenerate: boolean }[] {
  const h = (Math.sqrt(3) / 2);
  return pts.map((p) => ({
    eval_id: p.eval_id,
    px: p.x * size,
    py: (h - p.y) * size, // flip: svg y grows downward
    degenerate: p.degenerate,
  }));
}

export function frontPointById(points: FrontPoint[], id: number): FrontPoint | null {
  return points.find((p) => p.eval_id === id) ?? null;
}
