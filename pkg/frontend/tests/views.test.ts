import { describe, expect, it } from "vitest";

import { divergingColor, heatmapCells, scatterData, ternaryToSvg, ZERO_COLOR }
  from "../src/views";
import type { ContrastMatrixPayload } from "../src/types";

const MATRIX: ContrastMatrixPayload = {
  dataset: "d",
  learner: "rf",
  metric_ids: ["ddsp", "deod"],
  matrix: [[0, 0.4], [-0.2, 0]],
  spread: [[[0, 0], [0.3, 0.5]], [[-0.3, -0.1], [0, 0]]],
  n_seeds: 2,
};

describe("divergingColor", () => {
  it("renders exact zero as the neutral color", () => {
    expect(divergingColor(0, 1)).toBe(ZERO_COLOR);
    expect(divergingColor(0, 0)).toBe(ZERO_COLOR);
  });

  it("separates positive and negative conflicts", () => {
    const pos = divergingColor(0.4, 0.4);
    const neg = divergingColor(-0.4, 0.4);
    expect(pos).toMatch(/^#ff/);
    expect(neg).toMatch(/ff$/);
    expect(pos).not.toBe(neg);
  });
});

describe("heatmapCells", () => {
  it("diagonal cells get the zero color", () => {
    const cells = heatmapCells(MATRIX);
    for (const c of cells.filter((c) => c.row === c.col)) {
      expect(c.value).toBe(0);
      expect(c.color).toBe(ZERO_COLOR);
    }
    const off = cells.find((c) => c.row === "ddsp" && c.col === "deod")!;
    expect(off.value).toBeCloseTo(0.4);
    expect(off.color).not.toBe(ZERO_COLOR);
  });
});

describe("scatterData", () => {
  it("emphasizes only projected-front points", () => {
    const pts = [
      { eval_id: 1, objectives: [0.1, 0.9] },
      { eval_id: 2, objectives: [0.9, 0.1] },
      { eval_id: 3, objectives: [0.95, 0.95] }, // dominated
    ];
    const data = scatterData(pts, 0, 1);
    expect(data.find((d) => d.eval_id === 1)?.onFront).toBe(true);
    expect(data.find((d) => d.eval_id === 2)?.onFront).toBe(true);
    expect(data.find((d) => d.eval_id === 3)?.onFront).toBe(false);
  });
});

describe("ternaryToSvg", () => {
  it("flips y for svg space and keeps ids", () => {
    const pts = [{ x: 0.5, y: 0, eval_id: 7, degenerate: false, objectives: [] }];
    const svg = ternaryToSvg(pts, 100);
    expect(svg[0].eval_id).toBe(7);
    expect(svg[0].px).toBeCloseTo(50);
    expect(svg[0].py).toBeCloseTo(Math.sqrt(3) / 2 * 100);
  });
});
