/** API payload shapes, mirrored exactly; the client never recomputes
 * metrics (selection scoring is the one sanctioned exception). */

export interface RunMeta {
  run_id: string;
  experiment: string | null;
  dataset: string | null;
  learner: string | null;
  formulation: string | null;
  seed: number | null;
  objective_ids: string[] | null;
  n_evals: number | null;
}

export interface FrontPoint {
  eval_id: number;
  objectives: number[];
}

export interface FrontPayload {
  run_id: string;
  objective_ids: string[];
  points: FrontPoint[];
}

export interface TernaryPoint {
  x: number;
  y: number;
  eval_id: number;
  degenerate: boolean;
  objectives: number[];
}

export interface ContrastMatrixPayload {
  dataset: string;
  learner: string;
  metric_ids: string[];
  matrix: number[][];
  spread: number[][][];
  n_seeds: number;
}

export interface SelectResponse {
  run_id: string;
  eval_id: number;
  score: number;
  weights: Record<string, number>;
  ranking: { eval_id: number; score: number }[];
}

export interface BehaviorPayload {
  m: number;
  group_counts: Record<string, number>;
  cell_counts: Record<string, number>;
  acceptance_rates: Record<string, number | null>;
  conditional_rates: Record<string, number | null>;
  metric_values: Record<string, number | null>;
  undefined: string[];
}

export type Weights = Record<string, number>;
