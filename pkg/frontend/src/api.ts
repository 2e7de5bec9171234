/** Thin fetch client for the read-only run API. */

import type {
  BehaviorPayload, ContrastMatrixPayload, FrontPayload, RunMeta,
  SelectResponse, TernaryPoint, Weights,
} from "./types";

export class ApiClient {
  constructor(readonly base: string) {}

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(`${this.base}${path}`);
    if (!res.ok) throw new Error(`GET ${path}: ${res.status}`);
    return (await res.json()) as T;
  }

  async runs(): Promise<RunMeta[]> {
    return (await this.get<{ runs: RunMeta[] }>("/runs")).runs;
  }

  front(runId: string, objectives?: string[]): Promise<FrontPayload> {
    const q = objectives ? `?objectives=${objectives.join(",")}` : "";
    return this.get(`/runs/${runId}/front${q}`);
  }

  async ternary(runId: string, objectives: string[]): Promise<TernaryPoint[]> {
    const body = await this.get<{ points: TernaryPoint[] }>(
      `/runs/${runId}/ternary?objectives=${objectives.join(",")}`);
    return body.points;
  }

  async contrast(experiment: string): Promise<ContrastMatrixPayload[]> {
    const body = await this.get<{ matrices: ContrastMatrixPayload[] }>(
      `/collections/${experiment}/contrast`);
    return body.matrices;
  }

  behavior(runId: string, evalId: number): Promise<BehaviorPayload> {
    return this.get(`/runs/${runId}/behavior/${evalId}`);
  }

  async select(runId: string, weights: Weights): Promise<SelectResponse> {
    const res = await fetch(`${this.base}/runs/${runId}/select`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ weights }),
    });
    if (!res.ok) throw new Error(`POST select: ${res.status}`);
    return (await res.json()) as SelectResponse;
  }
}
