/** Session log: an ordered, exportable audit record of weight changes and
 * the selections they produced. Replaying a log against the same front must
 * reproduce the final selection. */

import { selectFromFront } from "./scoring";
import type { FrontPayload, Weights } from "./types";

export interface SessionEvent {
  t: number; // epoch ms
  weights: Weights;
  selected_eval_id: number;
}

export interface SessionLogData {
  version: 1;
  run_id: string;
  events: SessionEvent[];
}

export class SessionLog {
  readonly runId: string;
  private events: SessionEvent[] = [];

  constructor(runId: string) {
    this.runId = runId;
  }

  record(weights: Weights, selectedEvalId: number, t?: number): SessionEvent {
    const ev: SessionEvent = {
      t: t ?? Date.now(),
      weights: { ...weights },
      selected_eval_id: selectedEvalId,
    };
    this.events.push(ev);
    return ev;
  }

  get length(): number {
    return this.events.length;
  }

  last(): SessionEvent | null {
    return this.events.length ? this.events[this.events.length - 1] : null;
  }

  exportJson(): string {
    const data: SessionLogData = {
      version: 1,
      run_id: this.runId,
      events: this.events.map((e) => ({ ...e, weights: { ...e.weights } })),
    };
    return JSON.stringify(data, null, 2);
  }

  static importJson(text: string): SessionLog {
    const data = JSON.parse(text) as SessionLogData;
    if (data.version !== 1 || typeof data.run_id !== "string" ||
        !Array.isArray(data.events)) {
      throw new Error("unrecognized session log format");
    }
    const log = new SessionLog(data.run_id);
    for (const e of data.events) log.record(e.weights, e.selected_eval_id, e.t);
    return log;
  }
}

/** Re-run every logged weight vector against the front; returns the final
 * selection (deterministic, so it must match the log's last entry). */
export function replay(log: SessionLog, front: FrontPayload): number | null {
  let finalId: number | null = null;
  for (const ev of (JSON.parse(log.exportJson()) as SessionLogData).events) {
    finalId = selectFromFront(front, ev.weights).eval_id;
  }
  return finalId;
}
