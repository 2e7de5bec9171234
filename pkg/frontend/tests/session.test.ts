import { describe, expect, it } from "vitest";

import { replay, SessionLog } from "../src/session";
import { selectFromFront } from "../src/scoring";
import type { FrontPayload } from "../src/types";

const FRONT: FrontPayload = {
  run_id: "r",
  objective_ids: ["f1_obj", "ddsp", "invd"],
  points: [
    { eval_id: 0, objectives: [0.30, 0.20, 0.10] },
    { eval_id: 1, objectives: [0.25, 0.30, 0.30] },
    { eval_id: 2, objectives: [0.40, 0.05, 0.05] },
  ],
};

describe("SessionLog", () => {
  it("records ordered events with timestamps", () => {
    const log = new SessionLog("r");
    log.record({ f1_obj: 1 }, 1, 1000);
    log.record({ ddsp: 1 }, 2, 2000);
    expect(log.length).toBe(2);
    const data = JSON.parse(log.exportJson());
    expect(data.version).toBe(1);
    expect(data.run_id).toBe("r");
    expect(data.events.map((e: { t: number }) => e.t)).toEqual([1000, 2000]);
  });

  it("export/import round-trips and restores the displayed weights", () => {
    const log = new SessionLog("r");
    log.record({ f1_obj: 0.5, ddsp: 0.5 }, 1, 1);
    log.record({ f1_obj: 0.5, ddsp: 0.2, invd: 0.3 }, 0, 2);
    const restored = SessionLog.importJson(log.exportJson());
    expect(restored.runId).toBe("r");
    expect(restored.length).toBe(2);
    expect(restored.last()?.weights).toEqual(
      { f1_obj: 0.5, ddsp: 0.2, invd: 0.3 });
    expect(restored.exportJson()).toBe(log.exportJson());
  });

  it("rejects unknown formats", () => {
    expect(() => SessionLog.importJson('{"version": 99}')).toThrow();
  });

  it("replay reproduces the final selection deterministically", () => {
    const log = new SessionLog("r");
    const w1 = { f1_obj: 1 };
    const w2 = { f1_obj: 0.5, ddsp: 0.2, invd: 0.3 };
    log.record(w1, selectFromFront(FRONT, w1).eval_id, 1);
    log.record(w2, selectFromFront(FRONT, w2).eval_id, 2);
    const final = replay(log, FRONT);
    expect(final).toBe(log.last()?.selected_eval_id);
    expect(final).toBe(0);
  });
});
