// Replaying a recorded session through the view-state reducer must produce
// the same banner and chart a live operator would have seen.  The server
// responses below were captured from the session service replaying nine
// recorded observations against gamma = 27.856 (A = 160, B ~ 0.201).

import { describe, expect, it } from "vitest";

import { buildChartModel } from "../src/chart.js";
import { applyObservation, fromSnapshot } from "../src/session.js";
import type { ObservationResponse, TrialSnapshot } from "../src/types.js";

const A = 160.0;
const B = 0.20100502512562815;
const GAMMA = 27.856;

const SNAPSHOT: TrialSnapshot = {
  id: "golden1",
  spec: {
    family: "one_z",
    side: "right",
    null_value: 3,
    alpha: 0.005,
    beta: 0.2,
    n_max: 30,
    sigma0: 1.5,
  },
  boundaries: { A, B },
  gamma: GAMMA,
  umpbt_alt: { theta1: 3.7054 },
  status: "active",
  decision: null,
  n: 0,
  trajectory: [],
  created_at: 0,
  updated_at: 0,
};

const L_SERIES = [
  1.2484, 2.2811, 2.5809, 9.1599, 17.9261, 20.4272, 43.0582, 102.1282,
  224.408,
];

function responseAt(i: number): ObservationResponse {
  const n = i + 1;
  const terminal = n === 9;
  return {
    n,
    decision: terminal
      ? { kind: "reject_null", at_n: 9, cause: "crossed_A" }
      : { kind: "continue_sampling", at_n: n, cause: null },
    trajectory_point: [n, L_SERIES[i]],
    L: L_SERIES[i],
    A,
    B,
    gamma: GAMMA,
    status: terminal ? "rejected_H0" : "active",
  };
}

describe("recorded session replay", () => {
  it("shows the reject banner at n = 9 with a nine-point chart crossing log A", () => {
    let state = fromSnapshot(SNAPSHOT);
    expect(state.banner.tone).toBe("info");
    expect(state.inputLocked).toBe(false);

    for (let i = 0; i < 9; i++) {
      state = applyObservation(state, responseAt(i));
      if (i < 8) {
        expect(state.status).toBe("active");
        expect(state.inputLocked).toBe(false);
      }
    }

    expect(state.status).toBe("rejected_H0");
    expect(state.banner.tone).toBe("reject");
    expect(state.banner.text).toContain("n=9");
    expect(state.banner.text).toContain("crossed_A");
    expect(state.inputLocked).toBe(true);
    expect(state.trajectory.length).toBe(9);

    const model = buildChartModel({
      trajectory: state.trajectory,
      A: state.A,
      B: state.B,
      gamma: state.gamma,
      nMax: state.nMax,
    });
    expect(model.points.length).toBe(9);
    expect(model.crossedA).toBe(true);
    // only the final point lies above the rejection band
    const above = model.points.filter((p) => p.logL >= model.logA);
    expect(above.length).toBe(1);
    expect(above[0].n).toBe(9);
  });

  it("ignores a duplicated delivery of an already-charted point", () => {
    let state = fromSnapshot(SNAPSHOT);
    state = applyObservation(state, responseAt(0));
    state = applyObservation(state, responseAt(0)); // idempotent retry
    expect(state.trajectory.length).toBe(1);
    expect(state.n).toBe(1);
  });

  it("reconstructs the same view from a server snapshot", () => {
    let live = fromSnapshot(SNAPSHOT);
    for (let i = 0; i < 9; i++) live = applyObservation(live, responseAt(i));

    const restored = fromSnapshot({
      ...SNAPSHOT,
      status: "rejected_H0",
      decision: { kind: "reject_null", at_n: 9, cause: "crossed_A" },
      n: 9,
      trajectory: L_SERIES.map((L, i) => [i + 1, L] as [number, number]),
    });
    expect(restored.trajectory).toEqual(live.trajectory);
    expect(restored.banner).toEqual(live.banner);
    expect(restored.inputLocked).toBe(true);
  });
});
