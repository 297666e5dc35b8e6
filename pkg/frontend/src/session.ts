// Pure view-state reducer for one trial page.  Every transition is driven
// by a server payload; nothing here computes a statistic.

import type {
  ObservationResponse,
  TrialSnapshot,
  TrialStatus,
} from "./types.js";

export interface BannerState {
  tone: "info" | "reject" | "accept" | "error";
  text: string;
}

export interface TrialViewState {
  id: string;
  nMax: number;
  A: number;
  B: number;
  gamma: number;
  status: TrialStatus;
  trajectory: [number, number][];
  n: number;
  banner: BannerState;
  inputLocked: boolean;
}

function bannerFor(
  status: TrialStatus,
  decision: { at_n: number; cause: string | null } | null,
): BannerState {
  if (status === "rejected_H0") {
    return {
      tone: "reject",
      text: `reject H₀ at n=${decision?.at_n} (${decision?.cause ?? "terminal"})`,
    };
  }
  if (status === "accepted_H0") {
    return {
      tone: "accept",
      text: `accept H₀ at n=${decision?.at_n} (${decision?.cause ?? "terminal"})`,
    };
  }
  return { tone: "info", text: "collecting: enter the next observation" };
}

export function fromSnapshot(snap: TrialSnapshot): TrialViewState {
  const nMax = snap.spec.n_max ?? snap.spec.n1_max ?? 1;
  return {
    id: snap.id,
    nMax,
    A: snap.boundaries.A,
    B: snap.boundaries.B,
    gamma: snap.gamma,
    status: snap.status,
    trajectory: snap.trajectory.slice(),
    n: snap.n,
    banner: bannerFor(snap.status, snap.decision),
    inputLocked: snap.status !== "active",
  };
}

export function applyObservation(
  state: TrialViewState,
  resp: ObservationResponse,
): TrialViewState {
  const trajectory = state.trajectory.slice();
  if (resp.trajectory_point) {
    const [n] = resp.trajectory_point;
    if (trajectory.length === 0 || trajectory[trajectory.length - 1][0] < n) {
      trajectory.push(resp.trajectory_point);
    }
  }
  const terminal = resp.status !== "active";
  return {
    ...state,
    status: resp.status,
    trajectory,
    n: resp.n,
    banner: bannerFor(
      resp.status,
      terminal ? { at_n: resp.decision.at_n, cause: resp.decision.cause } : null,
    ),
    inputLocked: terminal,
  };
}

export function errorBanner(state: TrialViewState, text: string): TrialViewState {
  return { ...state, banner: { tone: "error", text } };
}
