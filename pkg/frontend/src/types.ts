// Shapes mirrored from the session service JSON payloads.

export type Family = "one_z" | "one_t" | "one_prop" | "two_z" | "two_t";
export type SideName = "right" | "left" | "two_sided";

export interface SpecPayload {
  family: Family;
  side?: SideName;
  null_value?: number;
  alpha?: number;
  beta?: number;
  n_max?: number;
  n1_max?: number;
  n2_max?: number;
  sigma0?: number;
}

export interface DecisionPayload {
  kind: "reject_null" | "accept_null" | "continue_sampling";
  at_n: number;
  cause: string | null;
}

export type TrialStatus = "active" | "rejected_H0" | "accepted_H0";

export interface TrialSnapshot {
  id: string;
  spec: SpecPayload;
  boundaries: { A: number; B: number };
  gamma: number;
  umpbt_alt: Record<string, unknown> | null;
  status: TrialStatus;
  decision: DecisionPayload | null;
  n: number;
  trajectory: [number, number][]; // [n, L]
  created_at: number;
  updated_at: number;
}

export interface TrialSummary {
  id: string;
  family: Family;
  status: TrialStatus;
  n: number;
  gamma: number;
  trajectory: [number, number][];
  created_at: number;
  updated_at: number;
}

export interface ObservationResponse {
  n: number;
  decision: DecisionPayload;
  trajectory_point: [number, number] | null;
  L: number | null;
  A: number;
  B: number;
  gamma: number;
  status: TrialStatus;
}

export interface CreateTrialRequest {
  spec: SpecPayload;
  gamma?: number;
  calibrate?: boolean;
  exact?: boolean;
  reps?: number;
  seed?: number;
  idempotency_key?: string;
}
