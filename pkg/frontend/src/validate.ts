// Client-side mirror of the server's design-parameter invariants.  The
// server stays authoritative; this only catches mistakes before a request.

import type { Family, SideName, SpecPayload } from "./types.js";

export interface SpecFormFields {
  family: string;
  side: string;
  nullValue: string;
  alpha: string;
  beta: string;
  nMax: string;
  sigma0: string;
}

export type ValidationResult =
  | { ok: true; spec: SpecPayload }
  | { ok: false; errors: Record<string, string> };

const FAMILIES: Family[] = ["one_z", "one_t", "one_prop", "two_z", "two_t"];
const SIDES: SideName[] = ["right", "left", "two_sided"];

const TWO_SAMPLE = new Set<Family>(["two_z", "two_t"]);
const NEEDS_SIGMA = new Set<Family>(["one_z", "two_z"]);

function parseNumber(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const v = Number(trimmed);
  return Number.isFinite(v) ? v : null;
}

export function validateSpecForm(fields: SpecFormFields): ValidationResult {
  const errors: Record<string, string> = {};

  const family = fields.family as Family;
  if (!FAMILIES.includes(family)) {
    errors.family = "choose a test family";
  }
  const side = fields.side as SideName;
  if (!SIDES.includes(side)) {
    errors.side = "choose a side";
  }

  const alpha = parseNumber(fields.alpha);
  if (alpha === null || !(alpha > 0 && alpha < 1)) {
    errors.alpha = "alpha must lie strictly between 0 and 1";
  }
  const beta = parseNumber(fields.beta);
  if (beta === null || !(beta > 0 && beta < 1)) {
    errors.beta = "beta must lie strictly between 0 and 1";
  }
  if (alpha !== null && beta !== null && alpha + beta >= 1) {
    errors.beta = "alpha + beta must be below 1";
  }

  const nMax = parseNumber(fields.nMax);
  if (nMax === null || !Number.isInteger(nMax) || nMax < 1) {
    errors.nMax = "maximum sample size must be a positive integer";
  }

  let nullValue = parseNumber(fields.nullValue);
  if (!errors.family && TWO_SAMPLE.has(family)) {
    // two-sample null difference is fixed at zero
    nullValue = 0;
  } else if (nullValue === null) {
    errors.nullValue = "null value is required";
  } else if (family === "one_prop" && !(nullValue > 0 && nullValue < 1)) {
    errors.nullValue = "null success rate must lie strictly between 0 and 1";
  }

  let sigma0: number | null = null;
  if (!errors.family && NEEDS_SIGMA.has(family)) {
    sigma0 = parseNumber(fields.sigma0);
    if (sigma0 === null || !(sigma0 > 0)) {
      errors.sigma0 = "known standard deviation must be positive";
    }
  }

  if (Object.keys(errors).length > 0) return { ok: false, errors };

  const spec: SpecPayload = {
    family,
    side,
    null_value: nullValue as number,
    alpha: alpha as number,
    beta: beta as number,
  };
  if (TWO_SAMPLE.has(family)) {
    spec.n1_max = nMax as number;
    spec.n2_max = nMax as number;
  } else {
    spec.n_max = nMax as number;
  }
  if (sigma0 !== null) spec.sigma0 = sigma0;
  return { ok: true, spec };
}

export function validateObservation(
  raw: string,
  family: Family,
): { ok: true; value: number | [number, number] } | { ok: false; error: string } {
  const twoSample = TWO_SAMPLE.has(family);
  const parts = raw.split(",").map((p) => p.trim()).filter((p) => p !== "");
  if (twoSample) {
    if (parts.length !== 2) {
      return { ok: false, error: "enter a pair as: first, second" };
    }
    const a = parseNumber(parts[0]);
    const b = parseNumber(parts[1]);
    if (a === null || b === null) {
      return { ok: false, error: "both pair members must be numbers" };
    }
    return { ok: true, value: [a, b] };
  }
  if (parts.length !== 1) {
    return { ok: false, error: "enter a single number" };
  }
  const v = parseNumber(parts[0]);
  if (v === null) return { ok: false, error: "enter a number" };
  if (family === "one_prop" && v !== 0 && v !== 1) {
    return { ok: false, error: "success-rate observations must be 0 or 1" };
  }
  return { ok: true, value: v };
}
