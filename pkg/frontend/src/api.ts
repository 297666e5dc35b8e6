// Thin typed client over the session service HTTP API.  The UI never
// computes a statistic itself; everything it displays comes from here.

import type {
  CreateTrialRequest,
  ObservationResponse,
  TrialSnapshot,
  TrialSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      const code = payload?.code ?? "unknown_error";
      const message = payload?.message ?? `request failed (${resp.status})`;
      throw new ApiError(resp.status, code, message);
    }
    return payload as T;
  }

  createTrial(req: CreateTrialRequest): Promise<TrialSnapshot> {
    return this.request("POST", "/trials", req);
  }

  listTrials(): Promise<TrialSummary[]> {
    return this.request("GET", "/trials");
  }

  getTrial(id: string): Promise<TrialSnapshot> {
    return this.request("GET", `/trials/${encodeURIComponent(id)}`);
  }

  appendObservation(
    id: string,
    value: number | [number, number],
    idempotencyKey?: string,
  ): Promise<ObservationResponse> {
    const body: Record<string, unknown> = Array.isArray(value)
      ? { values: value }
      : { value };
    if (idempotencyKey) body.idempotency_key = idempotencyKey;
    return this.request(
      "POST",
      `/trials/${encodeURIComponent(id)}/observations`,
      body,
    );
  }

  deleteTrial(id: string): Promise<{ id: string; deleted: boolean }> {
    return this.request("DELETE", `/trials/${encodeURIComponent(id)}`);
  }
}
