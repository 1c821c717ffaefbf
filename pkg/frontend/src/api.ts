// Typed client for the capopt service. Every method returns the server's
// JSON verbatim; failures throw ApiError carrying the server's error payload
// so the UI can render it untouched.

import type {
  DemandResponse,
  ErrorPayload,
  PartInput,
  PartsResponse,
  SolveResponse,
  SpecInput,
  SweepResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly payload: ErrorPayload | null;

  constructor(status: number, payload: ErrorPayload | null, fallback: string) {
    super(payload?.error?.message ?? fallback);
    this.status = status;
    this.payload = payload;
  }

  get code(): string {
    return this.payload?.error?.code ?? "unknown";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const text = await response.text();
    let payload: unknown = null;
    try {
      payload = JSON.parse(text);
    } catch {
      payload = null;
    }
    if (!response.ok) {
      throw new ApiError(
        response.status,
        payload as ErrorPayload | null,
        `HTTP ${response.status}`,
      );
    }
    return payload as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  solve(spec: SpecInput): Promise<SolveResponse> {
    return this.post<SolveResponse>("/solve", spec);
  }

  sweep(
    spec: SpecInput,
    kMin: number,
    kMax: number,
    steps: number,
    spacing: "log" | "linear" = "log",
  ): Promise<SweepResponse> {
    return this.post<SweepResponse>("/sweep", {
      spec,
      k_min: kMin,
      k_max: kMax,
      steps,
      spacing,
    });
  }

  parts(): Promise<PartsResponse> {
    return this.request<PartsResponse>("/parts");
  }

  addPart(part: PartInput): Promise<{ added: string; parts_count: number }> {
    return this.post("/parts", part);
  }

  demand(
    applications: SpecInput[],
    partId: string,
    priceGrid: number[],
  ): Promise<DemandResponse> {
    return this.post<DemandResponse>("/demand", {
      applications,
      part_id: partId,
      price_grid: priceGrid,
    });
  }
}
