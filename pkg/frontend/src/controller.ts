// UI-facing application state machine, free of DOM concerns so the round-trip
// tests can drive it headlessly against a live service.

import { ApiClient, ApiError } from "./api.js";
import { DEFAULT_SPEC, FieldError, RequestSequencer, validateSpec } from "./state.js";
import type {
  ErrorPayload,
  PartInput,
  SolveResponse,
  SpecInput,
  SweepResponse,
} from "./types.js";

export interface SweepParams {
  kMin: number;
  kMax: number;
  steps: number;
}

export interface Banner {
  status: number;
  payload: ErrorPayload | null;
}

export class FrontierController {
  spec: SpecInput = structuredClone(DEFAULT_SPEC);
  sweepParams: SweepParams = { kMin: 0.01, kMax: 100, steps: 25 };
  lastSolve: SolveResponse | null = null;
  lastSweep: SweepResponse | null = null;
  selected: number | null = null;
  banner: Banner | null = null;
  fieldErrors: FieldError[] = [];

  private readonly solves = new RequestSequencer();
  private readonly sweeps = new RequestSequencer();

  constructor(private readonly api: ApiClient) {}

  /** Re-solve and re-sweep for the current spec; stale responses are dropped. */
  async refresh(): Promise<void> {
    this.fieldErrors = validateSpec(this.spec);
    if (this.fieldErrors.length > 0) {
      return; // invalid fields block submission
    }
    this.banner = null;
    await Promise.all([this.runSolve(), this.runSweep()]);
  }

  /** Single POST /solve (the K-slider path) plus highlight update. */
  async setK(k: number): Promise<void> {
    this.spec = { ...this.spec, K_mm2_per_cent: k };
    this.fieldErrors = validateSpec(this.spec);
    if (this.fieldErrors.length > 0) {
      return;
    }
    this.banner = null;
    await this.runSolve();
  }

  async addPart(part: PartInput): Promise<void> {
    try {
      await this.api.addPart(part);
    } catch (error) {
      this.noteError(error);
      return;
    }
    await this.refresh();
  }

  selectPoint(index: number): void {
    if (this.lastSweep && index >= 0 && index < this.lastSweep.points.length) {
      this.selected = index;
    }
  }

  private async runSolve(): Promise<void> {
    const ticket = this.solves.issue();
    try {
      const solution = await this.api.solve(this.spec);
      if (!this.solves.accept(ticket)) return;
      this.lastSolve = solution;
      this.updateHighlight();
    } catch (error) {
      if (!this.solves.accept(ticket)) return;
      this.lastSolve = null;
      this.noteError(error);
    }
  }

  private async runSweep(): Promise<void> {
    const ticket = this.sweeps.issue();
    const { kMin, kMax, steps } = this.sweepParams;
    try {
      const sweep = await this.api.sweep(this.spec, kMin, kMax, steps);
      if (!this.sweeps.accept(ticket)) return;
      this.lastSweep = sweep;
      this.updateHighlight();
    } catch (error) {
      if (!this.sweeps.accept(ticket)) return;
      this.lastSweep = null;
      this.noteError(error);
    }
  }

  /** Highlight the frontier point whose counts equal the latest solve's. */
  private updateHighlight(): void {
    if (!this.lastSolve || !this.lastSweep) return;
    const want = JSON.stringify(this.lastSolve.counts);
    const index = this.lastSweep.points.findIndex(
      (p) => JSON.stringify(p.counts) === want,
    );
    this.selected = index >= 0 ? index : null;
  }

  private noteError(error: unknown): void {
    if (error instanceof ApiError) {
      this.banner = { status: error.status, payload: error.payload };
    } else {
      this.banner = {
        status: 0,
        payload: { error: { code: "network", message: String(error) } },
      };
    }
  }
}
