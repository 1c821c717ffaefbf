// Wire types for the capopt HTTP service. These mirror the server's JSON
// schemas exactly; the UI never derives optimization numbers on its own.

export interface MaskPointInput {
  freq_Hz: number;
  target_ohm: number;
  series_ohm: number;
  load_ohm: number;
}

export interface FilterInput {
  max_height_mm?: number;
  min_voltage_rating_V?: number;
  allowed_dielectrics?: string[];
  allowed_manufacturers?: string[];
}

export interface SpecInput {
  ceff_uF: number;
  bias_V: number;
  K_mm2_per_cent: number;
  mask: MaskPointInput[];
  filter: FilterInput;
}

export interface RowCheck {
  label: string;
  achieved: number;
  rhs: number;
  slack: number;
  satisfied: boolean;
}

export interface SolveReport {
  feasible: boolean;
  total_cost_cents: number;
  total_area_mm2: number;
  rows: RowCheck[];
}

export interface SolveResponse {
  status: string;
  objective: number;
  counts: Record<string, number>;
  report: SolveReport;
  spec: SpecInput;
  solver: { nodes_explored: number };
}

export interface TangencyData {
  k: number;
  value: number;
  slope_area_per_cost: number;
  area_intercept: number;
  cost_intercept: number | null;
}

export interface FrontierPointData {
  k: number;
  total_cost_cents: number;
  total_area_mm2: number;
  objective: number;
  unique_parts: number;
  total_parts: number;
  counts: Record<string, number>;
  tangency: TangencyData;
  pareto: boolean;
}

export interface SweepResponse {
  points: FrontierPointData[];
}

export interface PartInput {
  id: string;
  description?: string;
  package?: string;
  nominal_uF: number;
  voltage_rating_V: number;
  height_mm: number;
  area_mm2: number;
  cost_cents: number;
  dielectric?: string;
  manufacturer?: string;
  esr_ohm: number;
  esl_nH: number;
  derating?: { bias_V: number; ceff_uF: number }[];
}

export interface PartsResponse {
  parts: (PartInput & Record<string, unknown>)[];
}

export interface DemandPoint {
  price_cents: number;
  quantity: number;
}

export interface DemandResponse {
  part_id: string;
  points: DemandPoint[];
  x_intercept_cents: number | null;
}

export interface ErrorPayload {
  error: { code: string; message: string };
}
