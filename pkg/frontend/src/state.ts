// Spec editing state: validation, shareable query-string encoding, and the
// request sequencing that discards stale in-flight responses.

import type { MaskPointInput, SpecInput } from "./types.js";

export const DEFAULT_SPEC: SpecInput = {
  ceff_uF: 4.0,
  bias_V: 3.3,
  K_mm2_per_cent: 1.0,
  mask: [],
  filter: {},
};

export interface FieldError {
  field: string;
  message: string;
}

// Field-level validation mirrors the API's 400 conditions so bad input never
// leaves the form. Deliberately NOT checked here: load_ohm >= target_ohm,
// which the server answers with 422 and the UI shows as the infeasible banner.
export function validateSpec(spec: SpecInput): FieldError[] {
  const errors: FieldError[] = [];
  const numeric = (field: string, value: number, min = 0) => {
    if (!Number.isFinite(value)) {
      errors.push({ field, message: "must be a number" });
    } else if (value < min) {
      errors.push({ field, message: `must be >= ${min}` });
    }
  };
  numeric("ceff_uF", spec.ceff_uF);
  numeric("bias_V", spec.bias_V);
  numeric("K_mm2_per_cent", spec.K_mm2_per_cent);
  let lastFreq = 0;
  spec.mask.forEach((point, index) => {
    const at = `mask[${index}]`;
    if (!Number.isFinite(point.freq_Hz) || point.freq_Hz <= 0) {
      errors.push({ field: `${at}.freq_Hz`, message: "must be > 0" });
    } else if (point.freq_Hz <= lastFreq) {
      errors.push({ field: `${at}.freq_Hz`, message: "must ascend" });
    } else {
      lastFreq = point.freq_Hz;
    }
    if (!Number.isFinite(point.target_ohm) || point.target_ohm <= 0) {
      errors.push({ field: `${at}.target_ohm`, message: "must be > 0" });
    }
    if (!Number.isFinite(point.series_ohm) || point.series_ohm < 0) {
      errors.push({ field: `${at}.series_ohm`, message: "must be >= 0" });
    }
    if (!Number.isFinite(point.load_ohm) || point.load_ohm < 0) {
      errors.push({ field: `${at}.load_ohm`, message: "must be >= 0" });
    }
  });
  const flt = spec.filter;
  if (flt.max_height_mm !== undefined && !(flt.max_height_mm > 0)) {
    errors.push({ field: "filter.max_height_mm", message: "must be > 0" });
  }
  if (flt.min_voltage_rating_V !== undefined && !(flt.min_voltage_rating_V > 0)) {
    errors.push({ field: "filter.min_voltage_rating_V", message: "must be > 0" });
  }
  return errors;
}

// Query-string encoding keeps what-if links shareable: the whole spec state
// lives in the URL, nothing else.

export function specToQuery(spec: SpecInput): string {
  const params = new URLSearchParams();
  params.set("ceff", String(spec.ceff_uF));
  params.set("bias", String(spec.bias_V));
  params.set("k", String(spec.K_mm2_per_cent));
  if (spec.mask.length > 0) {
    params.set(
      "mask",
      spec.mask
        .map((p) => [p.freq_Hz, p.target_ohm, p.series_ohm, p.load_ohm].join("~"))
        .join("_"),
    );
  }
  if (spec.filter.max_height_mm !== undefined) {
    params.set("hmax", String(spec.filter.max_height_mm));
  }
  if (spec.filter.min_voltage_rating_V !== undefined) {
    params.set("vmin", String(spec.filter.min_voltage_rating_V));
  }
  if (spec.filter.allowed_dielectrics?.length) {
    params.set("diel", spec.filter.allowed_dielectrics.join(","));
  }
  if (spec.filter.allowed_manufacturers?.length) {
    params.set("mfr", spec.filter.allowed_manufacturers.join(","));
  }
  return params.toString();
}

export function queryToSpec(query: string): SpecInput {
  const params = new URLSearchParams(query);
  const spec: SpecInput = {
    ceff_uF: readNumber(params, "ceff", DEFAULT_SPEC.ceff_uF),
    bias_V: readNumber(params, "bias", DEFAULT_SPEC.bias_V),
    K_mm2_per_cent: readNumber(params, "k", DEFAULT_SPEC.K_mm2_per_cent),
    mask: [],
    filter: {},
  };
  const mask = params.get("mask");
  if (mask) {
    spec.mask = mask.split("_").map((row): MaskPointInput => {
      const [freq, target, series, load] = row.split("~").map(Number);
      return {
        freq_Hz: freq,
        target_ohm: target,
        series_ohm: series || 0,
        load_ohm: load || 0,
      };
    });
  }
  const hmax = params.get("hmax");
  if (hmax !== null) spec.filter.max_height_mm = Number(hmax);
  const vmin = params.get("vmin");
  if (vmin !== null) spec.filter.min_voltage_rating_V = Number(vmin);
  const diel = params.get("diel");
  if (diel) spec.filter.allowed_dielectrics = diel.split(",");
  const mfr = params.get("mfr");
  if (mfr) spec.filter.allowed_manufacturers = mfr.split(",");
  return spec;
}

function readNumber(params: URLSearchParams, key: string, fallback: number): number {
  const raw = params.get(key);
  if (raw === null) return fallback;
  const value = Number(raw);
  return Number.isFinite(value) ? value : fallback;
}

// At most one solve matters per editor: a response is only applied when it
// answers the newest issued request, so superseded edits can never overwrite
// fresher results.
export class RequestSequencer {
  private issued = 0;

  issue(): number {
    this.issued += 1;
    return this.issued;
  }

  accept(id: number): boolean {
    return id === this.issued;
  }
}
