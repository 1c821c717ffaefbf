import { describe, expect, it } from "vitest";

import {
  DEFAULT_SPEC,
  RequestSequencer,
  queryToSpec,
  specToQuery,
  validateSpec,
} from "../src/state.js";
import type { SpecInput } from "../src/types.js";

const FULL_SPEC: SpecInput = {
  ceff_uF: 12,
  bias_V: 1.15,
  K_mm2_per_cent: 2.51,
  mask: [
    { freq_Hz: 1e5, target_ohm: 0.1, series_ohm: 0, load_ohm: 0 },
    { freq_Hz: 1e6, target_ohm: 0.01, series_ohm: 0.001, load_ohm: 0.002 },
  ],
  filter: { min_voltage_rating_V: 10, allowed_dielectrics: ["X5R", "X7R"] },
};

describe("validateSpec", () => {
  it("accepts the default spec", () => {
    expect(validateSpec(DEFAULT_SPEC)).toEqual([]);
  });

  it("flags negative scalars with the field name", () => {
    const errors = validateSpec({ ...DEFAULT_SPEC, ceff_uF: -1 });
    expect(errors).toHaveLength(1);
    expect(errors[0].field).toBe("ceff_uF");
  });

  it("requires ascending mask frequencies", () => {
    const spec: SpecInput = {
      ...DEFAULT_SPEC,
      mask: [
        { freq_Hz: 2e6, target_ohm: 0.01, series_ohm: 0, load_ohm: 0 },
        { freq_Hz: 1e6, target_ohm: 0.01, series_ohm: 0, load_ohm: 0 },
      ],
    };
    expect(validateSpec(spec).map((e) => e.field)).toContain("mask[1].freq_Hz");
  });

  it("does not reject load >= target: that is the server's 422", () => {
    const spec: SpecInput = {
      ...DEFAULT_SPEC,
      mask: [{ freq_Hz: 1e6, target_ohm: 0.01, series_ohm: 0, load_ohm: 0.05 }],
    };
    expect(validateSpec(spec)).toEqual([]);
  });

  it("rejects non-numeric input", () => {
    expect(validateSpec({ ...DEFAULT_SPEC, bias_V: NaN })).toHaveLength(1);
  });
});

describe("query encoding", () => {
  it("round-trips a full spec", () => {
    const query = specToQuery(FULL_SPEC);
    expect(queryToSpec(query)).toEqual(FULL_SPEC);
  });

  it("round-trips the default spec", () => {
    expect(queryToSpec(specToQuery(DEFAULT_SPEC))).toEqual(DEFAULT_SPEC);
  });

  it("falls back to defaults for an empty query", () => {
    expect(queryToSpec("")).toEqual(DEFAULT_SPEC);
  });

  it("survives a leading question mark", () => {
    expect(queryToSpec("?" + specToQuery(FULL_SPEC))).toEqual(FULL_SPEC);
  });
});

describe("RequestSequencer", () => {
  it("accepts only the newest ticket", () => {
    const seq = new RequestSequencer();
    const first = seq.issue();
    const second = seq.issue();
    expect(seq.accept(first)).toBe(false);
    expect(seq.accept(second)).toBe(true);
  });

  it("accepts in-order singletons", () => {
    const seq = new RequestSequencer();
    const a = seq.issue();
    expect(seq.accept(a)).toBe(true);
    const b = seq.issue();
    expect(seq.accept(b)).toBe(true);
  });
});
