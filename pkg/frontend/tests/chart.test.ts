import { describe, expect, it } from "vitest";

import { demandSvg, frontierSvg, makeScale } from "../src/chart.js";
import type { FrontierPointData } from "../src/types.js";

function point(
  k: number,
  cost: number,
  area: number,
): FrontierPointData {
  return {
    k,
    total_cost_cents: cost,
    total_area_mm2: area,
    objective: k * cost + area,
    unique_parts: 1,
    total_parts: 2,
    counts: { B: 2 },
    tangency: {
      k,
      value: k * cost + area,
      slope_area_per_cost: -k,
      area_intercept: k * cost + area,
      cost_intercept: k > 0 ? (k * cost + area) / k : null,
    },
    pareto: true,
  };
}

const POINTS = [point(0.5, 1.7, 3.3), point(1.0, 1.6, 3.4), point(2.0, 1.5, 3.5)];

describe("makeScale", () => {
  it("maps the data range onto the pixel range", () => {
    const scale = makeScale([0, 10], 0, 100);
    expect(scale.toPx(scale.min)).toBeCloseTo(0);
    expect(scale.toPx(scale.max)).toBeCloseTo(100);
    const mid = scale.toPx(5);
    expect(mid).toBeGreaterThan(0);
    expect(mid).toBeLessThan(100);
  });

  it("widens a degenerate range", () => {
    const scale = makeScale([4, 4], 0, 100);
    expect(scale.max).toBeGreaterThan(scale.min);
    expect(Number.isFinite(scale.toPx(4))).toBe(true);
  });
});

describe("frontierSvg", () => {
  it("is deterministic for a fixed fixture", () => {
    expect(frontierSvg(POINTS, 1)).toBe(frontierSvg(POINTS, 1));
  });

  it("renders one circle per point and marks the selection", () => {
    const svg = frontierSvg(POINTS, 2);
    expect(svg.match(/<circle/g)).toHaveLength(3);
    expect(svg.match(/class="dot selected"/g)).toHaveLength(1);
    expect(svg).toContain('data-index="2"');
  });

  it("draws the tangency line only when a point is selected", () => {
    expect(frontierSvg(POINTS, null)).not.toContain("tangency");
    expect(frontierSvg(POINTS, 0)).toContain("tangency");
  });

  it("shows an empty-state message without points", () => {
    expect(frontierSvg([], null)).toContain("no frontier yet");
  });

  it("places dots at data-proportional positions", () => {
    const svg = frontierSvg(POINTS, null);
    const cxs = [...svg.matchAll(/cx="([\d.]+)"/g)].map((m) => Number(m[1]));
    // costs 1.7, 1.6, 1.5 -> strictly decreasing x positions
    expect(cxs[0]).toBeGreaterThan(cxs[1]);
    expect(cxs[1]).toBeGreaterThan(cxs[2]);
  });
});

describe("demandSvg", () => {
  it("draws a right-continuous staircase", () => {
    const svg = demandSvg([
      { price_cents: 0.1, quantity: 5 },
      { price_cents: 0.3, quantity: 5 },
      { price_cents: 30, quantity: 0 },
    ]);
    expect(svg).toContain('class="step"');
    const path = svg.match(/d="([^"]+)"/)![1];
    expect(path.startsWith("M ")).toBe(true);
    expect(path).toContain("H ");
    expect(path).toContain("V ");
  });

  it("handles the empty curve", () => {
    expect(demandSvg([])).toContain("no demand curve yet");
  });
});
