// SVG chart construction as pure string builders: deterministic output for a
// fixed input, so rendering is testable without a DOM.

import type { DemandPoint, FrontierPointData } from "./types.js";

export interface Scale {
  min: number;
  max: number;
  toPx: (value: number) => number;
}

const WIDTH = 520;
const HEIGHT = 360;
const PAD = 44;

function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

export function makeScale(
  values: number[],
  pxLo: number,
  pxHi: number,
): Scale {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (!Number.isFinite(min) || !Number.isFinite(max)) {
    min = 0;
    max = 1;
  }
  if (max === min) {
    const span = Math.abs(max) || 1;
    min -= span * 0.2;
    max += span * 0.2;
  }
  const margin = (max - min) * 0.08;
  min -= margin;
  max += margin;
  const toPx = (value: number) =>
    pxLo + ((value - min) / (max - min)) * (pxHi - pxLo);
  return { min, max, toPx };
}

function axisTicks(scale: Scale, count = 5): number[] {
  const ticks: number[] = [];
  for (let i = 0; i <= count; i++) {
    ticks.push(scale.min + ((scale.max - scale.min) * i) / count);
  }
  return ticks;
}

// Cost on x (cents), area on y (mm^2); the tangency iso-objective line
// K*cost + area = value is drawn through the selected point.
export function frontierSvg(
  points: FrontierPointData[],
  selected: number | null,
): string {
  if (points.length === 0) {
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">` +
      `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" class="empty">no frontier yet</text></svg>`;
  }
  const xs = makeScale(points.map((p) => p.total_cost_cents), PAD, WIDTH - 12);
  const ys = makeScale(points.map((p) => p.total_area_mm2), HEIGHT - PAD, 14);

  const bits: string[] = [];
  bits.push(`<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">`);
  bits.push(
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - 12}" y2="${HEIGHT - PAD}" class="axis"/>`,
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${PAD}" y2="14" class="axis"/>`,
  );
  for (const tick of axisTicks(xs)) {
    const x = xs.toPx(tick);
    bits.push(
      `<text x="${fmt(x)}" y="${HEIGHT - PAD + 16}" class="tick">${fmt(tick)}</text>`,
    );
  }
  for (const tick of axisTicks(ys)) {
    const y = ys.toPx(tick);
    bits.push(`<text x="${PAD - 6}" y="${fmt(y)}" class="tick yt">${fmt(tick)}</text>`);
  }
  bits.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 6}" class="label">total cost (cents)</text>`,
    `<text x="12" y="${HEIGHT / 2}" class="label vertical" transform="rotate(-90 12 ${HEIGHT / 2})">total area (mm&#178;)</text>`,
  );

  if (selected !== null && points[selected]) {
    const t = points[selected].tangency;
    // area = value - K*cost, clipped to the drawable cost range
    const y1 = t.value - t.k * xs.min;
    const y2 = t.value - t.k * xs.max;
    bits.push(
      `<line x1="${fmt(xs.toPx(xs.min))}" y1="${fmt(ys.toPx(y1))}" ` +
        `x2="${fmt(xs.toPx(xs.max))}" y2="${fmt(ys.toPx(y2))}" class="tangency"/>`,
    );
  }

  points.forEach((p, index) => {
    const cls = index === selected ? "dot selected" : "dot";
    bits.push(
      `<circle data-index="${index}" cx="${fmt(xs.toPx(p.total_cost_cents))}" ` +
        `cy="${fmt(ys.toPx(p.total_area_mm2))}" r="${index === selected ? 7 : 5}" ` +
        `class="${cls}"><title>K=${fmt(p.k)} cost=${fmt(p.total_cost_cents)} ` +
        `area=${fmt(p.total_area_mm2)}</title></circle>`,
    );
  });
  bits.push("</svg>");
  return bits.join("");
}

// Read-only demand step plot: price on x, quantity held right-continuously.
export function demandSvg(points: DemandPoint[]): string {
  if (points.length === 0) {
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">` +
      `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" class="empty">no demand curve yet</text></svg>`;
  }
  const xs = makeScale(points.map((p) => p.price_cents), PAD, WIDTH - 12);
  const ys = makeScale([0, ...points.map((p) => p.quantity)], HEIGHT - PAD, 14);
  const path: string[] = [];
  points.forEach((p, i) => {
    const x = xs.toPx(p.price_cents);
    const y = ys.toPx(p.quantity);
    if (i === 0) {
      path.push(`M ${fmt(x)} ${fmt(y)}`);
    } else {
      path.push(`H ${fmt(x)}`, `V ${fmt(y)}`);
    }
  });
  const bits = [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">`,
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - 12}" y2="${HEIGHT - PAD}" class="axis"/>`,
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${PAD}" y2="14" class="axis"/>`,
    `<path d="${path.join(" ")}" class="step"/>`,
  ];
  for (const p of points) {
    bits.push(
      `<circle cx="${fmt(xs.toPx(p.price_cents))}" cy="${fmt(ys.toPx(p.quantity))}" r="4" class="dot"/>`,
    );
  }
  bits.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 6}" class="label">unit price (cents)</text>`,
    `<text x="12" y="${HEIGHT / 2}" class="label vertical" transform="rotate(-90 12 ${HEIGHT / 2})">quantity</text>`,
    "</svg>",
  );
  return bits.join("");
}
