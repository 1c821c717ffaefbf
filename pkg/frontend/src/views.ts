// Pure HTML fragments for the result panels. Every number shown comes
// straight from an API payload; formatting only.

import type {
  ErrorPayload,
  FrontierPointData,
  SolveResponse,
} from "./types.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function num(value: number): string {
  return Number(value.toPrecision(8)).toString();
}

export function solutionView(solution: SolveResponse): string {
  const counts = Object.entries(solution.counts);
  const countRows = counts.length
    ? counts
        .map(([id, n]) => `<tr><td>${esc(id)}</td><td>${n}</td></tr>`)
        .join("")
    : `<tr><td colspan="2">empty selection</td></tr>`;
  const slackRows = solution.report.rows
    .map(
      (row) =>
        `<tr class="${row.satisfied ? "ok" : "bad"}"><td>${esc(row.label)}</td>` +
        `<td>${num(row.achieved)}</td><td>${num(row.rhs)}</td>` +
        `<td>${num(row.slack)}</td></tr>`,
    )
    .join("");
  return `
    <div class="summary">
      <span class="stat">objective <b data-role="objective">${num(solution.objective)}</b></span>
      <span class="stat">cost <b>${num(solution.report.total_cost_cents)}</b> &#162;</span>
      <span class="stat">area <b>${num(solution.report.total_area_mm2)}</b> mm&#178;</span>
      <span class="stat">nodes <b>${solution.solver.nodes_explored}</b></span>
    </div>
    <table class="counts"><thead><tr><th>part</th><th>count</th></tr></thead>
      <tbody>${countRows}</tbody></table>
    <table class="slack"><thead>
      <tr><th>constraint</th><th>achieved</th><th>required</th><th>slack</th></tr>
    </thead><tbody>${slackRows}</tbody></table>`;
}

export function pointDetailView(point: FrontierPointData): string {
  const counts = Object.entries(point.counts)
    .map(([id, n]) => `<tr><td>${esc(id)}</td><td>${n}</td></tr>`)
    .join("");
  return `
    <div class="summary">
      <span class="stat">K <b>${num(point.k)}</b></span>
      <span class="stat">objective <b>${num(point.objective)}</b></span>
      <span class="stat">${point.unique_parts} unique / ${point.total_parts} total parts</span>
    </div>
    <table class="counts"><thead><tr><th>part</th><th>count</th></tr></thead>
      <tbody>${counts}</tbody></table>`;
}

// API error payloads are shown verbatim so nothing gets lost in translation.
export function errorView(status: number, payload: ErrorPayload | null): string {
  const raw = payload ? JSON.stringify(payload, null, 2) : "(no body)";
  const kind = payload?.error?.code === "infeasible" ? "infeasible" : "error";
  return `
    <div class="banner ${kind}" data-role="banner" data-code="${esc(
      payload?.error?.code ?? "unknown",
    )}">
      <b>${kind === "infeasible" ? "Infeasible" : `Request failed (${status})`}</b>
      <pre>${esc(raw)}</pre>
    </div>`;
}

export function fieldErrorsView(errors: { field: string; message: string }[]): string {
  if (errors.length === 0) return "";
  const items = errors
    .map((e) => `<li><code>${esc(e.field)}</code> ${esc(e.message)}</li>`)
    .join("");
  return `<div class="banner invalid" data-role="field-errors"><ul>${items}</ul></div>`;
}
