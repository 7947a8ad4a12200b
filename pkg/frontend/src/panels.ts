/**
 * View models and HTML fragments for the explorer panels.
 *
 * Panels never recompute statistics: every displayed number is taken from
 * a service response verbatim, shown at 4 decimals with the exact wire
 * value in the tooltip.
 */

import { fourDecimals, fullPrecision } from "./format.js";
import type {
  ApiError,
  DecisionRecord,
  MetricName,
  OcResult,
  SensitivityRow,
} from "./schema.js";
import { METRIC_NAMES } from "./schema.js";

export interface MetricCell {
  name: string;
  display: string;
  tooltip: string;
}

export function metricCells(oc: OcResult): MetricCell[] {
  return METRIC_NAMES.map((name: MetricName) => ({
    name,
    display: fourDecimals(oc[name]),
    tooltip: fullPrecision(oc[name]),
  }));
}

export function renderMetricsPanel(oc: OcResult): string {
  const rows = metricCells(oc)
    .map((cell) =>
      `<tr><th>${cell.name}</th>` +
      `<td title="${cell.tooltip}">${cell.display}</td></tr>`)
    .join("");
  return `<table class="metrics">${rows}</table>`;
}

export interface CalibrationCell {
  scenario: string;
  target: string;
  feasible: boolean;
  cStar: { display: string; tooltip: string } | null;
  metrics: MetricCell[];
}

const ROW_METRICS = ["ft1e", "bt1e", "for", "bcp", "bp"] as const;

export function calibrationCells(rows: SensitivityRow[]): CalibrationCell[] {
  return rows.map((row) => ({
    scenario: row.scenario,
    target: `${row.target_metric} ≤ ${row.target_level}`,
    feasible: row.feasible,
    cStar: row.c_star === null
      ? null
      : { display: fourDecimals(row.c_star), tooltip: fullPrecision(row.c_star) },
    metrics: ROW_METRICS.map((name) => ({
      name,
      display: fourDecimals(row[name]),
      tooltip: fullPrecision(row[name]),
    })),
  }));
}

export function renderCalibrationTable(rows: SensitivityRow[]): string {
  if (!rows.length) {
    return `<p class="empty">Add a calibration target (ft1e, pid, or bt1e) ` +
      `to see calibrated thresholds.</p>`;
  }
  const header = "<tr><th>scenario</th><th>target</th><th>c*</th>" +
    ROW_METRICS.map((name) => `<th>${name}</th>`).join("") + "</tr>";
  const body = calibrationCells(rows)
    .map((cell) => {
      const cStar = cell.feasible && cell.cStar
        ? `<td title="${cell.cStar.tooltip}">${cell.cStar.display}</td>`
        : `<td><span class="badge infeasible">INFEASIBLE</span></td>`;
      const metrics = cell.metrics
        .map((m) => `<td title="${m.tooltip}">${m.display}</td>`)
        .join("");
      return `<tr><td>${cell.scenario}</td><td>${cell.target}</td>` +
        `${cStar}${metrics}</tr>`;
    })
    .join("");
  return `<table class="calibration">${header}${body}</table>`;
}

export interface DecisionView {
  posterior: string;
  posteriorTooltip: string;
  threshold: string;
  verdict: "SUCCESS" | "FAIL";
}

export function decisionView(record: DecisionRecord): DecisionView {
  return {
    posterior: fourDecimals(record.posterior_probability),
    posteriorTooltip: fullPrecision(record.posterior_probability),
    threshold: fourDecimals(record.threshold),
    verdict: record.success ? "SUCCESS" : "FAIL",
  };
}

export function renderDecisionPreview(record: DecisionRecord): string {
  const view = decisionView(record);
  const cls = view.verdict === "SUCCESS" ? "success" : "fail";
  return `<p class="decision">posterior ` +
    `<b title="${view.posteriorTooltip}">${view.posterior}</b> vs threshold ` +
    `<b>${view.threshold}</b>: <span class="badge ${cls}">${view.verdict}</span></p>`;
}

export function renderErrorPanel(error: ApiError): string {
  const details = error.details.length
    ? `<ul>${error.details.map((d) => `<li>${d}</li>`).join("")}</ul>`
    : "";
  return `<div class="error-panel"><b>${error.code}</b>: ${error.message}` +
    `${details}</div>`;
}

export function renderPendingPanel(): string {
  return `<div class="pending">computing…</div>`;
}
