/**
 * SVG chart for the six operating characteristics across thresholds.
 *
 * Continuous and time-to-event curves are drawn as polylines; binary
 * endpoints are drawn as right-continuous staircases (step-after, no
 * interpolation across jumps). Error-rate and power panels carry their
 * reference levels (0.025 and 0.80) as horizontal dashed lines, plus a
 * vertical marker at c = 0.975.
 */

import type { CurvePoint, MetricName } from "./schema.js";

export const SERIES: { name: MetricName; label: string; color: string }[] = [
  { name: "bp", label: "BP", color: "#1f77b4" },
  { name: "bcp", label: "BCP", color: "#2ca02c" },
  { name: "bt1e", label: "BT1E", color: "#d62728" },
  { name: "ft1e", label: "FT1E", color: "#ff7f0e" },
  { name: "pid", label: "PID", color: "#9467bd" },
  { name: "for", label: "FOR", color: "#8c564b" },
];

export interface ChartLayout {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_LAYOUT: ChartLayout = { width: 640, height: 360, padding: 40 };

export const ERROR_REFERENCE = 0.025;
export const POWER_REFERENCE = 0.8;
export const THRESHOLD_MARKER = 0.975;

function xScale(layout: ChartLayout, cMin: number, cMax: number) {
  const inner = layout.width - 2 * layout.padding;
  return (c: number) => layout.padding + ((c - cMin) / (cMax - cMin)) * inner;
}

function yScale(layout: ChartLayout) {
  const inner = layout.height - 2 * layout.padding;
  return (v: number) => layout.height - layout.padding - v * inner;
}

/** Path data for one metric; staircase mode emits only axis-aligned steps. */
export function metricPath(points: CurvePoint[], name: MetricName,
                           layout: ChartLayout, staircase: boolean): string {
  if (!points.length) return "";
  const cMin = points[0].c;
  const cMax = points[points.length - 1].c;
  const sx = xScale(layout, cMin, cMax);
  const sy = yScale(layout);
  const parts: string[] = [];
  let lastY: number | null = null;
  for (const point of points) {
    const value = point[name];
    if (value === null || Number.isNaN(value)) {
      lastY = null;
      continue;
    }
    const x = sx(point.c);
    const y = sy(value);
    if (lastY === null) {
      parts.push(`M ${x.toFixed(2)} ${y.toFixed(2)}`);
    } else if (staircase) {
      // hold the previous level to this c, then jump vertically
      parts.push(`H ${x.toFixed(2)}`);
      if (y !== lastY) parts.push(`V ${y.toFixed(2)}`);
    } else {
      parts.push(`L ${x.toFixed(2)} ${y.toFixed(2)}`);
    }
    lastY = y;
  }
  return parts.join(" ");
}

function dashedLine(x1: number, y1: number, x2: number, y2: number,
                    label: string): string {
  return `<line class="reference" data-label="${label}" x1="${x1.toFixed(2)}" ` +
    `y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" y2="${y2.toFixed(2)}" ` +
    `stroke="#666" stroke-width="1" stroke-dasharray="4,3"/>`;
}

export interface ChartOptions {
  staircase: boolean;
  layout?: ChartLayout;
  marker?: number;
}

/** Full SVG document for a curve response. */
export function renderCurveChart(points: CurvePoint[],
                                 options: ChartOptions): string {
  const layout = options.layout ?? DEFAULT_LAYOUT;
  const marker = options.marker ?? THRESHOLD_MARKER;
  if (!points.length) {
    return `<svg width="${layout.width}" height="${layout.height}"></svg>`;
  }
  const cMin = points[0].c;
  const cMax = points[points.length - 1].c;
  const sx = xScale(layout, cMin, cMax);
  const sy = yScale(layout);
  const pieces: string[] = [
    `<svg width="${layout.width}" height="${layout.height}" ` +
    `viewBox="0 0 ${layout.width} ${layout.height}" ` +
    `xmlns="http://www.w3.org/2000/svg">`,
    `<rect x="${layout.padding}" y="${layout.padding}" ` +
    `width="${layout.width - 2 * layout.padding}" ` +
    `height="${layout.height - 2 * layout.padding}" fill="none" stroke="#bbb"/>`,
    dashedLine(layout.padding, sy(ERROR_REFERENCE),
               layout.width - layout.padding, sy(ERROR_REFERENCE), "error-reference"),
    dashedLine(layout.padding, sy(POWER_REFERENCE),
               layout.width - layout.padding, sy(POWER_REFERENCE), "power-reference"),
  ];
  if (cMin <= marker && marker <= cMax) {
    pieces.push(dashedLine(sx(marker), layout.padding, sx(marker),
                           layout.height - layout.padding, "threshold-marker"));
  }
  for (const series of SERIES) {
    const path = metricPath(points, series.name, layout, options.staircase);
    if (!path) continue;
    pieces.push(
      `<path class="series" data-metric="${series.name}" d="${path}" ` +
      `fill="none" stroke="${series.color}" stroke-width="1.6"/>`);
  }
  const legendY = layout.padding / 2;
  pieces.push(...SERIES.map((series, index) =>
    `<text x="${layout.padding + index * 90}" y="${legendY}" ` +
    `fill="${series.color}" font-size="12">${series.label}</text>`));
  pieces.push("</svg>");
  return pieces.join("");
}
