/** Numeric display: 4 decimals in panels, full precision in tooltips. */

import { pyFloat } from "./schema.js";

export function fourDecimals(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return "--";
  return value.toFixed(4);
}

/** Full-precision text identical to the service's JSON rendering (every
 * numeric field in a response is a float on the wire, so 1 renders "1.0"). */
export function fullPrecision(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return "undefined";
  return pyFloat(value);
}

export function percent(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return "--";
  return `${(100 * value).toFixed(2)}%`;
}
