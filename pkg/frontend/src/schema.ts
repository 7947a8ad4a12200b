/**
 * DesignSpec document schema shared with the calculation service.
 *
 * Serialization is byte-compatible with the backend's canonical JSON
 * (two-space indent, trailing newline, Python float repr), so a parsed
 * preset re-serializes to the exact bytes it came from and anything typed
 * into the controls produces a document the CLI accepts verbatim.
 */

export type Endpoint =
  | "continuous_single"
  | "continuous_two_arm"
  | "binary_single"
  | "binary_two_arm"
  | "tte";

export type Direction = "greater" | "less";
export type Benefit = "higher_rate" | "lower_rate";

export interface NormalPrior {
  kind: "normal";
  mean: number;
  sd: number;
}

export interface BetaPrior {
  kind: "beta";
  alpha: number;
  beta: number;
}

export type Prior = NormalPrior | BetaPrior;

export interface ArmPriors {
  t: BetaPrior;
  c: BetaPrior;
}

export interface DecisionRule {
  margin: number;
  c: number | null;
  direction: Direction;
}

export interface DesignSpec {
  endpoint: Endpoint;
  nT?: number;
  nC?: number;
  sigmaT?: number;
  sigmaC?: number;
  events?: number;
  allocation?: number;
  nullRate?: number;
  benefit?: Benefit;
  analysisPrior: Prior | ArmPriors;
  designPrior: Prior | ArmPriors;
  rule: DecisionRule;
}

export const METRIC_NAMES = ["bp", "bcp", "bt1e", "ft1e", "pid", "for", "gamma1"] as const;
export type MetricName = (typeof METRIC_NAMES)[number];

export type OcResult = Record<MetricName, number | null>;

export interface CurvePoint extends OcResult {
  c: number;
}

export interface SensitivityRow {
  scenario: string;
  target_metric: string;
  target_level: number;
  feasible: boolean;
  c_star: number | null;
  ft1e: number | null;
  bt1e: number | null;
  for: number | null;
  bcp: number | null;
  bp: number | null;
}

export interface DecisionRecord {
  posterior_probability: number;
  threshold: number;
  success: boolean;
}

export interface ApiError {
  code: "validation" | "infeasible" | "numeric" | "not_found";
  message: string;
  details: string[];
}

// ---------------------------------------------------------------------------
// Float formatting compatible with the backend's shortest-repr doubles
// ---------------------------------------------------------------------------

/** Shortest round-trip decimal for a double, matching Python's repr. */
export function pyFloat(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`cannot serialize non-finite number ${value}`);
  }
  if (Number.isInteger(value) && Math.abs(value) < 1e16) {
    return value.toFixed(1);
  }
  const text = String(value);
  const match = text.match(/^(-?[\d.]+)e([+-])(\d+)$/);
  if (match) {
    const exponent = match[3].padStart(2, "0");
    return `${match[1]}e${match[2]}${exponent}`;
  }
  return text;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

function fail(path: string, message: string): never {
  throw new Error(`${path}: ${message}`);
}

function requireNumber(value: unknown, path: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    fail(path, "must be a finite number");
  }
  return value;
}

function requireCount(value: unknown, path: string): number {
  const num = requireNumber(value, path);
  if (!Number.isInteger(num) || num < 1) fail(path, "must be a positive integer");
  return num;
}

function parsePrior(doc: unknown, path: string): Prior {
  if (typeof doc !== "object" || doc === null) fail(path, "must be an object");
  const record = doc as Record<string, unknown>;
  if (record.kind === "normal") {
    return {
      kind: "normal",
      mean: requireNumber(record.mean, `${path}.mean`),
      sd: requireNumber(record.sd, `${path}.sd`),
    };
  }
  if (record.kind === "beta") {
    return {
      kind: "beta",
      alpha: requireNumber(record.alpha, `${path}.alpha`),
      beta: requireNumber(record.beta, `${path}.beta`),
    };
  }
  fail(`${path}.kind`, "must be 'normal' or 'beta'");
}

function parsePriorField(doc: unknown, path: string): Prior | ArmPriors {
  if (typeof doc === "object" && doc !== null && ("t" in doc || "c" in doc)) {
    const record = doc as Record<string, unknown>;
    const t = parsePrior(record.t, `${path}.t`);
    const c = parsePrior(record.c, `${path}.c`);
    if (t.kind !== "beta" || c.kind !== "beta") {
      fail(path, "per-arm priors must both be beta");
    }
    return { t, c };
  }
  return parsePrior(doc, path);
}

export function isArmPriors(prior: Prior | ArmPriors): prior is ArmPriors {
  return !("kind" in prior);
}

export function parseSpec(doc: unknown): DesignSpec {
  if (typeof doc !== "object" || doc === null) fail("document", "must be an object");
  const record = doc as Record<string, unknown>;
  const endpoint = record.endpoint as Endpoint;
  const endpoints: Endpoint[] = [
    "continuous_single", "continuous_two_arm", "binary_single",
    "binary_two_arm", "tte",
  ];
  if (!endpoints.includes(endpoint)) fail("endpoint", "unknown endpoint");

  const ruleDoc = record.rule;
  if (typeof ruleDoc !== "object" || ruleDoc === null) fail("rule", "must be an object");
  const ruleRecord = ruleDoc as Record<string, unknown>;
  const direction = (ruleRecord.direction ?? "greater") as Direction;
  if (direction !== "greater" && direction !== "less") {
    fail("rule.direction", "must be 'greater' or 'less'");
  }
  const rule: DecisionRule = {
    margin: requireNumber(ruleRecord.margin, "rule.margin"),
    c: ruleRecord.c === undefined || ruleRecord.c === null
      ? null
      : requireNumber(ruleRecord.c, "rule.c"),
    direction,
  };

  const spec: DesignSpec = {
    endpoint,
    analysisPrior: parsePriorField(record.analysis_prior, "analysis_prior"),
    designPrior: parsePriorField(record.design_prior, "design_prior"),
    rule,
  };
  if (record.n_t !== undefined) spec.nT = requireCount(record.n_t, "n_t");
  if (record.n_c !== undefined) spec.nC = requireCount(record.n_c, "n_c");
  if (record.sigma_t !== undefined) spec.sigmaT = requireNumber(record.sigma_t, "sigma_t");
  if (record.sigma_c !== undefined) spec.sigmaC = requireNumber(record.sigma_c, "sigma_c");
  if (record.events !== undefined) spec.events = requireCount(record.events, "events");
  if (record.allocation !== undefined) {
    spec.allocation = requireNumber(record.allocation, "allocation");
  }
  if (record.null_rate !== undefined) {
    spec.nullRate = requireNumber(record.null_rate, "null_rate");
  }
  if (record.benefit !== undefined) {
    if (record.benefit !== "higher_rate" && record.benefit !== "lower_rate") {
      fail("benefit", "must be higher_rate or lower_rate");
    }
    spec.benefit = record.benefit;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Serialization (canonical, backend-identical)
// ---------------------------------------------------------------------------

type Token =
  | { kind: "int"; value: number }
  | { kind: "float"; value: number }
  | { kind: "str"; value: string }
  | { kind: "obj"; entries: [string, Token][] };

function priorToken(prior: Prior | ArmPriors): Token {
  if (isArmPriors(prior)) {
    return {
      kind: "obj",
      entries: [["t", priorToken(prior.t)], ["c", priorToken(prior.c)]],
    };
  }
  if (prior.kind === "normal") {
    return {
      kind: "obj",
      entries: [
        ["kind", { kind: "str", value: "normal" }],
        ["mean", { kind: "float", value: prior.mean }],
        ["sd", { kind: "float", value: prior.sd }],
      ],
    };
  }
  return {
    kind: "obj",
    entries: [
      ["kind", { kind: "str", value: "beta" }],
      ["alpha", { kind: "float", value: prior.alpha }],
      ["beta", { kind: "float", value: prior.beta }],
    ],
  };
}

function specToken(spec: DesignSpec): Token {
  const entries: [string, Token][] = [
    ["endpoint", { kind: "str", value: spec.endpoint }],
  ];
  const scalars: [string, number | string | undefined, "int" | "float" | "str"][] = [
    ["n_t", spec.nT, "int"],
    ["n_c", spec.nC, "int"],
    ["sigma_t", spec.sigmaT, "float"],
    ["sigma_c", spec.sigmaC, "float"],
    ["events", spec.events, "int"],
    ["allocation", spec.allocation, "float"],
    ["null_rate", spec.nullRate, "float"],
    ["benefit", spec.benefit, "str"],
  ];
  for (const [name, value, kind] of scalars) {
    if (value === undefined) continue;
    if (kind === "str") {
      entries.push([name, { kind: "str", value: value as string }]);
    } else {
      entries.push([name, { kind, value: value as number } as Token]);
    }
  }
  entries.push(["analysis_prior", priorToken(spec.analysisPrior)]);
  entries.push(["design_prior", priorToken(spec.designPrior)]);
  const ruleEntries: [string, Token][] = [
    ["margin", { kind: "float", value: spec.rule.margin }],
  ];
  if (spec.rule.c !== null) {
    ruleEntries.push(["c", { kind: "float", value: spec.rule.c }]);
  }
  ruleEntries.push(["direction", { kind: "str", value: spec.rule.direction }]);
  entries.push(["rule", { kind: "obj", entries: ruleEntries }]);
  return { kind: "obj", entries };
}

function renderToken(token: Token, indent: number): string {
  const pad = " ".repeat(indent);
  switch (token.kind) {
    case "int":
      return String(token.value);
    case "float":
      return pyFloat(token.value);
    case "str":
      return JSON.stringify(token.value);
    case "obj": {
      if (token.entries.length === 0) return "{}";
      const inner = token.entries
        .map(([key, value]) =>
          `${pad}  ${JSON.stringify(key)}: ${renderToken(value, indent + 2)}`)
        .join(",\n");
      return `{\n${inner}\n${pad}}`;
    }
  }
}

/** Canonical document bytes: what the CLI and service accept and emit. */
export function serializeSpec(spec: DesignSpec): string {
  return renderToken(specToken(spec), 0) + "\n";
}

/** The plain-object form used as a request body. */
export function specBody(spec: DesignSpec): Record<string, unknown> {
  return JSON.parse(serializeSpec(spec)) as Record<string, unknown>;
}
