/**
 * Thin client for the calculation service.
 *
 * One in-flight request per endpoint: starting a new request aborts the
 * previous one (newest wins), so a slow older response can never land on
 * top of a newer one.
 */

import type {
  ApiError,
  CurvePoint,
  DecisionRecord,
  DesignSpec,
  OcResult,
  SensitivityRow,
} from "./schema.js";
import { specBody } from "./schema.js";

export class ServiceError extends Error {
  readonly error: ApiError;
  readonly status: number;

  constructor(status: number, error: ApiError) {
    super(error.message);
    this.status = status;
    this.error = error;
  }
}

export interface TargetInput {
  metric: "ft1e" | "pid" | "bt1e";
  level: number;
}

export interface ScenarioInput {
  name: string;
  prior: Record<string, unknown>;
}

type EndpointKey = "oc" | "curve" | "calibrate" | "decide" | "presets";

export class ApiClient {
  private readonly base: string;
  private readonly controllers = new Map<EndpointKey, AbortController>();

  constructor(base = "") {
    this.base = base.replace(/\/$/, "");
  }

  private async request<T>(key: EndpointKey, path: string,
                           body?: unknown): Promise<T> {
    this.controllers.get(key)?.abort();
    const controller = new AbortController();
    this.controllers.set(key, controller);
    const response = await fetch(`${this.base}${path}`, {
      method: body === undefined ? "GET" : "POST",
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
      signal: controller.signal,
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ServiceError(response.status, payload as ApiError);
    }
    return payload as T;
  }

  oc(spec: DesignSpec): Promise<OcResult> {
    return this.request("oc", "/api/v1/oc", specBody(spec));
  }

  curve(spec: DesignSpec, cGrid: number[]): Promise<CurvePoint[]> {
    return this.request("curve", "/api/v1/curve",
                        { spec: specBody(spec), c_grid: cGrid });
  }

  calibrate(spec: DesignSpec, targets: TargetInput[],
            scenarios?: ScenarioInput[]): Promise<SensitivityRow[]> {
    const body: Record<string, unknown> = { spec: specBody(spec), targets };
    if (scenarios && scenarios.length) body.scenarios = scenarios;
    return this.request("calibrate", "/api/v1/calibrate", body);
  }

  decide(spec: DesignSpec, observed: Record<string, number>): Promise<DecisionRecord> {
    return this.request("decide", "/api/v1/decide",
                        { spec: specBody(spec), observed });
  }

  listPresets(): Promise<{ presets: string[] }> {
    return this.request("presets", "/api/v1/presets");
  }

  preset(name: string): Promise<Record<string, unknown>> {
    return this.request("presets", `/api/v1/presets/${name}`);
  }
}

/** Trailing-edge debounce used for slider drags (300 ms per design). */
export function debounce<A extends unknown[]>(fn: (...args: A) => void,
                                              delayMs = 300): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) clearTimeout(handle);
    handle = setTimeout(() => fn(...args), delayMs);
  };
}
