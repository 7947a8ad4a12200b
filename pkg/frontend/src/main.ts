/**
 * Browser bootstrap: wires the controls, the store, and the service client.
 *
 * All statistics arrive from the service; this file only moves values
 * between inputs, requests, and the render functions.
 */

import { ApiClient, debounce, ServiceError } from "./api.js";
import { renderCurveChart } from "./chart.js";
import {
  renderCalibrationTable,
  renderDecisionPreview,
  renderErrorPanel,
  renderMetricsPanel,
  renderPendingPanel,
} from "./panels.js";
import type { ApiError, DesignSpec } from "./schema.js";
import { parseSpec, serializeSpec } from "./schema.js";
import { ExplorerStore } from "./state.js";

const CURVE_STEPS = 99;
const C_MIN = 0.5;
const C_MAX = 0.995;

function curveGrid(): number[] {
  const grid: number[] = [];
  for (let i = 0; i < CURVE_STEPS; i += 1) {
    grid.push(C_MIN + ((C_MAX - C_MIN) * i) / (CURVE_STEPS - 1));
  }
  return grid;
}

function toApiError(err: unknown): ApiError {
  if (err instanceof ServiceError) return err.error;
  if (err instanceof DOMException && err.name === "AbortError") {
    return { code: "numeric", message: "superseded", details: [] };
  }
  return { code: "numeric", message: String(err), details: [] };
}

function isBinary(spec: DesignSpec): boolean {
  return spec.endpoint === "binary_single" || spec.endpoint === "binary_two_arm";
}

export function startExplorer(root: Document): void {
  const client = new ApiClient("");
  let store: ExplorerStore | null = null;

  const el = (id: string) => root.getElementById(id) as HTMLElement;

  function refreshAll(): void {
    if (!store) return;
    const current = store;
    const spec = current.spec;

    const ocVersion = current.beginRequest("oc");
    client.oc(spec).then(
      (payload) => current.completeRequest("oc", ocVersion, payload),
      (err) => current.failRequest("oc", ocVersion, toApiError(err)));

    const curveVersion = current.beginRequest("curve");
    client.curve(spec, curveGrid()).then(
      (payload) => current.completeRequest("curve", curveVersion, payload),
      (err) => current.failRequest("curve", curveVersion, toApiError(err)));

    if (current.targets.length) {
      const calVersion = current.beginRequest("calibrate");
      client.calibrate(spec, current.targets,
                       current.scenarios.length ? current.scenarios : undefined)
        .then((payload) => current.completeRequest("calibrate", calVersion, payload),
              (err) => current.failRequest("calibrate", calVersion, toApiError(err)));
    }

    if (Object.keys(current.observed).length) {
      const decVersion = current.beginRequest("decide");
      client.decide(spec, current.observed).then(
        (payload) => current.completeRequest("decide", decVersion, payload),
        (err) => current.failRequest("decide", decVersion, toApiError(err)));
    }
  }

  const refreshDebounced = debounce(refreshAll, 300);

  function render(): void {
    if (!store) return;
    const oc = store.ocView();
    el("metrics").innerHTML = oc.error
      ? renderErrorPanel(oc.error)
      : oc.payload
        ? renderMetricsPanel(oc.payload)
        : renderPendingPanel();

    const curve = store.curveView();
    el("chart").innerHTML = curve.error
      ? renderErrorPanel(curve.error)
      : curve.payload
        ? renderCurveChart(curve.payload, { staircase: isBinary(store.spec) })
        : renderPendingPanel();

    const calibration = store.calibrateView();
    el("calibration").innerHTML = calibration.error
      ? renderErrorPanel(calibration.error)
      : renderCalibrationTable(calibration.payload ?? []);

    const decision = store.decideView();
    el("decision").innerHTML = decision.error
      ? renderErrorPanel(decision.error)
      : decision.payload
        ? renderDecisionPreview(decision.payload)
        : "";

    (el("spec-json") as HTMLTextAreaElement).value = serializeSpec(store.spec);
  }

  function adoptSpec(spec: DesignSpec): void {
    if (!store) {
      store = new ExplorerStore(spec);
      store.subscribe(render);
    } else {
      store.setSpec(spec);
    }
    refreshAll();
    render();
  }

  async function loadPreset(name: string): Promise<void> {
    const doc = await client.preset(name);
    adoptSpec(parseSpec(doc));
  }

  client.listPresets().then(async ({ presets }) => {
    const picker = el("preset") as HTMLSelectElement;
    picker.innerHTML = presets
      .map((name) => `<option value="${name}">${name}</option>`)
      .join("");
    picker.value = presets.includes("culprit-shock") ? "culprit-shock" : presets[0];
    picker.addEventListener("change", () => void loadPreset(picker.value));
    await loadPreset(picker.value);
  });

  (el("threshold") as HTMLInputElement).addEventListener("input", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    store?.edit((spec) => ({ ...spec, rule: { ...spec.rule, c: value } }));
    refreshDebounced();
  });

  el("add-target").addEventListener("click", () => {
    if (!store) return;
    const metric = (el("target-metric") as HTMLSelectElement).value as
      "ft1e" | "pid" | "bt1e";
    const level = Number((el("target-level") as HTMLInputElement).value);
    if (!(level > 0 && level < 1)) return;
    store.targets.push({ metric, level });
    refreshAll();
  });

  el("apply-observed").addEventListener("click", () => {
    if (!store) return;
    const raw = (el("observed-json") as HTMLTextAreaElement).value;
    try {
      store.observed = JSON.parse(raw) as Record<string, number>;
    } catch {
      return;
    }
    refreshAll();
  });

  el("apply-spec").addEventListener("click", () => {
    const raw = (el("spec-json") as HTMLTextAreaElement).value;
    try {
      adoptSpec(parseSpec(JSON.parse(raw)));
    } catch {
      /* leave the last valid spec in place */
    }
  });
}

declare const document: Document | undefined;
if (typeof document !== "undefined") {
  startExplorer(document);
}
