/**
 * Explorer state: the edited spec, calibration targets, scenarios, and the
 * last completed response per panel.
 *
 * Every spec edit bumps a version counter. Responses are stored together
 * with the version they were requested for, and a panel only ever renders
 * a response whose version matches the current spec (no stale mixing);
 * anything older is dropped on arrival.
 */

import type {
  CurvePoint,
  DecisionRecord,
  DesignSpec,
  OcResult,
  SensitivityRow,
  ApiError,
} from "./schema.js";
import type { ScenarioInput, TargetInput } from "./api.js";

export type PanelKey = "oc" | "curve" | "calibrate" | "decide";

interface Slot<T> {
  version: number;
  payload: T | null;
  error: ApiError | null;
}

export interface PanelView<T> {
  /** Response payload, present only when it matches the current spec. */
  payload: T | null;
  error: ApiError | null;
  pending: boolean;
}

interface RequestTicket {
  token: number;
  specVersion: number;
}

export class ExplorerStore {
  private version = 0;
  private requestCounter = 0;
  private spec_: DesignSpec;
  private slots: Map<PanelKey, Slot<unknown>> = new Map();
  private inFlight: Map<PanelKey, RequestTicket> = new Map();
  private listeners: (() => void)[] = [];

  targets: TargetInput[] = [];
  scenarios: ScenarioInput[] = [];
  observed: Record<string, number> = {};

  constructor(spec: DesignSpec) {
    this.spec_ = spec;
  }

  get spec(): DesignSpec {
    return this.spec_;
  }

  get specVersion(): number {
    return this.version;
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Replace the spec (an edit): invalidates every displayed result. */
  setSpec(next: DesignSpec): void {
    this.spec_ = next;
    this.version += 1;
    this.notify();
  }

  edit(mutate: (spec: DesignSpec) => DesignSpec): void {
    this.setSpec(mutate(this.spec_));
  }

  /** Mark a request as started for the current spec; returns the request
   * token (newer tokens supersede older ones per panel). */
  beginRequest(panel: PanelKey): number {
    this.requestCounter += 1;
    this.inFlight.set(panel, {
      token: this.requestCounter,
      specVersion: this.version,
    });
    this.notify();
    return this.requestCounter;
  }

  /** Deliver a response; ignored unless it is the newest request for the
   * panel (older responses must never overwrite newer ones). */
  completeRequest<T>(panel: PanelKey, token: number, payload: T): void {
    const ticket = this.inFlight.get(panel);
    if (!ticket || ticket.token !== token) return;
    this.inFlight.delete(panel);
    this.slots.set(panel, { version: ticket.specVersion, payload, error: null });
    this.notify();
  }

  failRequest(panel: PanelKey, token: number, error: ApiError): void {
    const ticket = this.inFlight.get(panel);
    if (!ticket || ticket.token !== token) return;
    this.inFlight.delete(panel);
    this.slots.set(panel, { version: ticket.specVersion, payload: null, error });
    this.notify();
  }

  private view<T>(panel: PanelKey): PanelView<T> {
    const slot = this.slots.get(panel) as Slot<T> | undefined;
    const pending = this.inFlight.has(panel);
    if (!slot || slot.version !== this.version) {
      return { payload: null, error: null, pending };
    }
    return { payload: slot.payload, error: slot.error, pending };
  }

  ocView(): PanelView<OcResult> {
    return this.view("oc");
  }

  curveView(): PanelView<CurvePoint[]> {
    return this.view("curve");
  }

  calibrateView(): PanelView<SensitivityRow[]> {
    return this.view("calibrate");
  }

  decideView(): PanelView<DecisionRecord> {
    return this.view("decide");
  }
}
