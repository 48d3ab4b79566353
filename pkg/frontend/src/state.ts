/** Single source of truth for everything the view renders. */

import type { MetricsMessage } from "./protocol.js";

export type ConnectionStatus =
  | "disconnected"
  | "connecting"
  | "connected"
  | "error";

/** Selectable player modes, mapped to server config fields. */
export const MODES: Record<string, { mode: string; label: string }> = {
  "afc-follower": { mode: "afc", label: "VP follower (adaptive)" },
  "opc-follower": { mode: "opc-follower", label: "VP follower (optimal)" },
  "opc-leader": { mode: "opc-leader", label: "VP leader (optimal)" },
};

export interface UiState {
  connection: ConnectionStatus;
  statusMessage: string;
  modeKey: keyof typeof MODES;
  thetaP: number;
  tickPeriod: number | null;
  humanX: number;
  vpX: number | null;
  metrics: MetricsMessage | null;
}

export function initialState(): UiState {
  return {
    connection: "disconnected",
    statusMessage: "",
    modeKey: "opc-follower",
    thetaP: 0.9,
    tickPeriod: null,
    humanX: 0,
    vpX: null,
    metrics: null,
  };
}

export type Listener = (state: UiState) => void;

export class UiStore {
  private state: UiState = initialState();
  private listeners: Listener[] = [];

  get(): UiState {
    return this.state;
  }

  patch(fields: Partial<UiState>): void {
    this.state = { ...this.state, ...fields };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((f) => f !== fn);
    };
  }
}
