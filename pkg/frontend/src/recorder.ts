/**
 * Trial recorder: accumulates one record per server tick and renders
 * the session-log file format (a JSON header line followed by one JSON
 * record per line) so a downloaded trial can be fed straight back to
 * the command-line `metrics` command.
 */

import type { ConfigMessage, VpMessage } from "./protocol.js";

export interface TrialRecord {
  t: number;
  hp_x: number;
  hp_v_hat: number;
  vp_x: number;
  vp_v: number;
}

export class TrialRecorder {
  private header: Record<string, unknown> | null = null;
  private records: TrialRecord[] = [];
  private tick = 0.0;
  private lastHuman = 0;
  private prevHuman: number | null = null;

  /** Start a fresh trial from the server's config echo. */
  reset(echo: ConfigMessage): void {
    const { type, t, ...config } = echo;
    void type;
    void t;
    this.header = {
      engine_version: echo.engine_version ?? "unknown",
      config,
      live: true,
      client: "browser-ui",
    };
    this.records = [];
    this.tick = echo.T;
    this.lastHuman = 0;
    this.prevHuman = null;
  }

  /** Note the human position currently shown (held across dropouts). */
  noteHuman(x: number): void {
    this.lastHuman = x;
  }

  /** One record per vp message, with the human sample held at its side. */
  addVp(msg: VpMessage): void {
    if (this.header === null) return;
    const previous = this.prevHuman ?? this.lastHuman;
    const vHat = this.tick > 0 ? (this.lastHuman - previous) / this.tick : 0;
    this.prevHuman = this.lastHuman;
    this.records.push({
      t: msg.t,
      hp_x: this.lastHuman,
      hp_v_hat: vHat,
      vp_x: msg.x,
      vp_v: msg.v,
    });
  }

  get length(): number {
    return this.records.length;
  }

  get started(): boolean {
    return this.header !== null;
  }

  toJsonl(): string {
    if (this.header === null) {
      throw new Error("no trial recorded yet");
    }
    const lines = [JSON.stringify({ header: this.header })];
    for (const rec of this.records) lines.push(JSON.stringify(rec));
    return lines.join("\n") + "\n";
  }
}
