/**
 * Live-play client logic, transport- and DOM-agnostic.
 *
 * The client never computes player dynamics: the only path to the
 * renderer is the `renderVp` callback, invoked with the exact payload
 * of each server vp message. Pointer input is rate-limited to at most
 * one hp message per animation frame, with strictly increasing client
 * timestamps. A new configuration is applied by sending a fresh config
 * frame and waiting for the server's echo (a full session restart).
 */

import { clampPosition } from "./mapping.js";
import {
  ConfigMessage,
  ConfigRequest,
  ErrorMessage,
  MetricsMessage,
  ProtocolError,
  VpMessage,
  parseServerMessage,
  serializeConfig,
  serializeHp,
} from "./protocol.js";
import { TrialRecorder } from "./recorder.js";
import { UiStore } from "./state.js";

/** Minimal socket surface shared by browser WebSocket and ws. */
type Handler = ((ev: any) => void) | null;

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: Handler;
  onmessage: Handler;
  onclose: Handler;
  onerror: Handler;
}

export interface ClientOptions {
  url: string;
  socketFactory: (url: string) => SocketLike;
  renderVp: (msg: VpMessage) => void;
  store: UiStore;
  recorder?: TrialRecorder;
  /** wall clock in milliseconds; injectable for tests */
  now?: () => number;
  onError?: (message: string) => void;
}

interface PendingHandshake {
  resolve: (echo: ConfigMessage) => void;
  reject: (err: Error) => void;
}

export class GameClient {
  readonly recorder: TrialRecorder;
  private readonly options: ClientOptions;
  private readonly now: () => number;
  private socket: SocketLike | null = null;
  private handshake: PendingHandshake | null = null;
  private epochMs: number | null = null;
  private pendingPointer: number | null = null;
  private lastSentT = -Infinity;

  constructor(options: ClientOptions) {
    this.options = options;
    this.recorder = options.recorder ?? new TrialRecorder();
    this.now = options.now ?? (() => Date.now());
  }

  /** Open the connection and perform the config handshake. */
  connect(config: ConfigRequest): Promise<ConfigMessage> {
    if (this.socket !== null) throw new Error("already connected");
    this.options.store.patch({ connection: "connecting" });
    const socket = this.options.socketFactory(this.options.url);
    this.socket = socket;
    const echoPromise = this.expectEcho();
    socket.onopen = () => socket.send(serializeConfig(config));
    socket.onmessage = (ev) => this.handleFrame(String(ev.data));
    socket.onclose = () => this.handleClose("connection closed");
    socket.onerror = () => this.handleClose("connection error");
    return echoPromise;
  }

  /**
   * Apply new parameters by restarting the session: send a fresh config
   * frame and resolve on the server's new handshake echo.
   */
  switchConfig(config: ConfigRequest): Promise<ConfigMessage> {
    if (this.socket === null) throw new Error("not connected");
    const echoPromise = this.expectEcho();
    this.socket.send(serializeConfig(config));
    return echoPromise;
  }

  /** Latest pointer position; only the newest value per frame is kept. */
  pointerInput(x: number): void {
    this.pendingPointer = clampPosition(x);
  }

  /**
   * Per-animation-frame hook: sends at most one hp message, carrying a
   * strictly increasing client timestamp. (In leader mode the samples
   * still flow — they keep the session alive and are logged — but the
   * server's weighting means they no longer drive the virtual player.)
   */
  frame(): boolean {
    if (
      this.socket === null ||
      this.pendingPointer === null ||
      this.handshake !== null
    ) {
      return false;
    }
    const x = this.pendingPointer;
    this.pendingPointer = null;
    if (this.epochMs === null) this.epochMs = this.now();
    let t = (this.now() - this.epochMs) / 1000;
    if (t <= this.lastSentT) t = this.lastSentT + 1e-6;
    this.lastSentT = t;
    this.socket.send(serializeHp(t, x));
    this.recorder.noteHuman(x);
    this.options.store.patch({ humanX: x });
    return true;
  }

  disconnect(): void {
    const socket = this.socket;
    this.socket = null;
    if (socket !== null) socket.close();
    this.options.store.patch({ connection: "disconnected" });
  }

  private expectEcho(): Promise<ConfigMessage> {
    if (this.handshake !== null) {
      this.handshake.reject(new Error("superseded by a newer config"));
    }
    return new Promise((resolve, reject) => {
      this.handshake = { resolve, reject };
    });
  }

  private handleFrame(text: string): void {
    let msg;
    try {
      msg = parseServerMessage(text);
    } catch (exc) {
      if (exc instanceof ProtocolError) {
        this.reportError(`bad server frame: ${exc.message}`);
        return;
      }
      throw exc;
    }
    switch (msg.type) {
      case "config":
        this.handleEcho(msg);
        break;
      case "vp":
        this.handleVp(msg);
        break;
      case "metrics":
        this.handleMetrics(msg);
        break;
      case "error":
        this.reportError(msg.message);
        break;
    }
  }

  private handleEcho(echo: ConfigMessage): void {
    this.recorder.reset(echo);
    this.options.store.patch({
      connection: "connected",
      statusMessage: "",
      tickPeriod: echo.T,
      vpX: null,
      metrics: null,
    });
    const pending = this.handshake;
    this.handshake = null;
    if (pending !== null) pending.resolve(echo);
  }

  private handleVp(msg: VpMessage): void {
    // render first, with the message payload untouched
    this.options.renderVp(msg);
    this.recorder.addVp(msg);
    this.options.store.patch({ vpX: msg.x });
  }

  private handleMetrics(msg: MetricsMessage): void {
    this.options.store.patch({ metrics: msg });
  }

  private reportError(message: string): void {
    this.options.store.patch({ connection: "error", statusMessage: message });
    if (this.options.onError) this.options.onError(message);
  }

  private handleClose(reason: string): void {
    if (this.socket === null) return; // deliberate disconnect
    this.socket = null;
    const pending = this.handshake;
    this.handshake = null;
    if (pending !== null) pending.reject(new Error(reason));
    this.options.store.patch({
      connection: "disconnected",
      statusMessage: reason,
    });
  }
}

export type { ConfigMessage, VpMessage, MetricsMessage, ErrorMessage };
