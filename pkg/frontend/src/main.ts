/** Browser entry point: wires DOM, canvas, and the live client. */

import { GameClient } from "./client.js";
import { pointerToPosition } from "./mapping.js";
import type { ConfigRequest, VpMessage } from "./protocol.js";
import { ReplayLoadError, ReplayModel } from "./replay.js";
import { drawScene } from "./render.js";
import { MODES, UiStore } from "./state.js";

const PRESET_THETA_P: Record<string, number> = {
  "afc-follower": 0.9,
  "opc-follower": 0.9,
  "opc-leader": 0.1,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function buildConfig(modeKey: string, thetaP: number): ConfigRequest {
  const mode = MODES[modeKey].mode;
  if (mode === "afc") return { mode };
  // the theta_p slider overrides the preset by switching to the
  // explicit-weight mode; at the preset value the named mode is kept
  if (Math.abs(thetaP - PRESET_THETA_P[modeKey]) < 1e-9) return { mode };
  return { mode: "opc-custom", controller: { theta_p: thetaP } };
}

function setupLive(store: UiStore): void {
  const canvas = el<HTMLCanvasElement>("arena");
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("canvas 2d context unavailable");
  const urlInput = el<HTMLInputElement>("server-url");
  const modeSelect = el<HTMLSelectElement>("mode");
  const thetaSlider = el<HTMLInputElement>("theta-p");
  const thetaReadout = el<HTMLElement>("theta-p-value");
  const tickReadout = el<HTMLElement>("tick-period");
  const metricsReadout = el<HTMLElement>("metrics");
  const banner = el<HTMLElement>("banner");
  const connectBtn = el<HTMLButtonElement>("connect");
  const downloadBtn = el<HTMLButtonElement>("download");

  let latestVp: VpMessage | null = null;
  const client = new GameClient({
    url: urlInput.value,
    socketFactory: (url) => new WebSocket(url),
    renderVp: (msg) => {
      latestVp = msg;
    },
    store,
  });

  const applyConfig = () => {
    const config = buildConfig(modeSelect.value, Number(thetaSlider.value));
    const apply =
      store.get().connection === "connected" ||
      store.get().connection === "error"
        ? client.switchConfig(config)
        : client.connect(config);
    apply.catch((err: Error) =>
      store.patch({ connection: "error", statusMessage: err.message }),
    );
  };

  connectBtn.addEventListener("click", applyConfig);
  modeSelect.addEventListener("change", () => {
    thetaSlider.value = String(PRESET_THETA_P[modeSelect.value]);
    if (store.get().connection !== "disconnected") applyConfig();
  });
  thetaSlider.addEventListener("change", () => {
    if (store.get().connection !== "disconnected") applyConfig();
  });

  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    client.pointerInput(
      pointerToPosition(ev.clientX - rect.left, rect.width),
    );
  });

  downloadBtn.addEventListener("click", () => {
    if (!client.recorder.started) return;
    const blob = new Blob([client.recorder.toJsonl()], {
      type: "application/jsonl",
    });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = "trial.log";
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  });

  store.subscribe((state) => {
    thetaReadout.textContent = Number(thetaSlider.value).toFixed(2);
    tickReadout.textContent =
      state.tickPeriod === null ? "—" : `${(state.tickPeriod * 1000).toFixed(0)} ms`;
    const m = state.metrics;
    metricsReadout.textContent =
      m === null
        ? "—"
        : `RMS ${m.rms.toFixed(3)}` +
          (m.cv !== undefined ? `  CV ${m.cv.toFixed(3)}` : "") +
          (m.tl !== undefined ? `  TL ${m.tl.toFixed(2)} s` : "");
    banner.textContent =
      state.connection === "connected" ? "" : state.statusMessage;
    banner.style.display = banner.textContent ? "block" : "none";
    connectBtn.textContent =
      state.connection === "disconnected" ? "Connect" : "Restart";
  });

  const frame = () => {
    client.frame(); // at most one hp message per animation frame
    const state = store.get();
    drawScene(ctx, canvas.width, canvas.height, {
      humanX: state.humanX,
      vpX: latestVp === null ? null : latestVp.x,
      statusMessage: state.connection === "error" ? state.statusMessage : "",
    });
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

function setupReplay(): void {
  const canvas = el<HTMLCanvasElement>("replay-arena");
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("canvas 2d context unavailable");
  const fileInput = el<HTMLInputElement>("replay-file");
  const scrub = el<HTMLInputElement>("replay-scrub");
  const playBtn = el<HTMLButtonElement>("replay-play");
  const timeReadout = el<HTMLElement>("replay-time");
  const errorBox = el<HTMLElement>("replay-error");

  let model: ReplayModel | null = null;
  let lastFrameMs: number | null = null;

  const show = () => {
    if (model === null) return;
    const rec = model.current;
    drawScene(ctx, canvas.width, canvas.height, {
      humanX: rec.hp_x,
      vpX: rec.vp_x,
    });
    timeReadout.textContent = `${rec.t.toFixed(2)} s`;
    scrub.value = String(
      model.duration > 0 ? (rec.t - model.startTime) / model.duration : 0,
    );
    playBtn.textContent = model.isPlaying ? "Pause" : "Play";
  };

  fileInput.addEventListener("change", async () => {
    errorBox.textContent = "";
    const file = fileInput.files?.[0];
    if (!file) return;
    try {
      model = new ReplayModel(await file.text());
      model.seek(model.startTime);
      show();
    } catch (exc) {
      model = null;
      errorBox.textContent =
        exc instanceof ReplayLoadError
          ? `cannot load log: ${exc.message}`
          : String(exc);
    }
  });

  scrub.addEventListener("input", () => {
    if (model === null) return;
    model.pause();
    model.seek(model.startTime + Number(scrub.value) * model.duration);
    show();
  });

  playBtn.addEventListener("click", () => {
    if (model === null) return;
    model.togglePlay();
    show();
  });

  const frame = (nowMs: number) => {
    if (model !== null && model.isPlaying) {
      const dt = lastFrameMs === null ? 0 : (nowMs - lastFrameMs) / 1000;
      model.advance(dt);
      show();
    }
    lastFrameMs = nowMs;
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

const store = new UiStore();
setupLive(store);
setupReplay();
