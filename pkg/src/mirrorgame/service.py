"""Live-play WebSocket service.

One connection = one session: the client sends a ``config`` message, the
server echoes the effective parameters, then ticks on its own clock at
period T, consuming the latest human-position (``hp``) sample per tick
and emitting one virtual-player (``vp``) message per tick plus a rolling
``metrics`` message every second. A full session log is written on
disconnect. A separate ``/replay`` endpoint streams a recorded log at an
adjustable rate.

The engine loop is synchronous (``LiveSession``) and owns all state; the
asyncio transport merely feeds it through a latest-wins mailbox.
"""

from __future__ import annotations

import asyncio
import json
import math
import time
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .metrics import (
    MIN_PHASE_SAMPLES,
    Trace,
    circular_variance,
    interior,
    relative_phase,
    rms,
    time_lag,
)
from .perception import PerceptionPipeline
from .session import ENGINE_VERSION, SessionConfig, SessionLog, make_engine

METRICS_PERIOD = 1.0      # seconds between metrics messages
METRICS_WINDOW = 10.0     # rolling window length in seconds
SILENCE_TIMEOUT = 5.0     # close the session after this much client silence
WARMUP_SECONDS = 2.0      # live play streams but does not record this long

# fallback desired-velocity loop for optimal-control modes when the client
# does not supply a signature: one 10 s sinusoid period
_DEFAULT_SIGNATURE = {
    "samples": (0.5 * np.sin(np.linspace(0.0, 2.0 * math.pi, 200,
                                         endpoint=False))).tolist(),
    "T_rec": 10.0,
}


class ProtocolError(ValueError):
    """Client frame violates the message protocol."""


def _parse_frame(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed frame: {exc}") from exc
    if not isinstance(doc, dict) or "type" not in doc:
        raise ProtocolError("frame must be a document with a 'type' field")
    return doc


class LiveSession:
    """Synchronous per-connection engine state, driven by tick()."""

    CONFIG_KEYS = ("mode", "T", "controller", "plant", "signature",
                   "alpha_f", "x0", "y0", "seed")

    def __init__(self, config_doc, default_mode="opc-follower",
                 default_tick=None):
        fields = {k: config_doc[k] for k in self.CONFIG_KEYS
                  if k in config_doc}
        fields.setdefault("mode", default_mode)
        if default_tick is not None:
            fields.setdefault("T", default_tick)
        if fields["mode"].startswith("opc"):
            fields.setdefault("signature", _DEFAULT_SIGNATURE)
        try:
            self.config = SessionConfig(**fields)
        except (TypeError, ValueError) as exc:
            raise ProtocolError(f"bad config: {exc}") from exc
        self.engine = make_engine(self.config)
        self.pipeline = PerceptionPipeline(self.config.T,
                                           alpha_f=self.config.alpha_f)
        self.records = []
        self._mailbox = None          # latest unread hp sample (t, x)
        self._last_client_t = -math.inf
        self._tick_index = 0
        self._last_metrics_t = 0.0

    # -- transport side -----------------------------------------------------

    def submit_hp(self, doc):
        """Store the latest human sample; older/duplicate frames in the same
        tick window are simply overwritten (latest wins)."""
        try:
            t = float(doc["t"])
            x = float(doc["x"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"bad hp message: {exc}") from exc
        if not math.isfinite(t) or not math.isfinite(x):
            raise ProtocolError("hp message fields must be finite")
        if t < self._last_client_t:
            raise ProtocolError("client timestamps must be monotone")
        self._last_client_t = t
        self._mailbox = (t, x)

    def config_echo(self):
        """Effective parameters, sent back as the handshake reply."""
        doc = {
            "type": "config",
            "t": 0.0,
            "mode": self.config.mode,
            "T": self.config.T,
            "engine_version": ENGINE_VERSION,
        }
        if self.config.mode.startswith("opc"):
            doc["theta_p"] = self.engine.weights.theta_p
            doc["theta_sigma"] = self.engine.weights.theta_sigma
        elif self.config.mode == "afc":
            g = self.engine.ctl.gains
            doc["a"] = g.a
            doc["b"] = g.b
        elif self.config.mode == "hkb-fixed":
            doc["a"] = self.engine.a
            doc["b"] = self.engine.b
        return doc

    # -- engine side ---------------------------------------------------------

    @property
    def T(self):
        return self.config.T

    def tick(self):
        """Advance one control period; returns the vp message."""
        t = self._tick_index * self.config.T
        self._tick_index += 1
        sample = None
        if self._mailbox is not None:
            sample = self._mailbox[1]
            self._mailbox = None
        ref = self.pipeline.tick(t, sample)
        rec = {"t": t, "hp_x": self.pipeline.last_raw,
               "hp_v_hat": ref.r_v_hat}
        rec.update(self.engine.tick(ref, t, self.config.T))
        # the engine runs and streams from t=0, but the first seconds of a
        # live session are a warm-up and are excluded from the record
        if t >= WARMUP_SECONDS - 1e-9:
            self.records.append(rec)
        return {"type": "vp", "t": t, "x": rec["vp_x"], "v": rec["vp_v"]}

    def maybe_metrics(self):
        """Rolling-window metrics message, once per METRICS_PERIOD."""
        if not self.records:
            return None
        t = self.records[-1]["t"]
        if t - self._last_metrics_t < METRICS_PERIOD - 1e-9:
            return None
        self._last_metrics_t = t
        window = [r for r in self.records if r["t"] >= t - METRICS_WINDOW]
        hp = np.array([r["hp_x"] for r in window])
        vp = np.array([r["vp_x"] for r in window])
        doc = {
            "type": "metrics", "t": t,
            "rms": float(np.sqrt(np.mean((hp - vp) ** 2))),
            "window": float(len(window) * self.config.T),
        }
        if len(window) >= MIN_PHASE_SAMPLES:
            ts = np.array([r["t"] for r in window])
            tr_hp = Trace(ts, hp)
            tr_vp = Trace(ts, vp)
            phases = interior(relative_phase(tr_hp, tr_vp))
            if len(phases):
                doc["cv"] = circular_variance(phases)
            doc["tl"] = time_lag(tr_hp, tr_vp,
                                 (len(window) - 1) * self.config.T / 4)
        return doc

    def finish(self):
        """Seal the session into a log document."""
        header = {
            "engine_version": ENGINE_VERSION,
            "config": self.config.snapshot(),
            "clamps": self.pipeline.clamp_count,
            "dropouts": self.pipeline.dropout_count,
            "live": True,
        }
        return SessionLog(header, self.records)


def create_app(default_mode="opc-follower", default_tick=None, log_dir="."):
    """FastAPI app with the live-play and replay WebSocket endpoints."""
    app = FastAPI(title="mirrorgame live service")
    log_dir = Path(log_dir)

    async def _send_error(ws, message):
        try:
            await ws.send_text(json.dumps(
                {"type": "error", "t": time.monotonic(), "message": message}))
        except Exception:
            pass

    async def _receive_config(ws):
        raw = await asyncio.wait_for(ws.receive_text(), SILENCE_TIMEOUT)
        doc = _parse_frame(raw)
        if doc.get("type") != "config":
            raise ProtocolError("first frame must be type=config")
        return doc

    @app.websocket("/ws")
    async def live(ws: WebSocket):
        await ws.accept()
        session = None
        try:
            config_doc = await _receive_config(ws)
            while config_doc is not None:
                session = LiveSession(config_doc, default_mode=default_mode,
                                      default_tick=default_tick)
                # a fresh config frame mid-session restarts with new params
                config_doc = await _run_live_session(ws, session)
                _flush(session)
                session = None
        except ProtocolError as exc:
            await _send_error(ws, str(exc))
        except (WebSocketDisconnect, asyncio.TimeoutError):
            pass
        finally:
            _flush(session)
            try:
                await ws.close()
            except Exception:
                pass

    async def _run_live_session(ws, session):
        """Run one session until disconnect, silence, or a fresh config
        frame; returns the restart config document or None."""
        await ws.send_text(json.dumps(session.config_echo()))
        loop = asyncio.get_event_loop()
        start = loop.time()
        last_rx = start
        receiver = asyncio.ensure_future(ws.receive_text())
        try:
            while True:
                next_tick = start + session._tick_index * session.T
                timeout = max(0.0, next_tick - loop.time())
                done, _ = await asyncio.wait({receiver}, timeout=timeout)
                if receiver in done:
                    raw = receiver.result()     # raises on disconnect
                    last_rx = loop.time()
                    doc = _parse_frame(raw)
                    if doc.get("type") == "hp":
                        session.submit_hp(doc)
                    elif doc.get("type") == "config":
                        return doc
                    else:
                        raise ProtocolError(
                            f"unexpected frame type {doc.get('type')!r}")
                    receiver = asyncio.ensure_future(ws.receive_text())
                    continue
                if loop.time() - last_rx > SILENCE_TIMEOUT:
                    await _send_error(ws, "client silent, session closed")
                    return None
                await ws.send_text(json.dumps(session.tick()))
                metrics = session.maybe_metrics()
                if metrics is not None:
                    await ws.send_text(json.dumps(metrics))
        finally:
            if not receiver.done():
                receiver.cancel()

    def _flush(session):
        if session is None or not session.records:
            return
        path = log_dir / f"live-{uuid.uuid4().hex[:12]}.log"
        session.finish().save(path)

    @app.websocket("/replay")
    async def replay(ws: WebSocket):
        await ws.accept()
        params = ws.query_params
        path = params.get("path")
        rate = float(params.get("rate", "1.0"))
        try:
            if not path:
                raise ProtocolError("missing 'path' query parameter")
            if rate <= 0:
                raise ProtocolError(f"rate must be positive, got {rate}")
            try:
                log = SessionLog.load(path)
            except OSError as exc:
                raise ProtocolError(f"cannot open log: {exc}") from exc
            await ws.send_text(json.dumps(
                {"type": "config", "t": 0.0, **{
                    k: log.header.get("config", {}).get(k)
                    for k in ("mode", "T")}}))
            loop = asyncio.get_event_loop()
            start = loop.time()
            t0 = log.records[0]["t"] if log.records else 0.0
            for rec in log.records:
                delay = start + (rec["t"] - t0) / rate - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                await ws.send_text(json.dumps(
                    {"type": "vp", "t": rec["t"], "x": rec["vp_x"],
                     "v": rec["vp_v"], "hp_x": rec["hp_x"]}))
        except ProtocolError as exc:
            await _send_error(ws, str(exc))
        except WebSocketDisconnect:
            pass
        finally:
            try:
                await ws.close()
            except Exception:
                pass

    return app


def serve(host, port, default_mode="opc-follower", default_tick=None,
          log_dir="."):
    """Run the live-play service until interrupted."""
    import uvicorn

    app = create_app(default_mode=default_mode, default_tick=default_tick,
                     log_dir=log_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
