"""Session orchestration: the tick loop, partner sources, controller
selection, logging, VP-vs-VP experiments and the model-comparison
harness.

Each tick executes detect -> estimate -> control -> integrate, in that
order; given the same config and seed a session is bit-reproducible.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .adaptive import AdaptiveConfig, AdaptiveGains, AfcController
from .baselines import RpcParams, RpcState, hkb_fixed_follower_step, rpc_step
from .dynamics import HkbParams, HkbState
from .metrics import Trace, compute_report, render_report_table
from .optimal import mode_preset, one_step_error_bounds, opc_step
from .perception import PerceptionPipeline
from .signature import SignatureTrack, playback

ENGINE_VERSION = "0.1.0"

AFC_PLANT = HkbParams(alpha=10.0, beta=20.0, gamma=-1.0, omega=0.1)
OPC_PLANT = HkbParams(alpha=1.0, beta=1.0, gamma=1.0, omega=1.0)

MODES = ("afc", "opc-follower", "opc-leader", "opc-custom", "rpc", "hkb-fixed")


# ---------------------------------------------------------------------------
# trace files

def write_trace(path_or_file, trace):
    """Plain-text comma-separated trace: header ``t,x`` (plus ``v`` when
    velocities are recorded)."""
    own = isinstance(path_or_file, (str, bytes))
    f = open(path_or_file, "w") if own else path_or_file
    try:
        if trace.v is not None:
            f.write("t,x,v\n")
            for t, x, v in zip(trace.t, trace.x, trace.v):
                f.write(f"{float(t)!r},{float(x)!r},{float(v)!r}\n")
        else:
            f.write("t,x\n")
            for t, x in zip(trace.t, trace.x):
                f.write(f"{float(t)!r},{float(x)!r}\n")
    finally:
        if own:
            f.close()


def read_trace(path_or_file):
    """Parse a trace file, rejecting non-uniform time grids."""
    own = isinstance(path_or_file, (str, bytes))
    f = open(path_or_file) if own else path_or_file
    try:
        header = f.readline().strip()
        cols = header.split(",")
        if cols[:2] != ["t", "x"] or (len(cols) == 3 and cols[2] != "v") \
                or len(cols) > 3:
            raise ValueError(f"bad trace header {header!r}")
        rows = [line.strip().split(",") for line in f if line.strip()]
    finally:
        if own:
            f.close()
    if not rows:
        raise ValueError("empty trace file")
    data = np.asarray(rows, dtype=float)
    t = data[:, 0]
    if len(t) > 1:
        dt = np.diff(t)
        T = dt[0]
        if np.max(np.abs(dt - T)) > 1e-6 * T:
            raise ValueError("trace time grid is not uniform")
    v = data[:, 2] if data.shape[1] == 3 else None
    return Trace(t, data[:, 1], v)


# ---------------------------------------------------------------------------
# partner sources

def synthetic_partner_positions(seed, freqs=(0.1, 0.25, 0.4), limit=0.4):
    """Sum-of-sinusoids leader standing in for a human benchmark trace.

    Phases come from the seed; the sum is rescaled to fit [-limit, limit].
    Returns a deterministic position function of time.
    """
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, len(freqs))
    w = 2.0 * math.pi * np.asarray(freqs)
    grid = np.linspace(0.0, 120.0, 24001)
    raw = np.sum(np.sin(np.outer(grid, w) + phases), axis=1)
    scale = limit / np.max(np.abs(raw))

    def position(t):
        return float(scale * np.sum(np.sin(w * t + phases)))

    return position


def synthetic_benchmark(seed=0, duration=60.0, T=0.1):
    """The synthetic benchmark leader as a recorded Trace."""
    pos = synthetic_partner_positions(seed)
    n = int(math.floor(duration / T + 1e-9))
    t = np.arange(n) * T
    x = np.array([pos(tk) for tk in t])
    return Trace(t, x)


class _RecordedPartner:
    def __init__(self, trace):
        self.trace = trace

    def position(self, t):
        tr = self.trace
        if t <= tr.t[0]:
            return float(tr.x[0])
        if t >= tr.t[-1]:
            return float(tr.x[-1])
        return float(np.interp(t, tr.t, tr.x))


class _SyntheticPartner:
    def __init__(self, seed, freqs=(0.1, 0.25, 0.4), limit=0.4):
        self._pos = synthetic_partner_positions(seed, freqs, limit)

    def position(self, t):
        return self._pos(t)


def make_partner(descriptor, seed=0):
    """Build a partner source from its config descriptor."""
    kind = descriptor.get("kind")
    if kind == "recorded":
        trace = descriptor.get("trace")
        if trace is None:
            trace = read_trace(descriptor["path"])
        if len(trace.t) == 0:
            raise ValueError("empty leader trace")
        return _RecordedPartner(trace)
    if kind == "synthetic":
        return _SyntheticPartner(
            descriptor.get("seed", seed),
            tuple(descriptor.get("freqs", (0.1, 0.25, 0.4))),
            descriptor.get("limit", 0.4))
    raise ValueError(f"unsupported partner kind {kind!r} for batch sessions")


# ---------------------------------------------------------------------------
# configuration

@dataclass
class SessionConfig:
    mode: str = "afc"
    T: float | None = None          # defaults per mode
    duration: float = 60.0
    seed: int = 0
    plant: dict | None = None       # alpha/beta/gamma/omega, defaults per mode
    controller: dict = field(default_factory=dict)
    partner: dict = field(default_factory=lambda: {"kind": "synthetic"})
    signature: dict | None = None   # {"samples": [...], "T_rec": s} or {"path": ...}
    x0: float = 0.0
    y0: float = 0.0
    alpha_f: float = 0.6
    start_at_partner: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.T is None:
            self.T = 0.1 if self.mode in ("afc", "rpc", "hkb-fixed") else 0.03
        if self.T <= 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.mode.startswith("opc") and self.signature is None:
            raise ValueError("opc modes require a signature track")
        if self.mode == "opc-custom" and "theta_p" not in self.controller:
            raise ValueError("opc-custom requires controller.theta_p")

    def plant_params(self):
        defaults = OPC_PLANT if self.mode.startswith("opc") else AFC_PLANT
        if not self.plant:
            return defaults
        d = asdict(defaults)
        d.update(self.plant)
        return HkbParams(**d)

    def signature_track(self):
        if self.signature is None:
            return None
        if "path" in self.signature:
            tr = read_trace(self.signature["path"])
            v = tr.v if tr.v is not None else tr.velocities()
            return SignatureTrack(v, float(tr.t[-1] - tr.t[0] + tr.period))
        return SignatureTrack(np.asarray(self.signature["samples"], dtype=float),
                              float(self.signature["T_rec"]))

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def snapshot(self):
        """JSON-safe config echo for log headers (an in-memory leader trace
        is noted, not embedded)."""
        d = self.to_dict()
        partner = dict(d["partner"])
        if isinstance(partner.get("trace"), Trace):
            partner = {"kind": "recorded", "inline": True}
        d["partner"] = partner
        d["controller"] = dict(d["controller"])
        d["signature"] = dict(d["signature"]) if d["signature"] else None
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


# ---------------------------------------------------------------------------
# engines

class _AfcEngine:
    name = "afc"

    def __init__(self, cfg):
        params = dict(cfg.controller)
        gains = AdaptiveGains(params.pop("a0", -5.0), params.pop("b0", -5.0))
        acfg = AdaptiveConfig(
            C_p=params.pop("C_p", 40.0), delta=params.pop("delta", 0.25),
            eta_a=params.pop("eta_a", 30.0), T=cfg.T)
        self.ctl = AfcController(cfg.plant_params(), acfg, gains)
        self.state = HkbState(cfg.x0, cfg.y0)

    def tick(self, ref, t, T):
        state0 = self.state
        self.state, u = self.ctl.step(state0, ref, t, T)
        g = self.ctl.gains
        return {
            "vp_x": state0.x, "vp_v": state0.y, "u": u,
            "a": g.a, "b": g.b, "sat": int(g.saturated),
        }


class _OpcEngine:
    name = "opc"

    def __init__(self, cfg):
        if cfg.mode == "opc-follower":
            self.weights = mode_preset("follower")
        elif cfg.mode == "opc-leader":
            self.weights = mode_preset("leader")
        else:
            self.weights = mode_preset("custom", cfg.controller["theta_p"])
        if "eta_m" in cfg.controller:
            w = self.weights
            self.weights = type(w)(w.theta_p, w.theta_sigma,
                                   cfg.controller["eta_m"])
        self.plant = cfg.plant_params()
        self.track = cfg.signature_track()
        self.state = HkbState(cfg.x0, cfg.y0)
        self.fallbacks = 0

    def tick(self, ref, t, T):
        state0 = self.state
        r_sigma_k = playback(self.track, t)
        r_sigma_k1 = playback(self.track, t + T)
        nxt, u_mid, sol = opc_step(
            state0, ref, r_sigma_k, r_sigma_k1, self.weights, self.plant, T)
        if sol is None:
            self.fallbacks += 1
        self.state = nxt
        return {
            "vp_x": state0.x, "vp_v": state0.y, "u": u_mid,
            "theta_p": self.weights.theta_p, "fallback": int(sol is None),
        }


class _RpcEngine:
    name = "rpc"

    def __init__(self, cfg):
        kw = {}
        if "omega" in cfg.controller:
            kw["omega"] = tuple(cfg.controller["omega"])
        if "lam" in cfg.controller:
            kw["lam"] = cfg.controller["lam"]
        if "k" in cfg.controller:
            kw["k"] = cfg.controller["k"]
        self.params = RpcParams(**kw)
        self.rpc = RpcState(x=cfg.x0, x_dot=cfg.y0)

    @property
    def state(self):
        return HkbState(self.rpc.x, self.rpc.x_dot)

    def tick(self, ref, t, T):
        s0 = self.rpc
        self.rpc = rpc_step(s0, ref.r_v_hat, self.params, t, T)
        return {"vp_x": s0.x, "vp_v": s0.x_dot, "u": s0.f}


class _FixedHkbEngine:
    name = "hkb-fixed"

    def __init__(self, cfg):
        self.a = cfg.controller.get("a", -1.0)
        self.b = cfg.controller.get("b", -1.0)
        self.plant = cfg.plant_params()
        self.state = HkbState(cfg.x0, cfg.y0)

    def tick(self, ref, t, T):
        state0 = self.state
        self.state, u = hkb_fixed_follower_step(
            state0, ref, self.a, self.b, self.plant, T)
        return {"vp_x": state0.x, "vp_v": state0.y, "u": u,
                "a": self.a, "b": self.b}


def make_engine(cfg):
    if cfg.mode == "afc":
        return _AfcEngine(cfg)
    if cfg.mode.startswith("opc"):
        return _OpcEngine(cfg)
    if cfg.mode == "rpc":
        return _RpcEngine(cfg)
    if cfg.mode == "hkb-fixed":
        return _FixedHkbEngine(cfg)
    raise ValueError(f"unknown mode {cfg.mode!r}")


# ---------------------------------------------------------------------------
# session log

@dataclass
class SessionLog:
    header: dict
    records: list

    def to_jsonl(self):
        out = io.StringIO()
        out.write(json.dumps({"header": self.header}) + "\n")
        for rec in self.records:
            out.write(json.dumps(rec) + "\n")
        return out.getvalue()

    @classmethod
    def from_jsonl(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty session log")
        head = json.loads(lines[0])
        if "header" not in head:
            raise ValueError("session log must start with a header line")
        return cls(head["header"], [json.loads(ln) for ln in lines[1:]])

    def save(self, path):
        with open(path, "w") as f:
            f.write(self.to_jsonl())

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_jsonl(f.read())

    def _column(self, key):
        return np.array([rec[key] for rec in self.records], dtype=float)

    def vp_trace(self):
        return Trace(self._column("t"), self._column("vp_x"),
                     self._column("vp_v"))

    def hp_trace(self):
        return Trace(self._column("t"), self._column("hp_x"),
                     self._column("hp_v_hat"))


# ---------------------------------------------------------------------------
# run loops

def n_ticks(duration, T):
    return int(math.floor(duration / T + 1e-9))


def run_session(cfg):
    """Run one batch session; returns the complete SessionLog."""
    partner = make_partner(cfg.partner, seed=cfg.seed)
    pipeline = PerceptionPipeline(cfg.T, alpha_f=cfg.alpha_f)
    engine_cfg = cfg
    if cfg.start_at_partner:
        engine_cfg = replace(cfg, x0=partner.position(0.0))
    engine = make_engine(engine_cfg)
    n = n_ticks(cfg.duration, cfg.T)
    records = []
    for k in range(n):
        t = k * cfg.T
        ref = pipeline.tick(t, partner.position(t))
        # hp_x logs the partner's actual (clamped) position; ref.r_p is the
        # filtered value the controller consumes
        rec = {"t": t, "hp_x": pipeline.last_raw, "hp_v_hat": ref.r_v_hat}
        rec.update(engine.tick(ref, t, cfg.T))
        records.append(rec)
    header = {
        "engine_version": ENGINE_VERSION,
        "config": cfg.snapshot(),
        "clamps": pipeline.clamp_count,
        "dropouts": pipeline.dropout_count,
    }
    return SessionLog(header, records)


def run_vp_vs_vp(leader_cfg, follower_cfg):
    """Couple two engines tick-synchronously: each receives the other's
    previous-tick position as its partner sample (one-tick delay keeps the
    coupling causal). Returns (leader_log, follower_log)."""
    if abs(leader_cfg.T - follower_cfg.T) > 1e-12:
        raise ValueError("both players must share the sampling period")
    T = leader_cfg.T
    duration = min(leader_cfg.duration, follower_cfg.duration)
    eng_l = make_engine(leader_cfg)
    eng_f = make_engine(follower_cfg)
    pipe_l = PerceptionPipeline(T, alpha_f=leader_cfg.alpha_f)
    pipe_f = PerceptionPipeline(T, alpha_f=follower_cfg.alpha_f)
    prev_l = leader_cfg.x0
    prev_f = follower_cfg.x0
    recs_l, recs_f = [], []
    for k in range(n_ticks(duration, T)):
        t = k * T
        ref_l = pipe_l.tick(t, prev_f)   # leader sees the follower
        ref_f = pipe_f.tick(t, prev_l)   # follower sees the leader
        rec_l = {"t": t, "hp_x": pipe_l.last_raw, "hp_v_hat": ref_l.r_v_hat}
        rec_f = {"t": t, "hp_x": pipe_f.last_raw, "hp_v_hat": ref_f.r_v_hat}
        out_l = eng_l.tick(ref_l, t, T)
        out_f = eng_f.tick(ref_f, t, T)
        rec_l.update(out_l)
        rec_f.update(out_f)
        recs_l.append(rec_l)
        recs_f.append(rec_f)
        prev_l = out_l["vp_x"]
        prev_f = out_f["vp_x"]
    head_l = {"engine_version": ENGINE_VERSION, "config": leader_cfg.snapshot(),
              "role": "leader"}
    head_f = {"engine_version": ENGINE_VERSION, "config": follower_cfg.snapshot(),
              "role": "follower"}
    return SessionLog(head_l, recs_l), SessionLog(head_f, recs_f)


def compare_models(leader_trace, models, signature=None, seed=0):
    """Run each model as follower on the identical leader trace and report
    the temporal-correspondence indexes per model.

    ``models`` is a list of mode names; the excitator baseline has no
    published equations here and renders as a blank column.
    Returns (reports dict, rendered table, extras dict with max errors).
    """
    if len(leader_trace.t) == 0:
        raise ValueError("empty leader trace")
    duration = float(leader_trace.t[-1] - leader_trace.t[0])
    if duration <= 0:
        raise ValueError("leader trace too short")
    reports = {}
    extras = {}
    for mode in models:
        kwargs = dict(
            mode=mode, duration=duration, seed=seed,
            partner={"kind": "recorded", "trace": leader_trace},
            start_at_partner=True,
        )
        if mode.startswith("opc"):
            sig = signature
            if sig is None:
                v = leader_trace.velocities()
                sig = {"samples": v.tolist(), "T_rec": duration}
            kwargs["signature"] = sig
        log = run_session(SessionConfig(**kwargs))
        hp = log.hp_trace()
        vp = log.vp_trace()
        reports[mode] = compute_report(hp, vp)
        extras[mode] = {"max_error": float(np.max(np.abs(hp.x - vp.x)))}
    reports_with_note = dict(reports)
    reports_with_note["jke"] = None  # excitator baseline: no equations available
    table = render_report_table(reports_with_note)
    return reports, table, extras
