"""Temporal-correspondence indexes between two players: RMS position
error, relative position error, circular variance of the relative phase,
time lag, and the relative-phase series itself.

Note on naming: the circular "variance" here is the mean resultant length
of the relative-phase unit vectors (1 = perfect phase locking), keeping
the convention of the source material even though the conventional
circular variance is one minus that quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert

PHASE_EDGE_SAMPLES = 32   # analytic-signal phase is unreliable near the ends
MIN_PHASE_SAMPLES = 64


class InsufficientDataError(ValueError):
    """Trace too short for phase estimation."""


@dataclass(frozen=True)
class Trace:
    """Uniformly sampled position series, with optional velocities
    (differenced when absent)."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        if len(t) != len(x):
            raise ValueError("t and x must have equal length")
        if len(t) == 0:
            raise ValueError("empty trace")
        if self.v is not None:
            v = np.asarray(self.v, dtype=float)
            object.__setattr__(self, "v", v)
            if len(v) != len(t):
                raise ValueError("v must match t in length")
        if len(t) > 1:
            dt = np.diff(t)
            if np.max(np.abs(dt - dt[0])) > 1e-9:
                raise ValueError("trace must be uniformly sampled")

    @property
    def period(self):
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else math.nan

    def velocities(self):
        """Recorded velocities, or central differences of position."""
        if self.v is not None:
            return self.v
        return np.gradient(self.x, self.t)


@dataclass(frozen=True)
class MetricsReport:
    rms: float
    rpe_mean: float
    cv: float
    tl_seconds: float
    rel_phase_series: np.ndarray = field(repr=False)


def _check_pair(a, b):
    if len(a.x) != len(b.x):
        raise ValueError("traces must have equal length")


def rms(leader, follower):
    """Root mean square of the position error."""
    _check_pair(leader, follower)
    d = leader.x - follower.x
    return float(np.sqrt(np.mean(d * d)))


def rpe(leader, follower):
    """Relative position error series and its mean.

    Sign-aware when both players move in the same (nonzero) direction:
    positive means the follower is behind the leader; the absolute error
    is used otherwise.
    """
    _check_pair(leader, follower)
    v1 = leader.velocities()
    v2 = follower.velocities()
    d = leader.x - follower.x
    s1 = np.sign(v1)
    s2 = np.sign(v2)
    same = (s1 == s2) & (s1 != 0)
    series = np.where(same, d * s1, np.abs(d))
    return series, float(np.mean(series))


def circular_variance(rel_phase):
    """Mean resultant length of the relative-phase unit vectors, in [0,1]."""
    ph = np.asarray(rel_phase, dtype=float)
    if ph.size == 0:
        raise ValueError("empty phase series")
    return float(np.abs(np.mean(np.exp(1j * ph))))


def time_lag(x1, x2, max_lag):
    """Lag (seconds, an integer multiple of the sampling period) maximizing
    the cross-covariance of the mean-removed series; positive when ``x2``
    trails ``x1``. Ties break toward the smaller absolute lag."""
    _check_pair(x1, x2)
    T = x1.period
    n = len(x1.x)
    if not math.isfinite(T):
        raise ValueError("time lag needs at least two samples")
    duration = (n - 1) * T
    if max_lag > duration / 4 + 1e-12:
        raise ValueError(
            f"max_lag {max_lag} exceeds a quarter of the trace duration")
    max_shift = int(round(max_lag / T))
    a = x1.x - np.mean(x1.x)
    b = x2.x - np.mean(x2.x)

    best_lag = 0
    best_cov = -math.inf
    # direct O(n * lags) evaluation with the standard biased normalization
    # (divide by the full length), deterministic order
    for lag in range(-max_shift, max_shift + 1):
        if lag >= 0:
            seg = a[:n - lag] * b[lag:]
        else:
            seg = a[-lag:] * b[:n + lag]
        cov = float(np.sum(seg)) / n
        if cov > best_cov + 1e-15 or (
                abs(cov - best_cov) <= 1e-15 and abs(lag) < abs(best_lag)):
            best_cov = cov
            best_lag = lag
    return best_lag * T


def instantaneous_phase(x):
    """Analytic-signal phase of a mean-removed series via the discrete
    Hilbert transform."""
    x = np.asarray(x, dtype=float)
    analytic = hilbert(x - np.mean(x))
    return np.angle(analytic)


def relative_phase(x1, x2):
    """Per-sample phase difference phi1 - phi2 wrapped to (-pi, pi].

    Edge samples (first/last PHASE_EDGE_SAMPLES) are included in the series
    but are unreliable due to transform edge effects.
    """
    _check_pair(x1, x2)
    if len(x1.x) < MIN_PHASE_SAMPLES:
        raise InsufficientDataError(
            f"phase estimation needs >= {MIN_PHASE_SAMPLES} samples, "
            f"got {len(x1.x)}")
    dphi = instantaneous_phase(x1.x) - instantaneous_phase(x2.x)
    # wrap to (-pi, pi]
    wrapped = -((-dphi + math.pi) % (2.0 * math.pi) - math.pi)
    return wrapped


def interior(series, margin=PHASE_EDGE_SAMPLES):
    """Drop the edge samples of a phase series."""
    return np.asarray(series)[margin:len(series) - margin]


def compute_report(leader, follower, max_lag=None):
    """Full index set for one leader/follower pair."""
    if max_lag is None:
        max_lag = (len(leader.x) - 1) * leader.period / 4
    _, rpe_mean = rpe(leader, follower)
    phases = relative_phase(leader, follower)
    core = interior(phases)
    return MetricsReport(
        rms=rms(leader, follower),
        rpe_mean=rpe_mean,
        cv=circular_variance(core if len(core) else phases),
        tl_seconds=time_lag(leader, follower, max_lag),
        rel_phase_series=phases,
    )


def render_report_table(reports):
    """Aligned plain-text table of RPE/CV/TL for named reports.

    ``reports`` maps column name -> MetricsReport or None (blank column).
    """
    rows = ["RPE", "CV", "TL"]
    cols = list(reports)
    width = max([len(c) for c in cols] + [8]) + 2
    out = ["".ljust(6) + "".join(c.rjust(width) for c in cols)]
    for row in rows:
        cells = []
        for c in cols:
            r = reports[c]
            if r is None:
                cells.append("-".rjust(width))
                continue
            value = {"RPE": r.rpe_mean, "CV": r.cv, "TL": r.tl_seconds}[row]
            cells.append(f"{value:.4f}".rjust(width))
        out.append(row.ljust(6) + "".join(cells))
    return "\n".join(out)


def report_key_values(reports):
    """Machine-readable key=value lines mirroring the table."""
    lines = []
    for name, r in reports.items():
        if r is None:
            lines.append(f"{name}.note=not-implemented")
            continue
        lines.append(f"{name}.rpe={r.rpe_mean!r}")
        lines.append(f"{name}.cv={r.cv!r}")
        lines.append(f"{name}.tl={r.tl_seconds!r}")
    return "\n".join(lines)
