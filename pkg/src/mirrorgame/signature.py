"""Individual motor signature machinery: velocity-distribution estimation,
earth mover's distance between distributions, and playback of a recorded
velocity track as the desired-signature reference.

A signature's mass is treated as uniform within each bin, so the CDF is
piecewise linear over the bin edges and the EMD integral is exact on the
grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

SIGNATURE_FORMAT_VERSION = 1
DEFAULT_BIN_COUNT = 101
DEFAULT_RANGE = (-3.0, 3.0)


@dataclass(frozen=True)
class Signature:
    """Velocity histogram plus its CDF at the bin edges."""

    bin_edges: np.ndarray   # length n+1, uniform
    mass: np.ndarray        # length n, sums to 1
    cdf: np.ndarray         # length n+1, cdf[0]=0, cdf[-1]=1

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "cdf", cdf)
        if len(mass) < 2:
            raise ValueError("signature needs at least 2 bins")
        if len(edges) != len(mass) + 1 or len(cdf) != len(edges):
            raise ValueError("inconsistent signature array lengths")
        if abs(mass.sum() - 1.0) > 1e-9:
            raise ValueError(f"mass must sum to 1, got {mass.sum()}")
        if np.any(np.diff(cdf) < -1e-12):
            raise ValueError("cdf must be non-decreasing")

    @property
    def bin_width(self):
        return float(self.bin_edges[1] - self.bin_edges[0])

    def to_json(self):
        """Serialize to a text document; floats render at full precision so
        a reparse round-trips bit-equal."""
        return json.dumps({
            "version": SIGNATURE_FORMAT_VERSION,
            "bin_edges": self.bin_edges.tolist(),
            "mass": self.mass.tolist(),
        })

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("version") != SIGNATURE_FORMAT_VERSION:
            raise ValueError(f"unsupported signature version {doc.get('version')}")
        edges = np.asarray(doc["bin_edges"], dtype=float)
        mass = np.asarray(doc["mass"], dtype=float)
        cdf = np.concatenate(([0.0], np.cumsum(mass)))
        cdf[-1] = 1.0
        return cls(edges, mass, cdf)


@dataclass(frozen=True)
class SignatureTrack:
    """Time-ordered desired-velocity samples covering one loop period
    ``T_rec``; playback wraps cyclically."""

    samples: np.ndarray
    T_rec: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if len(samples) == 0:
            raise ValueError("signature track must be non-empty")
        if not np.all(np.isfinite(samples)):
            raise ValueError("signature track contains non-finite values")
        if self.T_rec <= 0:
            raise ValueError(f"T_rec must be positive, got {self.T_rec}")

    @property
    def sample_period(self):
        return self.T_rec / len(self.samples)


def velocity_pdf(velocities, bin_count=DEFAULT_BIN_COUNT, range=DEFAULT_RANGE):
    """Normalized velocity histogram with exact CDF; values outside the
    range are counted into the end bins."""
    v = np.asarray(velocities, dtype=float)
    if v.size == 0:
        raise ValueError("empty velocity series")
    if not np.all(np.isfinite(v)):
        raise ValueError("velocity series contains non-finite values")
    lo, hi = range
    if not (hi > lo) or bin_count < 2:
        raise ValueError("invalid grid")
    edges = np.linspace(lo, hi, bin_count + 1)
    clipped = np.clip(v, lo, hi)
    counts, _ = np.histogram(clipped, bins=edges)
    mass = counts / counts.sum()
    cdf = np.concatenate(([0.0], np.cumsum(mass)))
    cdf[-1] = 1.0
    return Signature(edges, mass, cdf)


def _piecewise_linear_l1(grid, f1, f2):
    """Exact integral of |f1 - f2| for two piecewise-linear functions given
    by their values on a shared grid (sign changes handled per segment)."""
    total = 0.0
    d = f1 - f2
    for i in range(len(grid) - 1):
        h = grid[i + 1] - grid[i]
        d0, d1 = d[i], d[i + 1]
        if d0 * d1 >= 0.0:
            total += 0.5 * (abs(d0) + abs(d1)) * h
        else:
            # linear difference crosses zero inside the segment
            z = d0 / (d0 - d1)
            total += 0.5 * (abs(d0) * z + abs(d1) * (1.0 - z)) * h
    return total


def emd(p1, p2):
    """Earth mover's distance: the integral of the absolute CDF difference.

    Signatures on different grids are resampled onto the union grid by
    linear CDF interpolation (a documented approximation).
    """
    e1 = p1.bin_edges
    e2 = p2.bin_edges
    if len(e1) == len(e2) and np.array_equal(e1, e2):
        return _piecewise_linear_l1(e1, p1.cdf, p2.cdf)
    grid = np.union1d(e1, e2)
    c1 = np.interp(grid, e1, p1.cdf, left=0.0, right=1.0)
    c2 = np.interp(grid, e2, p2.cdf, left=0.0, right=1.0)
    return _piecewise_linear_l1(grid, c1, c2)


def playback(track, t):
    """Desired velocity at time ``t``: linear interpolation inside the
    record, wrapping cyclically past the end."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    n = len(track.samples)
    tau = math.fmod(t, track.T_rec)
    idx = tau / track.sample_period
    i0 = int(idx)
    frac = idx - i0
    i0 %= n
    i1 = (i0 + 1) % n
    s = track.samples
    return float(s[i0] * (1.0 - frac) + s[i1] * frac)


def signature_of_track(track, bin_count=DEFAULT_BIN_COUNT,
                       range=DEFAULT_RANGE):
    """Signature of a recorded velocity track."""
    return velocity_pdf(track.samples, bin_count=bin_count, range=range)
