"""Counted-memory workspace and scaling fits.

Space is measured in machine words that the algorithms explicitly charge
against a :class:`Workspace`.  Three channels are kept apart:

``core``
    state owned by the divide-and-conquer algorithm itself (pseudoseparator,
    visited table, recursion frames, base-case DFS stacks).
``conn``
    substituted subroutines: connectivity labels (stand-in for a logspace
    connectivity algorithm) and the explicit planar separator working sets.
``cache``
    memo tables that only trade time; never part of the algorithm.

The read-only input grid is never charged.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

CORE = "core"
CONN = "conn"
CACHE = "cache"
CHANNELS = (CORE, CONN, CACHE)


class AccountingError(RuntimeError):
    """Raised when a channel would go negative (a free without an alloc)."""


class Workspace:
    """Live/peak word counters per channel."""

    def __init__(self) -> None:
        self.live = {ch: 0 for ch in CHANNELS}
        self.peak = {ch: 0 for ch in CHANNELS}

    def track(self, delta: int, channel: str = CORE) -> "Workspace":
        live = self.live[channel] + delta
        if live < 0:
            raise AccountingError(
                f"channel {channel!r} would drop to {live} words"
            )
        self.live[channel] = live
        if live > self.peak[channel]:
            self.peak[channel] = live
        return self

    def alloc(self, words: int, channel: str = CORE) -> None:
        self.track(words, channel)

    def free(self, words: int, channel: str = CORE) -> None:
        self.track(-words, channel)

    def spike(self, words: int, channel: str = CORE) -> None:
        """Record a transient allocation that is released immediately."""
        if words > 0:
            self.track(words, channel)
            self.track(-words, channel)

    # Subtree peaks let a memoised computation be replayed exactly: a cache
    # hit charges the same relative high-water mark the original run reached.
    def probe_begin(self) -> tuple:
        saved = (dict(self.peak), dict(self.live))
        for ch in (CORE, CONN):
            self.peak[ch] = self.live[ch]
        return saved

    def probe_end(self, saved: tuple) -> tuple[int, int]:
        old_peak, start_live = saved
        rel = (
            self.peak[CORE] - start_live[CORE],
            self.peak[CONN] - start_live[CONN],
        )
        for ch in (CORE, CONN):
            self.peak[ch] = max(self.peak[ch], old_peak[ch])
        return rel

    def replay(self, rel: tuple[int, int]) -> None:
        live, peak = self.live, self.peak
        v = live[CORE] + rel[0]
        if v > peak[CORE]:
            peak[CORE] = v
        v = live[CONN] + rel[1]
        if v > peak[CONN]:
            peak[CONN] = v


def words_for_bits(nbits: int) -> int:
    return (nbits + 63) // 64


@dataclass
class Metrics:
    """Per-query counters; serialised as one JSON object per run."""

    peak_core: int = 0
    peak_conn: int = 0
    peak_cache: int = 0
    queries: int = 0
    subgrid_solves: int = 0
    depth: int = 0
    grid_depth: int = 0
    ms: float = 0.0
    _t0: float = field(default=0.0, repr=False)

    def start(self) -> None:
        self._t0 = time.perf_counter()

    def stop(self, ws: Workspace) -> None:
        self.ms = (time.perf_counter() - self._t0) * 1000.0
        self.peak_core = ws.peak[CORE]
        self.peak_conn = ws.peak[CONN]
        self.peak_cache = ws.peak[CACHE]

    @property
    def peak_words(self) -> int:
        return self.peak_core

    @property
    def oracle_queries(self) -> int:
        return self.queries

    @property
    def recursion_depth(self) -> int:
        return self.depth

    @property
    def wall_time(self) -> float:
        return self.ms / 1000.0


@dataclass(frozen=True)
class ScalingFit:
    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    r2: float


class FitError(ValueError):
    pass


def fit_scaling(series, min_points: int = 4, min_decades: float = 2.0) -> ScalingFit:
    """Least-squares slope of log(peak) against log(n).

    ``series`` is an iterable of ``(n, peak)`` pairs.  Repeated ``n`` values
    (several seeds) are allowed and all enter the fit.
    """
    pts = tuple((float(n), float(w)) for n, w in series)
    distinct = sorted({n for n, _ in pts})
    if len(distinct) < min_points:
        raise FitError(f"need >= {min_points} distinct sizes, got {len(distinct)}")
    if any(n <= 0 or w <= 0 for n, w in pts):
        raise FitError("sizes and peaks must be positive")
    span = math.log10(distinct[-1]) - math.log10(distinct[0])
    if span < min_decades - 1e-9:
        raise FitError(f"sizes span {span:.2f} decades, need {min_decades}")
    x = np.log([n for n, _ in pts])
    y = np.log([w for _, w in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(pts, float(slope), float(intercept), r2)
