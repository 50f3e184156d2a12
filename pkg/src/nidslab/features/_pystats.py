"""Pure-Python damped streaming-statistics pool.

Reference implementation of the hot kernel; `_speedups.pyx` mirrors it
operation-for-operation so both backends produce identical numbers. Each
slot tracks, per decay rate, an exponentially damped weight / linear sum /
squared sum triple sharing one last-update time.
"""

from __future__ import annotations

import math

import numpy as np

_GROW = 64


class StatsPool:
    """Growable pool of damped-window statistic slots."""

    def __init__(self, lambdas):
        self.lambdas = np.asarray(lambdas, dtype=float)
        if self.lambdas.ndim != 1 or len(self.lambdas) == 0:
            raise ValueError("need at least one decay rate")
        self.n_lam = len(self.lambdas)
        self.size = 0
        self._w = np.zeros((_GROW, self.n_lam))
        self._ls = np.zeros((_GROW, self.n_lam))
        self._ss = np.zeros((_GROW, self.n_lam))
        self._last_t = np.full(_GROW, math.nan)

    # -- slot management ------------------------------------------------
    def new_slot(self) -> int:
        if self.size == self._last_t.shape[0]:
            self._grow()
        slot = self.size
        self.size += 1
        return slot

    def _grow(self):
        cap = self._last_t.shape[0] * 2
        for name in ("_w", "_ls", "_ss"):
            arr = np.zeros((cap, self.n_lam))
            arr[: self.size] = getattr(self, name)[: self.size]
            setattr(self, name, arr)
        last = np.full(cap, math.nan)
        last[: self.size] = self._last_t[: self.size]
        self._last_t = last

    def clone(self) -> "StatsPool":
        other = StatsPool.__new__(StatsPool)
        other.lambdas = self.lambdas
        other.n_lam = self.n_lam
        other.size = self.size
        other._w = self._w.copy()
        other._ls = self._ls.copy()
        other._ss = self._ss.copy()
        other._last_t = self._last_t.copy()
        return other

    def last_time(self, slot: int) -> float:
        return float(self._last_t[slot])

    # -- core math (kept scalar to match the compiled kernel exactly) ----
    def _insert(self, slot: int, t: float, v: float):
        last = self._last_t[slot]
        fresh = math.isnan(last)
        for k in range(self.n_lam):
            w = self._w[slot, k]
            ls = self._ls[slot, k]
            ss = self._ss[slot, k]
            if not fresh:
                dt = t - last
                if dt < 0.0:
                    dt = 0.0
                f = math.pow(2.0, -self.lambdas[k] * dt)
                w *= f
                ls *= f
                ss *= f
            self._w[slot, k] = w + 1.0
            self._ls[slot, k] = ls + v
            self._ss[slot, k] = ss + v * v
        self._last_t[slot] = t

    def _stats(self, slot: int, k: int, t: float):
        """(weight decayed to t, mean, std); mean/std are decay-invariant."""
        last = self._last_t[slot]
        if math.isnan(last):
            return 0.0, 0.0, 0.0
        dt = t - last
        if dt < 0.0:
            dt = 0.0
        w = self._w[slot, k] * math.pow(2.0, -self.lambdas[k] * dt)
        mean = self._ls[slot, k] / self._w[slot, k]
        var = self._ss[slot, k] / self._w[slot, k] - mean * mean
        if var < 0.0:
            var = 0.0
        return w, mean, math.sqrt(var)

    # -- emission primitives ---------------------------------------------
    def update3(self, slot: int, t: float, v: float, out, off: int, stride: int):
        """Insert v then write (w, mean, std) per decay rate."""
        self._insert(slot, t, v)
        for k in range(self.n_lam):
            w, mean, std = self._stats(slot, k, t)
            base = off + k * stride
            out[base] = w
            out[base + 1] = mean
            out[base + 2] = std

    def query3(self, slot: int, t: float, out, off: int, stride: int):
        """Non-mutating decayed read of (w, mean, std) per decay rate."""
        for k in range(self.n_lam):
            w, mean, std = self._stats(slot, k, t)
            base = off + k * stride
            out[base] = w
            out[base + 1] = mean
            out[base + 2] = std

    def jitter3(self, slot: int, t: float, out, off: int, stride: int):
        """Insert the inter-arrival time since the slot's last event."""
        last = self._last_t[slot]
        gap = 0.0 if math.isnan(last) else max(t - last, 0.0)
        self.update3(slot, t, gap, out, off, stride)

    def pair5(self, slot_fwd: int, slot_rev: int, t: float, v: float,
              out, off: int, stride: int):
        """Insert v on the forward stream, read the reverse stream, and write
        (w, mean, std, magnitude, radius) per decay rate where
        magnitude = sqrt(mean_f^2 + mean_r^2) and radius = sqrt(var_f^2 + var_r^2)."""
        self._insert(slot_fwd, t, v)
        for k in range(self.n_lam):
            w, mean, std = self._stats(slot_fwd, k, t)
            _, mean_r, std_r = self._stats(slot_rev, k, t)
            var = std * std
            var_r = std_r * std_r
            base = off + k * stride
            out[base] = w
            out[base + 1] = mean
            out[base + 2] = std
            out[base + 3] = math.sqrt(mean * mean + mean_r * mean_r)
            out[base + 4] = math.sqrt(var * var + var_r * var_r)
