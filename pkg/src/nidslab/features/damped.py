"""Scalar damped-window statistic.

One exponentially damped (weight, linear sum, squared sum) triple. The
batch extractors run many of these through the pooled kernel; this scalar
form defines the semantics and serves the unit tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..errors import TimeRegression

TIME_TOL = 1e-9


@dataclass(frozen=True)
class DampedStat:
    decay: float                    # per-second decay rate; factor is 2**(-decay*dt)
    weight: float = 0.0
    lin_sum: float = 0.0
    sq_sum: float = 0.0
    last_t: Optional[float] = None

    def mean(self) -> float:
        return self.lin_sum / self.weight if self.weight > 0 else 0.0

    def variance(self) -> float:
        if self.weight <= 0:
            return 0.0
        m = self.mean()
        return max(self.sq_sum / self.weight - m * m, 0.0)

    def std(self) -> float:
        return math.sqrt(self.variance())

    def weight_at(self, t: float) -> float:
        """Weight decayed to observation time t, without inserting."""
        if self.last_t is None:
            return 0.0
        dt = max(t - self.last_t, 0.0)
        return self.weight * math.pow(2.0, -self.decay * dt)


def damped_update(stat: DampedStat, t: float, v: float) -> DampedStat:
    """Decay the triple to time t, then insert the value v."""
    if stat.last_t is not None and t < stat.last_t - TIME_TOL:
        raise TimeRegression(f"t={t} precedes last_t={stat.last_t}")
    if stat.last_t is None:
        w, ls, ss = stat.weight, stat.lin_sum, stat.sq_sum
    else:
        dt = max(t - stat.last_t, 0.0)
        f = math.pow(2.0, -stat.decay * dt)
        w, ls, ss = stat.weight * f, stat.lin_sum * f, stat.sq_sum * f
    return DampedStat(stat.decay, w + 1.0, ls + v, ss + v * v, t)
