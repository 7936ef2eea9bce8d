"""Time-varying gain schedule and integrable softening margins.

The gain grows from 1 at t = 0 to a finite cap at the user-chosen time T and
stays there, which is what buys convergence *by* T without an unbounded gain.
The margins sigma_i(t) are the slack injected by the softening sign function;
they must stay positive and have a finite integral so the slack they feed
into the Lyapunov decay is summable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["GainSchedule", "SigmaSchedule", "mu", "mu_grid", "sigma", "sigma_grid"]


@dataclass(frozen=True)
class GainSchedule:
    """Bounded gain profile: (T+eps)/(T+eps-t) on [0, T), constant 1 + T/eps after.

    T is the time by which the tracking error must have entered its residual
    set; eps > 0 keeps the ramp's virtual blow-up point outside [0, T], so the
    gain caps at mu_bar = 1 + T/eps instead of diverging.  Smaller eps tightens
    the residual set at the price of a larger gain cap.
    """

    T: float
    epsilon: float
    mu_bar: float = field(init=False)

    def __post_init__(self):
        if not (self.T > 0.0):
            raise ValueError(f"T must be > 0, got {self.T}")
        if not (0.0 < self.epsilon < self.T):
            raise ValueError(
                f"epsilon must satisfy 0 < epsilon < T, got epsilon={self.epsilon}, T={self.T}"
            )
        object.__setattr__(self, "mu_bar", 1.0 + self.T / self.epsilon)


def mu(schedule: GainSchedule, t: float) -> float:
    """Evaluate the gain at time t >= 0.

    Nondecreasing, mu(0) = 1, continuous at T, and bounded by mu_bar.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t < schedule.T:
        c = schedule.T + schedule.epsilon
        return c / (c - t)
    return schedule.mu_bar


def mu_grid(schedule: GainSchedule, t: np.ndarray) -> np.ndarray:
    """Vectorized `mu` over a grid of nonnegative times."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("all grid times must be >= 0")
    c = schedule.T + schedule.epsilon
    ramp = c / np.where(t < schedule.T, c - t, 1.0)
    return np.where(t < schedule.T, ramp, schedule.mu_bar)


@dataclass(frozen=True)
class SigmaSchedule:
    """Per-channel softening margins sigma_i(t) = a_i * exp(-b_i * t).

    The exponential family is the one closed form with a trivially finite
    integral: sigma_bar_i = a_i / b_i bounds the total slack per channel.
    Other positive, integrable margins can be swapped in by mimicking this
    interface (values / sigma_bar with positivity guaranteed).
    """

    amplitude: np.ndarray
    decay: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.amplitude, dtype=float))
        b = np.atleast_1d(np.asarray(self.decay, dtype=float))
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("amplitude and decay must be 1-d arrays of equal length")
        if np.any(a <= 0.0):
            raise ValueError("all amplitudes a_i must be > 0")
        if np.any(b <= 0.0):
            raise ValueError("all decay rates b_i must be > 0")
        object.__setattr__(self, "amplitude", a)
        object.__setattr__(self, "decay", b)

    @property
    def n(self) -> int:
        return self.amplitude.shape[0]

    @property
    def sigma_bar(self) -> np.ndarray:
        """Per-channel integral of sigma_i over [0, inf): a_i / b_i."""
        return self.amplitude / self.decay

    def values(self, t: float) -> np.ndarray:
        """All channel margins at time t (strictly positive)."""
        return self.amplitude * np.exp(-self.decay * t)


def sigma(schedule: SigmaSchedule, channel: int, t: float) -> float:
    """Margin of one channel (1-based index) at time t >= 0."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if not (1 <= channel <= schedule.n):
        raise IndexError(f"channel must be in 1..{schedule.n}, got {channel}")
    i = channel - 1
    return float(schedule.amplitude[i] * math.exp(-schedule.decay[i] * t))


def sigma_grid(schedule: SigmaSchedule, t: np.ndarray) -> np.ndarray:
    """Margins for all channels over a time grid, shape (len(t), n)."""
    t = np.asarray(t, dtype=float)
    return schedule.amplitude[None, :] * np.exp(-np.outer(t, schedule.decay))
