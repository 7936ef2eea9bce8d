"""Backstepping control laws built on compensated tracking errors.

Coordinates: z_1 = x_1 - x_d and z_i = x_i - alpha_hat_{i-1} for i >= 2, with
s_i = z_i - zeta_i the compensated errors.  Each channel's law cancels its
drift, feeds back -k_i * mu(t) * z_i, strips the previous channel's coupling,
and adds two softening terms (one pulling zeta, one pulling s).  The
derivative of the previous filter output is obtained by re-evaluating the
filter dynamics at the freshly computed virtual control, which keeps the
chain algebraic: alpha_1 -> alpha_hat_dot_1 -> alpha_2 -> ... -> u.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .compensator import soft_sign
from .errors import ControllabilityLoss
from .gain import SigmaSchedule

__all__ = ["ControllerConfig", "ErrorCoordinates", "error_coordinates", "control_laws"]


@dataclass(frozen=True)
class ControllerConfig:
    """Feedback gains k_i, compensator gains l_i, margins, and filter constants."""

    k: np.ndarray
    l: np.ndarray
    sigma_schedule: SigmaSchedule
    delta: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.k, dtype=float))
        l = np.atleast_1d(np.asarray(self.l, dtype=float))
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        for name, arr in (("k", k), ("l", l), ("delta", d)):
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a 1-d array")
            if np.any(arr <= 0.0):
                bad = int(np.argmax(arr <= 0.0)) + 1
                raise ValueError(f"{name}_{bad} must be > 0, got {arr[bad - 1]}")
        if l.shape != k.shape:
            raise ValueError("k and l must have equal length")
        if self.sigma_schedule.n != k.shape[0]:
            raise ValueError("sigma schedule must cover every channel")
        if d.shape[0] != k.shape[0] - 1:
            raise ValueError("need exactly n-1 filter time constants")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "delta", d)

    @property
    def n(self) -> int:
        return self.k.shape[0]


@dataclass(frozen=True)
class ErrorCoordinates:
    """Tracking errors z and their compensated counterparts s = z - zeta."""

    z: np.ndarray
    s: np.ndarray


def error_coordinates(
    x: np.ndarray, alpha_hat: np.ndarray, xd: float, zeta: np.ndarray
) -> ErrorCoordinates:
    """Build (z, s) from the plant state, filter outputs, reference, and zeta."""
    x = np.asarray(x, dtype=float)
    alpha_hat = np.asarray(alpha_hat, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    n = x.shape[0]
    if alpha_hat.shape != (n - 1,):
        raise ValueError(f"alpha_hat must have shape ({n - 1},), got {alpha_hat.shape}")
    if zeta.shape != (n,):
        raise ValueError(f"zeta must have shape ({n},), got {zeta.shape}")
    z = np.empty(n)
    z[0] = x[0] - xd
    z[1:] = x[1:] - alpha_hat
    return ErrorCoordinates(z=z, s=z - zeta)


def channel_feedback(
    k_i: float,
    l_i: float,
    mu_t: float,
    sigma_i: float,
    z_i: float,
    s_i: float,
    zeta_i: float,
    prev_dot: float,
    f_i: float,
    g_prev_z_prev: float,
    compensation: bool,
) -> float:
    """Numerator common to every channel's law (before dividing by g_i).

    prev_dot is xd_dot for the first channel and d(alpha_hat_{i-1})/dt after;
    g_prev_z_prev is 0.0 for the first channel.  With compensation off, the
    two softening terms are dropped (plain filtered backstepping).
    """
    v = -k_i * mu_t * z_i + prev_dot - f_i - g_prev_z_prev
    if compensation:
        v -= l_i * soft_sign(zeta_i, sigma_i) + soft_sign(s_i, sigma_i)
    return v


def cascade(
    k: list,
    l: list,
    z: list,
    s: list,
    zeta: list,
    g_vals: list,
    f_vals: list,
    xd_dot: float,
    alpha_hat_dot_fn: Callable[[int, float], float],
    mu_t: float,
    sigma_t: list,
    t: float,
    g_min: float,
    compensation: bool,
) -> tuple[list, float, list]:
    """Walk the channel laws down the chain on plain scalars.

    Returns (alpha, u, alpha_hat_dot) as lists; shared by the public
    `control_laws` and the simulation loop so both produce identical numbers.
    """
    n = len(k)
    alpha = [0.0] * (n - 1)
    ah_dot = [0.0] * (n - 1)
    prev_dot = xd_dot
    prev_gz = 0.0
    u = 0.0
    for i in range(n):
        gi = g_vals[i]
        if abs(gi) < g_min:
            raise ControllabilityLoss(i + 1, t, gi, g_min)
        v = channel_feedback(
            k[i], l[i], mu_t, sigma_t[i], z[i], s[i], zeta[i],
            prev_dot, f_vals[i], prev_gz, compensation,
        ) / gi
        if i < n - 1:
            alpha[i] = v
            prev_dot = alpha_hat_dot_fn(i, v)
            ah_dot[i] = prev_dot
            prev_gz = gi * z[i]
        else:
            u = v
    return alpha, u, ah_dot


def control_laws(
    cfg: ControllerConfig,
    coords: ErrorCoordinates,
    zeta: np.ndarray,
    g_vals: np.ndarray,
    f_vals: np.ndarray,
    xd_dot: float,
    alpha_hat_dot_fn: Callable[[int, float], float],
    mu_t: float,
    sigma_t: np.ndarray,
    t: float = 0.0,
    g_min: float = 0.0,
    compensation: bool = True,
) -> tuple[np.ndarray, float, np.ndarray]:
    """Evaluate every virtual control and the actual input.

    alpha_hat_dot_fn(idx, alpha_idx) must return the 0-based filter idx's
    output derivative given its freshly computed input; it is called once per
    filtered channel as the chain walks down.  Returns (alpha, u,
    alpha_hat_dot).  Raises ControllabilityLoss if any |g_i| < g_min.
    """
    n = cfg.n
    zeta = np.asarray(zeta, dtype=float)
    if coords.z.shape != (n,) or zeta.shape != (n,):
        raise ValueError(f"coordinates and zeta must have shape ({n},)")
    if np.asarray(g_vals).shape != (n,) or np.asarray(f_vals).shape != (n,):
        raise ValueError(f"plant evaluations must have shape ({n},)")
    alpha, u, ah_dot = cascade(
        np.asarray(cfg.k, dtype=float).tolist(),
        np.asarray(cfg.l, dtype=float).tolist(),
        np.asarray(coords.z, dtype=float).tolist(),
        np.asarray(coords.s, dtype=float).tolist(),
        zeta.tolist(),
        np.asarray(g_vals, dtype=float).tolist(),
        np.asarray(f_vals, dtype=float).tolist(),
        float(xd_dot),
        alpha_hat_dot_fn,
        float(mu_t),
        np.asarray(sigma_t, dtype=float).tolist(),
        float(t),
        float(g_min),
        compensation,
    )
    return np.array(alpha), u, np.array(ah_dot)
