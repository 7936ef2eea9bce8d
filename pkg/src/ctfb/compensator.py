"""Error-compensation dynamics that absorb the filters' unachieved portion.

The compensator states zeta_i receive the filter errors (alpha_hat_i -
alpha_i) through the plant gains and bleed them off through the scheduled
gain and a softening sign term, so the compensated errors s_i = z_i - zeta_i
see none of the filter lag.  All states start at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CompensatorState",
    "soft_sign",
    "soft_sign_vec",
    "compensator_rhs",
    "compensator_derivatives",
]


def soft_sign(v: float, sigma_t: float) -> float:
    """Smooth surrogate for sign(v): v / sqrt(v^2 + sigma_t^2), in (-1, 1).

    Odd in v, and off from |sign| by less than sigma_t in the sense
    |v| - v * soft_sign(v, sigma_t) < sigma_t for every real v.  Computed
    through hypot so extreme |v| / sigma_t ratios neither overflow nor
    divide by zero (the value saturates to +-1.0 in floating point there).
    """
    if not (sigma_t > 0.0):
        raise ValueError(f"sigma_t must be > 0, got {sigma_t}")
    return v / math.hypot(v, sigma_t)


def soft_sign_vec(v: np.ndarray, sigma_t: np.ndarray) -> np.ndarray:
    """Elementwise `soft_sign` for positive margin vectors."""
    if np.any(sigma_t <= 0.0):
        raise ValueError("all margins must be > 0")
    return v / np.hypot(v, sigma_t)


@dataclass
class CompensatorState:
    """Compensator states zeta_i with their decay gains k_i and pull-in gains l_i.

    k_i are shared with the controller; l_i scale the softening term that
    drives zeta back to zero once the filter errors fade.
    """

    zeta: np.ndarray
    k: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.zeta, dtype=float))
        k = np.atleast_1d(np.asarray(self.k, dtype=float))
        l = np.atleast_1d(np.asarray(self.l, dtype=float))
        if not (z.shape == k.shape == l.shape) or z.ndim != 1:
            raise ValueError("zeta, k, l must be 1-d arrays of equal length")
        if np.any(k <= 0.0):
            raise ValueError("all gains k_i must be > 0")
        if np.any(l <= 0.0):
            raise ValueError("all gains l_i must be > 0")
        self.zeta = z
        self.k = k
        self.l = l

    @property
    def n(self) -> int:
        return self.zeta.shape[0]


def compensator_derivatives(
    zeta: list,
    k: list,
    l: list,
    filter_err: list,
    g_vals: list,
    mu_t: float,
    sigma_t: list,
) -> list:
    """Compensator derivative on plain scalars (no validation); see compensator_rhs."""
    n = len(zeta)
    d = [0.0] * n
    for i in range(n):
        zi = zeta[i]
        v = -k[i] * mu_t * zi - l[i] * (zi / math.hypot(zi, sigma_t[i]))
        if i < n - 1:
            v += g_vals[i] * (filter_err[i] + zeta[i + 1])
        if i >= 1:
            v -= g_vals[i - 1] * zeta[i - 1]
        d[i] = v
    return d


def compensator_rhs(
    state: CompensatorState,
    filter_err: np.ndarray,
    g_vals: np.ndarray,
    mu_t: float,
    sigma_t: np.ndarray,
) -> np.ndarray:
    """Derivative of the compensator states.

    filter_err holds (alpha_hat_i - alpha_i) for the n-1 filtered channels;
    the last channel has no filter and receives no injection.  g_vals are the
    plant gains at the current (x, t); channel i couples to its neighbours
    through +g_i zeta_{i+1} and -g_{i-1} zeta_{i-1}.
    """
    n = state.n
    filter_err = np.asarray(filter_err, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    sigma_t = np.asarray(sigma_t, dtype=float)
    if filter_err.shape != (n - 1,):
        raise ValueError(f"filter_err must have shape ({n - 1},), got {filter_err.shape}")
    if g_vals.shape != (n,):
        raise ValueError(f"g_vals must have shape ({n},), got {g_vals.shape}")
    if sigma_t.shape != (n,):
        raise ValueError(f"sigma_t must have shape ({n},), got {sigma_t.shape}")
    if np.any(sigma_t <= 0.0):
        raise ValueError("all margins must be > 0")
    return np.array(
        compensator_derivatives(
            state.zeta.tolist(), state.k.tolist(), state.l.tolist(),
            filter_err.tolist(), g_vals.tolist(), float(mu_t), sigma_t.tolist(),
        )
    )
