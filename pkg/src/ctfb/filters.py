"""Bank of first-order command filters with a shared time-varying gain.

Each filter smooths one virtual control:

    delta_i * d(alpha_hat_i)/dt = mu(t) * (alpha_i - alpha_hat_i)

The bank holds n-1 filters: the last channel produces the actual input u
directly and needs no smoothing.  Filters start matched, alpha_hat_i(0) =
alpha_i(0), so the loop opens with zero filter error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FilterBank", "filter_rhs", "alpha_hat_dot", "component_dot"]


@dataclass
class FilterBank:
    """Time constants delta_i and the current filter outputs alpha_hat_i."""

    delta: np.ndarray
    alpha_hat: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        a = np.atleast_1d(np.asarray(self.alpha_hat, dtype=float))
        if d.ndim != 1 or a.shape != d.shape:
            raise ValueError("delta and alpha_hat must be 1-d arrays of equal length")
        if np.any(d <= 0.0):
            raise ValueError("all time constants delta_i must be > 0")
        self.delta = d
        self.alpha_hat = a

    @property
    def size(self) -> int:
        return self.delta.shape[0]


def filter_rhs(bank: FilterBank, alpha: np.ndarray, mu_t: float) -> np.ndarray:
    """Derivative of every filter output for the given virtual controls."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != bank.alpha_hat.shape:
        raise ValueError(
            f"alpha must have shape {bank.alpha_hat.shape}, got {alpha.shape}"
        )
    return mu_t * (alpha - bank.alpha_hat) / bank.delta


def component_dot(bank: FilterBank, alpha_i: float, mu_t: float, idx: int) -> float:
    """Derivative of filter `idx` (0-based) given only its own input value."""
    return mu_t * (alpha_i - bank.alpha_hat[idx]) / bank.delta[idx]


def alpha_hat_dot(bank: FilterBank, alpha: np.ndarray, mu_t: float, i: int) -> float:
    """Derivative of filter i (1-based), identical to that component of `filter_rhs`.

    This is how downstream consumers obtain d(alpha_hat_i)/dt: re-evaluate the
    filter dynamics, never finite-difference the output signal.
    """
    if not (1 <= i <= bank.size):
        raise IndexError(f"filter index must be in 1..{bank.size}, got {i}")
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != bank.alpha_hat.shape:
        raise ValueError(
            f"alpha must have shape {bank.alpha_hat.shape}, got {alpha.shape}"
        )
    return component_dot(bank, float(alpha[i - 1]), mu_t, i - 1)
