"""Strict-feedback plant abstraction and the two bundled models.

A plant of order n is the cascade

    dx_i/dt = g_i(x, t) * x_{i+1} + f_i(x, t),   i = 1..n-1
    dx_n/dt = g_n(x, t) * u       + f_n(x, t)

with every |g_i| bounded away from zero (the controllability floor g_min).
The floor is enforced at evaluation time rather than proven symbolically,
since it is a modeling assumption about the supplied g_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ControllabilityLoss

__all__ = [
    "PlantModel",
    "Reference",
    "plant_rhs",
    "electromechanical_model",
    "chain_model",
    "reference_paper",
    "reference_zero",
    "DEFAULT_G_MIN",
]

DEFAULT_G_MIN = 1e-6

Evaluator = Callable[[np.ndarray, float], float]


@dataclass(frozen=True)
class PlantModel:
    """Order n plus per-channel evaluators for the gains g_i and drifts f_i."""

    n: int
    g: Sequence[Evaluator]
    f: Sequence[Evaluator]
    g_min: float = DEFAULT_G_MIN
    name: str = "custom"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"system order must be >= 2, got n={self.n}")
        if len(self.g) != self.n or len(self.f) != self.n:
            raise ValueError("need exactly n gain and n drift evaluators")
        if not (self.g_min > 0.0):
            raise ValueError(f"g_min must be > 0, got {self.g_min}")

    def g_values(self, x: np.ndarray, t: float) -> np.ndarray:
        """All gains at (x, t); raises ControllabilityLoss below the floor."""
        out = np.empty(self.n)
        for i, gi in enumerate(self.g):
            v = gi(x, t)
            if abs(v) < self.g_min:
                raise ControllabilityLoss(i + 1, t, v, self.g_min)
            out[i] = v
        return out

    def f_values(self, x: np.ndarray, t: float) -> np.ndarray:
        """All drift terms at (x, t)."""
        return np.array([fi(x, t) for fi in self.f])


@dataclass(frozen=True)
class Reference:
    """Desired output trajectory and its time derivative."""

    xd: Callable[[float], float]
    xd_dot: Callable[[float], float]
    name: str = "custom"


def plant_rhs(model: PlantModel, x: np.ndarray, u: float, t: float) -> np.ndarray:
    """State derivative of the open-loop plant driven by input u."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise ValueError(f"state must have shape ({model.n},), got {x.shape}")
    g = model.g_values(x, t)
    f = model.f_values(x, t)
    dx = np.empty(model.n)
    dx[:-1] = g[:-1] * x[1:] + f[:-1]
    dx[-1] = g[-1] * u + f[-1]
    return dx


def electromechanical_model(
    M: float, N: float, B: float, Km: float, H: float, L: float
) -> PlantModel:
    """Third-order motor-driven mechanical arm in strict-feedback form.

    x_1 is link angle, x_2 its velocity, x_3 the motor current surrogate; the
    gravity torque enters as sin(x_1).  M and L sit in denominators and must
    be positive; the remaining coefficients may be zero (dropping the
    corresponding physical effect) but not negative.
    """
    for name, val in (("M", M), ("L", L)):
        if not (val > 0.0):
            raise ValueError(f"{name} must be > 0, got {val}")
    for name, val in (("N", N), ("B", B), ("Km", Km), ("H", H)):
        if val < 0.0:
            raise ValueError(f"{name} must be >= 0, got {val}")

    n_over_m = N / M
    b_over_m = B / M
    km_over_ml = Km / (M * L)
    h_over_ml = H / (M * L)

    one = lambda x, t: 1.0
    f1 = lambda x, t: 0.0
    f2 = lambda x, t: -n_over_m * math.sin(x[0]) - b_over_m * x[1]
    f3 = lambda x, t: -km_over_ml * x[1] - h_over_ml * x[2]

    return PlantModel(
        n=3, g=(one, one, one), f=(f1, f2, f3), name="electromechanical"
    )


def chain_model(n: int) -> PlantModel:
    """Pure integrator chain of order n (g_i = 1, f_i = 0)."""
    one = lambda x, t: 1.0
    zero = lambda x, t: 0.0
    return PlantModel(n=n, g=(one,) * n, f=(zero,) * n, name="chain")


def reference_paper() -> Reference:
    """Two-tone benchmark reference 0.5 sin(t) + 0.5 sin(0.5 t)."""
    return Reference(
        xd=lambda t: 0.5 * math.sin(t) + 0.5 * math.sin(0.5 * t),
        xd_dot=lambda t: 0.5 * math.cos(t) + 0.25 * math.cos(0.5 * t),
        name="paper",
    )


def reference_zero() -> Reference:
    """Constant zero reference (regulation problem)."""
    return Reference(xd=lambda t: 0.0, xd_dot=lambda t: 0.0, name="zero")
