"""Fixed-step integration of the closed loop: plant + filters + compensator.

The flat state vector is [x | alpha_hat | zeta], dimension 3n-1.  Every
right-hand-side evaluation walks the controller cascade alpha_1 ->
d(alpha_hat_1)/dt -> alpha_2 -> ... -> u, then assembles the three derivative
blocks.  The gain and the margins are re-evaluated at each integrator stage
time; freezing them across a step visibly degrades accuracy near the gain's
corner at t = T, so the grid is also required to place T on a grid point
(no step straddles the corner with mixed gain branches).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

import math

from .compensator import compensator_derivatives
from .controller import ControllerConfig, cascade, channel_feedback
from .errors import ControllabilityLoss, NonFinite
from .gain import GainSchedule, mu as gain_mu
from .plant import PlantModel, Reference
from .scenario import Scenario, VARIANTS, VARIANT_CONSTANT_GAIN, VARIANT_DSC

__all__ = [
    "ClosedLoopState",
    "LoopSignals",
    "ClosedLoop",
    "SimTrace",
    "closed_loop_rhs",
    "rk4_step",
    "run",
    "initial_flat_state",
    "quadratic_energy",
]


@dataclass(frozen=True)
class ClosedLoopState:
    """Concatenated plant, filter, and compensator state at one instant."""

    x: np.ndarray
    alpha_hat: np.ndarray
    zeta: np.ndarray
    t: float

    def __post_init__(self):
        n = self.x.shape[0]
        if self.alpha_hat.shape != (n - 1,) or self.zeta.shape != (n,):
            raise ValueError("blocks must have sizes n, n-1, n")

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.x, self.alpha_hat, self.zeta])

    @classmethod
    def from_flat(cls, y: np.ndarray, t: float, n: int) -> "ClosedLoopState":
        y = np.asarray(y, dtype=float)
        if y.shape != (3 * n - 1,):
            raise ValueError(f"flat state must have length {3 * n - 1}, got {y.shape}")
        return cls(x=y[:n], alpha_hat=y[n : 2 * n - 1], zeta=y[2 * n - 1 :], t=t)


@dataclass(frozen=True)
class LoopSignals:
    """Everything one closed-loop evaluation produces, for stepping and logging."""

    t: float
    x: np.ndarray
    alpha_hat: np.ndarray
    zeta: np.ndarray
    z: np.ndarray
    s: np.ndarray
    alpha: np.ndarray
    u: float
    mu: float
    sigma: np.ndarray
    dy: np.ndarray


class ClosedLoop:
    """The coupled ODE for one scenario variant.

    Owns no mutable state; every evaluation is a pure function of (t, y), so
    instances can be shared across parallel runs of different scenarios.  The
    inner evaluation works on plain scalars through the same `cascade` the
    public control-law function uses, so a trace and any later re-evaluation
    of its control columns agree exactly.
    """

    def __init__(
        self,
        model: PlantModel,
        reference: Reference,
        schedule: GainSchedule,
        cfg: ControllerConfig,
        variant: str = "proposed",
        mu_const: Optional[float] = None,
    ):
        if cfg.n != model.n:
            raise ValueError("controller and plant orders disagree")
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}, expected one of {sorted(VARIANTS)}")
        self.model = model
        self.reference = reference
        self.schedule = schedule
        self.cfg = cfg
        self.variant = variant
        self.n = model.n
        if variant == VARIANT_CONSTANT_GAIN:
            self.mu_const = schedule.mu_bar if mu_const is None else float(mu_const)
            if not (self.mu_const > 0.0):
                raise ValueError("mu_const must be > 0")
        else:
            self.mu_const = None
        # plain-scalar copies for the per-stage evaluation
        self._k = cfg.k.tolist()
        self._l = cfg.l.tolist()
        self._delta = cfg.delta.tolist()
        self._sig_a = cfg.sigma_schedule.amplitude.tolist()
        self._sig_b = cfg.sigma_schedule.decay.tolist()

    def gain_value(self, t: float) -> float:
        if self.mu_const is not None:
            return self.mu_const
        return gain_mu(self.schedule, t)

    def _evaluate(self, t: float, y: np.ndarray):
        """One full loop evaluation; returns every signal as plain scalars/lists."""
        try:
            return self._evaluate_inner(t, y)
        except OverflowError:
            # scalar float arithmetic overflows loudly instead of producing inf
            raise NonFinite(t, "derivative") from None

    def _evaluate_inner(self, t: float, y: np.ndarray):
        n = self.n
        x = y[:n]
        ah = y[n : 2 * n - 1].tolist()
        compensated = self.variant != VARIANT_DSC
        zeta = y[2 * n - 1 :].tolist() if compensated else [0.0] * n

        mu_t = self.gain_value(t)
        sig = [a * math.exp(-b * t) for a, b in zip(self._sig_a, self._sig_b)]
        xd = self.reference.xd(t)
        xd_dot = self.reference.xd_dot(t)
        g = [0.0] * n
        f = [0.0] * n
        for i, (gi, fi) in enumerate(zip(self.model.g, self.model.f)):
            v = gi(x, t)
            if abs(v) < self.model.g_min:
                raise ControllabilityLoss(i + 1, t, v, self.model.g_min)
            g[i] = v
            f[i] = fi(x, t)

        x = x.tolist()
        z = [x[0] - xd] + [x[i] - ah[i - 1] for i in range(1, n)]
        s = [z[i] - zeta[i] for i in range(n)]

        delta = self._delta
        ahd_fn = lambda idx, a: mu_t * (a - ah[idx]) / delta[idx]
        alpha, u, ah_dot = cascade(
            self._k, self._l, z, s, zeta, g, f, xd_dot, ahd_fn, mu_t, sig,
            t, self.model.g_min, compensated,
        )

        dy = [g[i] * x[i + 1] + f[i] for i in range(n - 1)]
        dy.append(g[n - 1] * u + f[n - 1])
        dy += ah_dot
        if compensated:
            err = [ah[i] - alpha[i] for i in range(n - 1)]
            dy += compensator_derivatives(zeta, self._k, self._l, err, g, mu_t, sig)
        else:
            dy += [0.0] * n
        for v in dy:
            if not math.isfinite(v):
                raise NonFinite(t, "derivative")
        return x, ah, zeta, z, s, alpha, u, mu_t, sig, dy

    def signals(self, t: float, y: np.ndarray) -> LoopSignals:
        x, ah, zeta, z, s, alpha, u, mu_t, sig, dy = self._evaluate(t, y)
        return LoopSignals(
            t=t, x=np.array(x), alpha_hat=np.array(ah), zeta=np.array(zeta),
            z=np.array(z), s=np.array(s), alpha=np.array(alpha), u=u,
            mu=mu_t, sigma=np.array(sig), dy=np.array(dy),
        )

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.array(self._evaluate(t, y)[-1])


def closed_loop_rhs(
    state: ClosedLoopState,
    model: PlantModel,
    cfg: ControllerConfig,
    schedule: GainSchedule,
    reference: Reference,
    variant: str = "proposed",
    mu_const: Optional[float] = None,
) -> np.ndarray:
    """Derivative of the full closed-loop state, ordered [x | alpha_hat | zeta]."""
    loop = ClosedLoop(model, reference, schedule, cfg, variant, mu_const)
    return loop.rhs(state.t, state.flat)


def rk4_step(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t: float,
    y: np.ndarray,
    h: float,
    k1: Optional[np.ndarray] = None,
) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step for dy/dt = rhs(t, y).

    The RHS is evaluated at the stage times t, t + h/2, t + h; callers may
    pass a precomputed k1 = rhs(t, y) to avoid re-evaluating it.
    """
    if not (h > 0.0):
        raise ValueError(f"step size must be > 0, got {h}")
    if k1 is None:
        k1 = rhs(t, y)
    half = 0.5 * h
    k2 = rhs(t + half, y + half * k1)
    k3 = rhs(t + half, y + half * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def initial_flat_state(loop: ClosedLoop, x0: np.ndarray) -> np.ndarray:
    """Closed-loop state at t = 0 with matched filters and zeroed compensator.

    Filter outputs are seeded down the chain: alpha_1(0) needs no filter, so
    alpha_hat_1(0) := alpha_1(0), which makes that filter's derivative zero;
    alpha_2(0) is then computed with that zero derivative, and so on.
    """
    n = loop.n
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},), got {x0.shape}")
    cfg = loop.cfg
    mu0 = loop.gain_value(0.0)
    sig = cfg.sigma_schedule.values(0.0)
    xd = loop.reference.xd(0.0)
    xd_dot = loop.reference.xd_dot(0.0)
    g = loop.model.g_values(x0, 0.0)
    f = loop.model.f_values(x0, 0.0)
    compensated = loop.variant != VARIANT_DSC

    ah = np.empty(n - 1)
    prev_dot = xd_dot
    prev_gz = 0.0
    for i in range(n - 1):
        z_i = x0[i] - (xd if i == 0 else ah[i - 1])
        ah[i] = channel_feedback(
            cfg.k[i], cfg.l[i], mu0, float(sig[i]),
            float(z_i), float(z_i), 0.0, prev_dot, float(f[i]), prev_gz,
            compensated,
        ) / float(g[i])
        prev_dot = 0.0  # matched filter: mu * (alpha_i - alpha_hat_i) / delta_i = 0
        prev_gz = float(g[i]) * float(z_i)
    return np.concatenate([x0, ah, np.zeros(n)])


def quadratic_energy(block: np.ndarray) -> np.ndarray:
    """0.5 * sum of squares across the channel axis of a (steps, n) array."""
    block = np.asarray(block, dtype=float)
    return 0.5 * np.sum(block * block, axis=-1)


@dataclass
class SimTrace:
    """Uniform-grid record of every closed-loop signal for one run."""

    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    alpha: np.ndarray
    alpha_hat: np.ndarray
    zeta: np.ndarray
    z: np.ndarray
    s: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    V0: np.ndarray
    Vn: np.ndarray
    scenario: Optional[Scenario] = None

    def __post_init__(self):
        m = self.t.shape[0]
        if m < 2:
            raise ValueError("a trace needs at least two grid points")
        steps = np.diff(self.t)
        if not (np.all(steps > 0.0) and np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12)):
            raise ValueError("time grid must be uniform and increasing")
        for name in ("x", "u", "alpha", "alpha_hat", "zeta", "z", "s", "mu", "sigma", "V0", "Vn"):
            if getattr(self, name).shape[0] != m:
                raise ValueError(f"column block {name!r} is not aligned with the time grid")

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def h(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def horizon(self) -> float:
        return float(self.t[-1])


def run(scenario: Scenario) -> SimTrace:
    """Integrate a scenario over [0, horizon] and record every grid point.

    Deterministic: identical scenarios produce bit-identical traces.  Aborts
    with ControllabilityLoss or NonFinite, carrying the offending time.
    """
    loop = ClosedLoop(
        scenario.plant,
        scenario.reference,
        scenario.gain,
        scenario.controller,
        scenario.variant,
        scenario.mu_const,
    )
    h = scenario.h
    m = int(round(scenario.horizon / h))
    if m < 1 or abs(m * h - scenario.horizon) > 1e-9 * max(1.0, scenario.horizon):
        raise ValueError("horizon must be a positive multiple of the step size")

    n = loop.n
    t_grid = np.arange(m + 1) * h
    x = np.empty((m + 1, n))
    u = np.empty(m + 1)
    alpha = np.empty((m + 1, n - 1))
    alpha_hat = np.empty((m + 1, n - 1))
    zeta = np.empty((m + 1, n))
    z = np.empty((m + 1, n))
    s = np.empty((m + 1, n))
    mu_rec = np.empty(m + 1)
    sigma_rec = np.empty((m + 1, n))

    y = initial_flat_state(loop, scenario.x0)
    for k in range(m + 1):
        t = k * h
        sig = loop.signals(t, y)
        x[k] = sig.x
        u[k] = sig.u
        alpha[k] = sig.alpha
        alpha_hat[k] = sig.alpha_hat
        zeta[k] = sig.zeta
        z[k] = sig.z
        s[k] = sig.s
        mu_rec[k] = sig.mu
        sigma_rec[k] = sig.sigma
        if k < m:
            y = rk4_step(loop.rhs, t, y, h, k1=sig.dy)
            if not np.all(np.isfinite(y)):
                raise NonFinite((k + 1) * h, "state")

    return SimTrace(
        t=t_grid, x=x, u=u, alpha=alpha, alpha_hat=alpha_hat, zeta=zeta,
        z=z, s=s, mu=mu_rec, sigma=sigma_rec,
        V0=quadratic_energy(zeta), Vn=quadratic_energy(s),
        scenario=scenario,
    )
