"""Post-hoc certification and comparison of recorded trajectories.

Certification re-derives every checkable quantity from the raw trace columns
and the scenario: algebraic consistency (the recorded z, s, V, gains, margins
and control values must agree with their defining formulas), then the
differential decay conditions on the compensated-error energy Vn and the
compensator energy V0, checked through central finite differences against an
explicit O(h) tolerance envelope.  Nothing is trusted from a trace that can
be recomputed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .controller import control_laws, error_coordinates
from .filters import FilterBank, component_dot
from .gain import mu_grid, sigma_grid
from .scenario import Scenario, VARIANT_CONSTANT_GAIN, VARIANT_DSC
from .sim import SimTrace, quadratic_energy, run

__all__ = [
    "LyapunovSeries",
    "CheckResult",
    "CertificateReport",
    "TrackingMetrics",
    "lyapunov_series",
    "certify_trace",
    "tracking_metrics",
    "run_baseline",
    "BASELINE_VARIANTS",
]

BASELINE_VARIANTS = (VARIANT_DSC, VARIANT_CONSTANT_GAIN)

# Finite-difference acceptance envelope: central differencing of a recorded
# energy is trusted to 10 * h * max|dV/dt|, plus a tiny absolute floor for
# traces that sit at zero.
FD_ENVELOPE_FACTOR = 10.0
FD_ENVELOPE_FLOOR = 1e-12


@dataclass(frozen=True)
class LyapunovSeries:
    """Energies V0 (compensator) and Vn (compensated errors) with derivatives."""

    t: np.ndarray
    V0: np.ndarray
    Vn: np.ndarray
    dV0: np.ndarray
    dVn: np.ndarray


def finite_difference(values: np.ndarray, h: float) -> np.ndarray:
    """Central differences in the interior, one-sided at both endpoints."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        raise ValueError("need at least two samples to differentiate")
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    d[0] = (values[1] - values[0]) / h
    d[-1] = (values[-1] - values[-2]) / h
    return d


def lyapunov_series(trace: SimTrace) -> LyapunovSeries:
    """Recompute both energies from the raw zeta and s columns."""
    V0 = quadratic_energy(trace.zeta)
    Vn = quadratic_energy(trace.s)
    h = trace.h
    return LyapunovSeries(
        t=trace.t, V0=V0, Vn=Vn,
        dV0=finite_difference(V0, h), dVn=finite_difference(Vn, h),
    )


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one per-step certification check."""

    name: str
    passed: bool
    violations: int
    max_violation: float
    tolerance: float
    points: int

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"{status}  {self.name}: {self.violations} violation(s) over "
            f"{self.points} points, worst {self.max_violation:.3e}, "
            f"tolerance {self.tolerance:.3e}"
        )


@dataclass
class CertificateReport:
    """Constants, measured bounds, and per-inequality outcomes for one trace."""

    scenario_name: str
    variant: str
    K1: float
    K0: float
    Gamma0: float
    Gamma2_at_T: float
    mu_bar: float
    V0_initial: float
    Vn_initial: float
    omega_s: float
    omega_zeta: float
    omega_z: float
    tau: np.ndarray
    g_max: np.ndarray
    side_condition: np.ndarray
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def side_condition_held(self) -> bool:
        return bool(np.all(self.side_condition))

    @property
    def passed(self) -> bool:
        """Certification verdict.

        The compensator-decay inequality only counts when its measured side
        condition (every pull-in gain l_i at least g_max_i * tau_i) held.
        """
        for c in self.checks:
            if c.name == "compensator_decay" and not self.side_condition_held:
                continue
            if not c.passed:
                return False
        return True

    def violated_checks(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def summary_text(self) -> str:
        lines = [
            f"certificate report for {self.scenario_name} (variant {self.variant})",
            f"  K1 = {self.K1:.6g}   K0 = {self.K0:.6g}   Gamma0 = {self.Gamma0:.6g}"
            f"   Gamma2(T) = {self.Gamma2_at_T:.6g}   mu_bar = {self.mu_bar:.6g}",
            f"  V0(0) = {self.V0_initial:.6g}   Vn(0) = {self.Vn_initial:.6g}",
            f"  residual bounds: omega_s = {self.omega_s:.6g}   "
            f"omega_zeta = {self.omega_zeta:.6g}   omega_z = {self.omega_z:.6g}",
            "  measured filter-error bounds tau_i = "
            + ", ".join(f"{v:.3e}" for v in self.tau),
            "  measured gain bounds g_max_i = "
            + ", ".join(f"{v:.3e}" for v in self.g_max),
            "  side condition l_i >= g_max_i * tau_i: "
            + ("HELD" if self.side_condition_held else "NOT HELD")
            + " ("
            + ", ".join(
                f"channel {i + 1}: {'ok' if ok else 'violated'}"
                for i, ok in enumerate(self.side_condition)
            )
            + ")",
        ]
        for c in self.checks:
            lines.append("  " + c.line())
        lines.append(f"  verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def rows(self) -> list[tuple[str, str]]:
        """Flat key/value rows for the machine-readable report sidecar."""
        out = [
            ("scenario", self.scenario_name),
            ("variant", self.variant),
            ("K1", repr(self.K1)),
            ("K0", repr(self.K0)),
            ("Gamma0", repr(self.Gamma0)),
            ("Gamma2_at_T", repr(self.Gamma2_at_T)),
            ("mu_bar", repr(self.mu_bar)),
            ("V0_initial", repr(self.V0_initial)),
            ("Vn_initial", repr(self.Vn_initial)),
            ("omega_s", repr(self.omega_s)),
            ("omega_zeta", repr(self.omega_zeta)),
            ("omega_z", repr(self.omega_z)),
        ]
        for i, v in enumerate(self.tau):
            out.append((f"tau_{i + 1}", repr(float(v))))
        for i, v in enumerate(self.g_max):
            out.append((f"g_max_{i + 1}", repr(float(v))))
        for i, ok in enumerate(self.side_condition):
            out.append((f"side_condition_{i + 1}", "held" if ok else "violated"))
        out.append(("side_condition", "held" if self.side_condition_held else "violated"))
        for c in self.checks:
            out.append((f"check_{c.name}", "pass" if c.passed else "fail"))
            out.append((f"check_{c.name}_violations", str(c.violations)))
            out.append((f"check_{c.name}_max_violation", repr(c.max_violation)))
            out.append((f"check_{c.name}_tolerance", repr(c.tolerance)))
        out.append(("verdict", "pass" if self.passed else "fail"))
        return out


def _check_from_excess(name: str, excess: np.ndarray, tol: float) -> CheckResult:
    """Package per-point violation magnitudes (positive = violated by that much)."""
    excess = np.asarray(excess, dtype=float)
    bad = excess > tol
    worst = float(np.max(excess)) if excess.size else 0.0
    return CheckResult(
        name=name,
        passed=not bool(np.any(bad)),
        violations=int(np.count_nonzero(bad)),
        max_violation=max(worst, 0.0),
        tolerance=tol,
        points=int(excess.size),
    )


def _fd_tolerance(dV: np.ndarray, h: float) -> float:
    return FD_ENVELOPE_FACTOR * h * float(np.max(np.abs(dV))) + FD_ENVELOPE_FLOOR


def _consistency_checks(trace: SimTrace, scenario: Scenario) -> list[CheckResult]:
    """Recompute every algebraic column and compare against the recorded one."""
    rtol, atol = 1e-9, 1e-12
    checks = []

    def agreement(name: str, recorded: np.ndarray, recomputed: np.ndarray) -> None:
        scale = np.maximum(np.abs(recomputed), atol / rtol)
        excess = np.abs(np.asarray(recorded) - recomputed) - rtol * scale
        if excess.ndim > 1:
            excess = excess.reshape(excess.shape[0], -1).max(axis=1)
        checks.append(_check_from_excess(name, excess, 0.0))

    t = trace.t
    n = trace.n
    xd = np.array([scenario.reference.xd(tk) for tk in t])
    z = np.empty_like(trace.z)
    z[:, 0] = trace.x[:, 0] - xd
    z[:, 1:] = trace.x[:, 1:] - trace.alpha_hat
    agreement("consistency_z", trace.z, z)
    agreement("consistency_s", trace.s, trace.z - trace.zeta)
    agreement("consistency_V0", trace.V0, quadratic_energy(trace.zeta))
    agreement("consistency_Vn", trace.Vn, quadratic_energy(trace.s))

    if scenario.variant == VARIANT_CONSTANT_GAIN:
        mu_expected = np.full_like(t, scenario.mu_const or scenario.gain.mu_bar)
    else:
        mu_expected = mu_grid(scenario.gain, t)
    agreement("consistency_mu", trace.mu, mu_expected)
    agreement("consistency_sigma", trace.sigma, sigma_grid(scenario.sigma, t))

    # Re-run the control-law cascade on the recorded states.
    cfg = scenario.controller
    model = scenario.plant
    alpha_rec = np.empty_like(trace.alpha)
    u_rec = np.empty_like(trace.u)
    compensated = scenario.variant != VARIANT_DSC
    for k, tk in enumerate(t):
        xk = trace.x[k]
        g = model.g_values(xk, tk)
        f = model.f_values(xk, tk)
        coords = error_coordinates(xk, trace.alpha_hat[k], float(xd[k]), trace.zeta[k])
        bank = FilterBank(delta=cfg.delta, alpha_hat=trace.alpha_hat[k])
        alpha_k, u_k, _ = control_laws(
            cfg, coords, trace.zeta[k], g, f,
            scenario.reference.xd_dot(tk),
            lambda idx, a: component_dot(bank, a, trace.mu[k], idx),
            trace.mu[k], trace.sigma[k],
            t=tk, g_min=model.g_min, compensation=compensated,
        )
        alpha_rec[k] = alpha_k
        u_rec[k] = u_k
    agreement("consistency_alpha", trace.alpha, alpha_rec)
    agreement("consistency_u", trace.u, u_rec)
    return checks


def certify_trace(trace: SimTrace, scenario: Optional[Scenario] = None) -> CertificateReport:
    """Check the decay certificates and column consistency of one trace.

    The trace's own scenario is used unless one is supplied.  Only the
    compensated variants are certifiable; the plain filtered variant (dsc)
    does not satisfy the decay identity and is rejected.
    """
    scenario = scenario if scenario is not None else trace.scenario
    if scenario is None:
        raise ValueError("certification needs the trace's scenario")
    if trace.t.shape[0] < 3:
        raise ValueError("trace is too short to certify")
    if scenario.variant == VARIANT_DSC:
        raise ValueError(
            "the dsc variant drops the compensation terms; its trace does not "
            "carry a decay certificate"
        )
    T = scenario.gain.T
    if trace.horizon <= T:
        raise ValueError(
            f"trace must extend beyond T={T} to cover both gain branches "
            f"(horizon {trace.horizon})"
        )

    cfg = scenario.controller
    h = trace.h
    t = trace.t
    k_gains = cfg.k
    l_gains = cfg.l
    K1 = 2.0 * float(np.min(k_gains))
    mu_bar = scenario.gain.mu_bar
    K0 = mu_bar * K1
    sigma0 = scenario.sigma.values(0.0)
    Gamma0 = float(np.sum(l_gains * sigma0))

    series = lyapunov_series(trace)
    V0_initial = float(series.V0[0])
    Vn_initial = float(series.Vn[0])
    eps = scenario.gain.epsilon
    omega_s = math.exp(-K1 * (T + T * T / eps)) * Vn_initial
    omega_zeta = (
        math.exp(-K0 * T) * V0_initial + (1.0 - math.exp(-K0 * T)) * Gamma0 / K0
    )
    omega_z = omega_s + omega_zeta

    checks = _consistency_checks(trace, scenario)

    # Measured filter-error bounds and plant-gain bounds for the side condition.
    tau = np.max(np.abs(trace.alpha_hat - trace.alpha), axis=0)
    g_all = np.empty((t.shape[0], trace.n))
    for k, tk in enumerate(t):
        g_all[k] = scenario.plant.g_values(trace.x[k], tk)
    g_max = np.max(np.abs(g_all), axis=0)
    side = l_gains[: trace.n - 1] >= g_max[: trace.n - 1] * tau

    pre_T = t < T
    post_T = ~pre_T
    mu_rec = trace.mu
    sig_rec = trace.sigma
    s2 = trace.s * trace.s
    soft_drain = np.sum(s2 / np.sqrt(s2 + sig_rec * sig_rec), axis=1)
    dVn_expected = -np.sum(k_gains * s2, axis=1) * mu_rec - soft_drain

    tol_n = _fd_tolerance(series.dVn, h)
    checks.append(
        _check_from_excess(
            "decay_identity_pre_T",
            np.abs(series.dVn[pre_T] - dVn_expected[pre_T]),
            tol_n,
        )
    )
    checks.append(
        _check_from_excess(
            "decay_rate_pre_T",
            series.dVn[pre_T] - (-K1 * mu_rec[pre_T] * series.Vn[pre_T]),
            tol_n,
        )
    )
    gamma2 = np.sum(sig_rec, axis=1)
    checks.append(
        _check_from_excess(
            "decay_rate_post_T",
            series.dVn[post_T]
            - (-K1 * mu_rec[post_T] * series.Vn[post_T] + gamma2[post_T]),
            tol_n,
        )
    )

    zeta2 = trace.zeta * trace.zeta
    dV0_bound = -np.sum(k_gains * zeta2, axis=1) * mu_rec + np.sum(l_gains * sig_rec, axis=1)
    tol_0 = _fd_tolerance(series.dV0, h)
    checks.append(
        _check_from_excess("compensator_decay", series.dV0 - dV0_bound, tol_0)
    )

    return CertificateReport(
        scenario_name=scenario.name,
        variant=scenario.variant,
        K1=K1, K0=K0, Gamma0=Gamma0,
        Gamma2_at_T=float(np.sum(scenario.sigma.values(T))), mu_bar=mu_bar,
        V0_initial=V0_initial, Vn_initial=Vn_initial,
        omega_s=omega_s, omega_zeta=omega_zeta, omega_z=omega_z,
        tau=tau, g_max=g_max, side_condition=side,
        checks=checks,
    )


@dataclass(frozen=True)
class TrackingMetrics:
    """Scalar tracking-quality numbers for gating and comparison tables."""

    max_abs_z1_after_T: float
    terminal_abs_z1: float
    window: tuple[float, float]
    window_max_abs_z1: float
    settling_time: Optional[float]
    settling_threshold: float

    def row(self) -> dict:
        return {
            "max|z1| after T": self.max_abs_z1_after_T,
            f"max|z1| on [{self.window[0]:g},{self.window[1]:g}]": self.window_max_abs_z1,
            "terminal |z1|": self.terminal_abs_z1,
            f"settling time (|z1|<={self.settling_threshold:g})": (
                self.settling_time if self.settling_time is not None else math.nan
            ),
        }


def tracking_metrics(
    trace: SimTrace,
    window: Optional[tuple[float, float]] = None,
    settling_threshold: float = 0.05,
) -> TrackingMetrics:
    """Tracking-error metrics of one trace (needs horizon beyond T)."""
    scenario = trace.scenario
    if scenario is None:
        raise ValueError("tracking metrics need the trace's scenario")
    T = scenario.gain.T
    if trace.horizon <= T:
        raise ValueError("trace must extend beyond T for tracking metrics")
    if window is None:
        window = (0.8 * trace.horizon, trace.horizon)
    lo, hi = window
    if not (0.0 <= lo < hi <= trace.horizon + 1e-12):
        raise ValueError(f"window {window} outside the trace span")

    z1 = np.abs(trace.z[:, 0])
    after_T = trace.t >= T
    in_window = (trace.t >= lo) & (trace.t <= hi)
    below = z1 <= settling_threshold
    settling = None
    # first time from which |z1| stays at or below the threshold
    if below[-1]:
        above = np.nonzero(~below)[0]
        settling = float(trace.t[above[-1] + 1]) if above.size else float(trace.t[0])
    return TrackingMetrics(
        max_abs_z1_after_T=float(np.max(z1[after_T])),
        terminal_abs_z1=float(z1[-1]),
        window=(float(lo), float(hi)),
        window_max_abs_z1=float(np.max(z1[in_window])),
        settling_time=settling,
        settling_threshold=settling_threshold,
    )


def run_baseline(scenario: Scenario, variant: str) -> SimTrace:
    """Re-run a scenario as one of the two ablation baselines.

    dsc removes the compensator and both softening terms (plain filtered
    backstepping with the same time-varying gain); constant_gain_cfb keeps
    the full stack but pins the gain at mu_const (the gain cap by default).
    """
    if variant not in BASELINE_VARIANTS:
        raise ValueError(
            f"baseline variant must be one of {BASELINE_VARIANTS}, got {variant!r}"
        )
    return run(scenario.with_variant(variant))
