"""Command-filtered backstepping with a bounded time-varying gain.

Simulation of strict-feedback plants under a prescribed-time controller
stack (gain schedule, first-order command filters, error compensator,
backstepping laws), plus numerical certification of the closed loop's decay
certificates along recorded trajectories.
"""

from .analysis import (
    CertificateReport,
    TrackingMetrics,
    certify_trace,
    lyapunov_series,
    run_baseline,
    tracking_metrics,
)
from .compensator import CompensatorState, compensator_rhs, soft_sign
from .controller import ControllerConfig, ErrorCoordinates, control_laws, error_coordinates
from .errors import ControllabilityLoss, NonFinite, SimulationError
from .filters import FilterBank, alpha_hat_dot, filter_rhs
from .gain import GainSchedule, SigmaSchedule, mu, sigma
from .plant import (
    PlantModel,
    Reference,
    chain_model,
    electromechanical_model,
    plant_rhs,
    reference_paper,
    reference_zero,
)
from .scenario import Scenario, parse_scenario
from .sim import ClosedLoop, ClosedLoopState, SimTrace, closed_loop_rhs, rk4_step, run

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "TrackingMetrics",
    "certify_trace",
    "lyapunov_series",
    "run_baseline",
    "tracking_metrics",
    "CompensatorState",
    "compensator_rhs",
    "soft_sign",
    "ControllerConfig",
    "ErrorCoordinates",
    "control_laws",
    "error_coordinates",
    "ControllabilityLoss",
    "NonFinite",
    "SimulationError",
    "FilterBank",
    "alpha_hat_dot",
    "filter_rhs",
    "GainSchedule",
    "SigmaSchedule",
    "mu",
    "sigma",
    "PlantModel",
    "Reference",
    "chain_model",
    "electromechanical_model",
    "plant_rhs",
    "reference_paper",
    "reference_zero",
    "Scenario",
    "parse_scenario",
    "ClosedLoop",
    "ClosedLoopState",
    "SimTrace",
    "closed_loop_rhs",
    "rk4_step",
    "run",
]
