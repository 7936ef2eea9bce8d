"""Runtime failures shared across the simulation stack."""


class SimulationError(RuntimeError):
    """Base class for aborted runs."""


class ControllabilityLoss(SimulationError):
    """A control gain dropped below the floor, so the loop lost its handle on the plant.

    Carries the offending channel (1-based), the evaluation time, and the
    gain value that broke the floor.
    """

    def __init__(self, channel: int, t: float, value: float, g_min: float):
        self.channel = channel
        self.t = t
        self.value = value
        self.g_min = g_min
        super().__init__(
            f"|g_{channel}| = {abs(value):.3e} < g_min = {g_min:.3e} at t = {t:.6f}"
        )


class NonFinite(SimulationError):
    """A state or derivative entry became NaN or infinite."""

    def __init__(self, t: float, what: str = "state"):
        self.t = t
        self.what = what
        super().__init__(f"non-finite {what} at t = {t:.6f}")
