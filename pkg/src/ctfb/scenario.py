"""Scenario configuration: TOML parsing, strict validation, bundled setups.

Parsing is fail-closed: unknown tables or keys are rejected, and every
constraint that is checkable from the file alone (positivity, array lengths,
the step dividing the gain's corner time T) is checked here, before a run
ever starts.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .controller import ControllerConfig
from .gain import GainSchedule, SigmaSchedule
from .plant import (
    DEFAULT_G_MIN,
    PlantModel,
    Reference,
    chain_model,
    electromechanical_model,
    reference_paper,
    reference_zero,
)

__all__ = [
    "Scenario",
    "ParseError",
    "ValidationError",
    "parse_scenario",
    "scenario_from_dict",
    "bundled_scenario_names",
    "bundled_scenario_path",
    "VARIANTS",
    "VARIANT_PROPOSED",
    "VARIANT_DSC",
    "VARIANT_CONSTANT_GAIN",
]

VARIANT_PROPOSED = "proposed"
VARIANT_DSC = "dsc"
VARIANT_CONSTANT_GAIN = "constant_gain_cfb"
VARIANTS = frozenset({VARIANT_PROPOSED, VARIANT_DSC, VARIANT_CONSTANT_GAIN})


class ParseError(ValueError):
    """The scenario file is malformed (bad TOML, unknown or missing keys)."""


class ValidationError(ValueError):
    """The scenario file parsed but violates a constraint."""


@dataclass(frozen=True)
class Scenario:
    """Everything one simulation run needs, validated and immutable."""

    plant: PlantModel
    reference: Reference
    gain: GainSchedule
    controller: ControllerConfig
    x0: np.ndarray
    h: float
    horizon: float
    variant: str = VARIANT_PROPOSED
    mu_const: Optional[float] = None
    name: str = "scenario"

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        object.__setattr__(self, "x0", x0)
        n = self.plant.n
        if self.controller.n != n:
            raise ValidationError(
                f"controller is sized for n={self.controller.n} but plant has n={n}"
            )
        if x0.shape != (n,):
            raise ValidationError(f"x0 must have {n} entries, got {x0.shape[0]}")
        if not np.all(np.isfinite(x0)):
            raise ValidationError("x0 must be finite")
        if not (self.h > 0.0):
            raise ValidationError(f"h must be > 0, got {self.h}")
        if not (self.horizon > 0.0):
            raise ValidationError(f"horizon must be > 0, got {self.horizon}")
        if not _divides(self.h, self.gain.T):
            raise ValidationError(
                f"h must divide T so the gain's corner lands on the grid "
                f"(h={self.h}, T={self.gain.T})"
            )
        if not _divides(self.h, self.horizon):
            raise ValidationError(
                f"h must divide the horizon (h={self.h}, horizon={self.horizon})"
            )
        if self.variant not in VARIANTS:
            raise ValidationError(
                f"variant must be one of {sorted(VARIANTS)}, got {self.variant!r}"
            )
        if self.mu_const is not None and not (self.mu_const > 0.0):
            raise ValidationError(f"mu_const must be > 0, got {self.mu_const}")

    @property
    def n(self) -> int:
        return self.plant.n

    @property
    def sigma(self) -> SigmaSchedule:
        return self.controller.sigma_schedule

    def with_variant(self, variant: str, mu_const: Optional[float] = None) -> "Scenario":
        return replace(
            self, variant=variant,
            mu_const=mu_const if mu_const is not None else self.mu_const,
        )


def _divides(h: float, span: float) -> bool:
    ratio = span / h
    return abs(ratio - round(ratio)) <= 1e-6 and round(ratio) >= 1


def _take(table: dict, name: str, key: str, required: bool = True, default=None):
    if key in table:
        return table.pop(key)
    if required:
        raise ParseError(f"missing key {key!r} in [{name}]")
    return default


def _no_leftovers(table: dict, name: str):
    if table:
        extras = ", ".join(sorted(table))
        raise ParseError(f"unknown key(s) in [{name}]: {extras}")


def _positive_scalar(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {value!r}") from None
    if not (v > 0.0):
        raise ValidationError(f"{name} must be > 0, got {v}")
    return v


def _float_list(value, name: str) -> list[float]:
    if not isinstance(value, (list, tuple)):
        raise ValidationError(f"{name} must be an array of numbers")
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be an array of numbers") from None


def _build_plant(table: dict) -> PlantModel:
    kind = _take(table, "plant", "kind")
    g_min = table.pop("g_min", None)
    if kind == "electromechanical":
        params = {p: float(_take(table, "plant", p)) for p in ("M", "N", "B", "Km", "H", "L")}
        _no_leftovers(table, "plant")
        try:
            model = electromechanical_model(**params)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
    elif kind == "chain":
        order = _take(table, "plant", "order")
        _no_leftovers(table, "plant")
        if not isinstance(order, int) or order < 2:
            raise ValidationError(f"chain order must be an integer >= 2, got {order!r}")
        model = chain_model(order)
    else:
        raise ValidationError(
            f"unknown plant kind {kind!r}, expected 'electromechanical' or 'chain'"
        )
    if g_min is not None:
        model = PlantModel(
            n=model.n, g=model.g, f=model.f,
            g_min=_positive_scalar(g_min, "g_min"), name=model.name,
        )
    return model


def _build_reference(table: dict) -> Reference:
    kind = _take(table, "reference", "kind")
    _no_leftovers(table, "reference")
    if kind == "paper":
        return reference_paper()
    if kind == "zero":
        return reference_zero()
    raise ValidationError(f"unknown reference kind {kind!r}, expected 'paper' or 'zero'")


def scenario_from_dict(data: dict, name: str = "scenario") -> Scenario:
    """Assemble and validate a Scenario from parsed TOML data (fail-closed)."""
    data = dict(data)
    name = data.pop("name", name)

    def table(key: str) -> dict:
        raw = data.pop(key, None)
        if raw is None:
            raise ParseError(f"missing table [{key}]")
        if not isinstance(raw, dict):
            raise ParseError(f"[{key}] must be a table")
        return dict(raw)

    plant = _build_plant(table("plant"))
    reference = _build_reference(table("reference"))

    gain_tbl = table("gain")
    T = _positive_scalar(_take(gain_tbl, "gain", "T"), "T")
    epsilon = _positive_scalar(_take(gain_tbl, "gain", "epsilon"), "epsilon")
    _no_leftovers(gain_tbl, "gain")
    try:
        gain = GainSchedule(T=T, epsilon=epsilon)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    ctl_tbl = table("controller")
    k = _float_list(_take(ctl_tbl, "controller", "k"), "k")
    l = _float_list(_take(ctl_tbl, "controller", "l"), "l")
    delta = _float_list(_take(ctl_tbl, "controller", "delta"), "delta")
    _no_leftovers(ctl_tbl, "controller")

    sig_tbl = table("sigma")
    amplitude = _float_list(_take(sig_tbl, "sigma", "amplitude"), "sigma amplitude")
    decay = _float_list(_take(sig_tbl, "sigma", "decay"), "sigma decay")
    _no_leftovers(sig_tbl, "sigma")
    try:
        sigma_schedule = SigmaSchedule(
            amplitude=np.asarray(amplitude), decay=np.asarray(decay)
        )
        controller = ControllerConfig(
            k=np.asarray(k), l=np.asarray(l),
            sigma_schedule=sigma_schedule, delta=np.asarray(delta),
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    sim_tbl = table("sim")
    x0 = _float_list(_take(sim_tbl, "sim", "x0"), "x0")
    h = _positive_scalar(_take(sim_tbl, "sim", "h"), "h")
    horizon = _positive_scalar(_take(sim_tbl, "sim", "horizon"), "horizon")
    variant = _take(sim_tbl, "sim", "variant", required=False, default=VARIANT_PROPOSED)
    mu_const = _take(sim_tbl, "sim", "mu_const", required=False)
    _no_leftovers(sim_tbl, "sim")
    if mu_const is not None:
        mu_const = _positive_scalar(mu_const, "mu_const")

    if data:
        extras = ", ".join(sorted(str(k) for k in data))
        raise ParseError(f"unknown top-level key(s): {extras}")

    return Scenario(
        plant=plant, reference=reference, gain=gain, controller=controller,
        x0=np.asarray(x0), h=h, horizon=horizon,
        variant=str(variant), mu_const=mu_const, name=str(name),
    )


def parse_scenario(path) -> Scenario:
    """Load, parse, and validate a scenario TOML file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from None
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML in {path}: {exc}") from None
    return scenario_from_dict(data, name=path.stem)


def _scenario_dir():
    return resources.files("ctfb") / "scenarios"


def bundled_scenario_names() -> list[str]:
    """Names of the scenario files shipped with the package."""
    return sorted(
        p.name[: -len(".toml")] for p in _scenario_dir().iterdir() if p.name.endswith(".toml")
    )


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a bundled scenario by name (without extension)."""
    candidate = _scenario_dir() / f"{name}.toml"
    with resources.as_file(candidate) as p:
        if not p.exists():
            raise ParseError(
                f"no bundled scenario named {name!r}; available: "
                + ", ".join(bundled_scenario_names())
            )
        return Path(p)
