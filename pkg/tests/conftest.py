import numpy as np
import pytest

import ctfb
from ctfb.controller import ControllerConfig
from ctfb.gain import GainSchedule, SigmaSchedule
from ctfb.plant import chain_model, reference_paper, reference_zero
from ctfb.scenario import Scenario, bundled_scenario_path, parse_scenario


@pytest.fixture(scope="session")
def paper_scenario():
    return parse_scenario(bundled_scenario_path("electromech_paper"))


@pytest.fixture(scope="session")
def paper_trace(paper_scenario):
    return ctfb.run(paper_scenario)


@pytest.fixture(scope="session")
def dsc_trace(paper_scenario):
    return ctfb.run(paper_scenario.with_variant("dsc"))


def make_chain_scenario(
    n=2,
    reference="zero",
    x0=None,
    T=0.5,
    epsilon=0.2,
    h=0.005,
    horizon=1.0,
    k=None,
    l=None,
    delta=None,
    sigma_amplitude=None,
    sigma_decay=None,
    variant="proposed",
):
    """Small integrator-chain scenario for fast closed-loop tests."""
    k = np.full(n, 2.0) if k is None else np.asarray(k, dtype=float)
    l = np.full(n, 0.5) if l is None else np.asarray(l, dtype=float)
    delta = np.full(n - 1, 0.05) if delta is None else np.asarray(delta, dtype=float)
    amp = np.full(n, 1.0) if sigma_amplitude is None else np.asarray(sigma_amplitude)
    dec = np.full(n, 0.1) if sigma_decay is None else np.asarray(sigma_decay)
    ref = reference_zero() if reference == "zero" else reference_paper()
    return Scenario(
        plant=chain_model(n),
        reference=ref,
        gain=GainSchedule(T=T, epsilon=epsilon),
        controller=ControllerConfig(
            k=k, l=l, sigma_schedule=SigmaSchedule(amplitude=amp, decay=dec), delta=delta
        ),
        x0=np.zeros(n) if x0 is None else np.asarray(x0, dtype=float),
        h=h,
        horizon=horizon,
        variant=variant,
        name=f"chain{n}_{reference}",
    )
