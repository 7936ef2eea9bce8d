import math
from dataclasses import replace

import numpy as np
import pytest

import ctfb
from ctfb.errors import ControllabilityLoss, NonFinite
from ctfb.gain import GainSchedule, mu
from ctfb.plant import PlantModel, chain_model
from ctfb.sim import (
    ClosedLoop,
    ClosedLoopState,
    closed_loop_rhs,
    initial_flat_state,
    rk4_step,
    run,
)

from conftest import make_chain_scenario

# frozen from a converged reference run of the benchmark configuration
BENCH_U0 = 18.25588994151265
BENCH_ALPHA0 = (-3.349503719020999, 18.56869706302254)
BENCH_DY0 = (0.5, -23.028245006954897, 15.182973274845981, 0.0, 0.0, 0.0, 0.0, 0.0)


class TestRk4Step:
    def test_exponential_decay(self):
        rhs = lambda t, y: -y
        y = np.array([1.0])
        for k in range(100):
            y = rk4_step(rhs, k * 0.01, y, 0.01)
        assert abs(y[0] - math.exp(-1.0)) <= 1e-9

    def test_zero_rhs_keeps_state(self):
        y = np.array([1.0, -2.0])
        out = rk4_step(lambda t, y: np.zeros(2), 0.0, y, 0.1)
        np.testing.assert_array_equal(out, y)

    def test_constant_rhs_exact(self):
        out = rk4_step(lambda t, y: np.ones(1), 0.0, np.array([1.0]), 0.1)
        assert out[0] == 1.1

    def test_cubic_quadrature_exact(self):
        # stage weights integrate t^3 exactly: y(h) = h^4 / 4
        h = 0.2
        out = rk4_step(lambda t, y: np.array([t**3]), 0.0, np.array([0.0]), h)
        assert out[0] == pytest.approx(h**4 / 4.0, rel=1e-15)

    def test_rejects_nonpositive_step(self):
        for h in (0.0, -0.1):
            with pytest.raises(ValueError):
                rk4_step(lambda t, y: y, 0.0, np.array([1.0]), h)

    def test_gain_evaluated_at_stage_times(self):
        # quadrature of the gain across its corner-adjacent step; freezing the
        # gain at the step start would err at the 1e-4 level here
        sched = GainSchedule(T=2.0, epsilon=0.5)
        h = 0.01
        rhs = lambda t, y: np.array([mu(sched, t)])
        out = rk4_step(rhs, sched.T - h, np.array([0.0]), h)
        c = sched.T + sched.epsilon
        exact = c * math.log((sched.epsilon + h) / sched.epsilon)
        assert abs(out[0] - exact) <= 1e-9


class TestClosedLoopState:
    def test_flat_round_trip(self):
        state = ClosedLoopState(
            x=np.array([1.0, 2.0, 3.0]),
            alpha_hat=np.array([4.0, 5.0]),
            zeta=np.array([6.0, 7.0, 8.0]),
            t=0.5,
        )
        again = ClosedLoopState.from_flat(state.flat, 0.5, 3)
        np.testing.assert_array_equal(again.x, state.x)
        np.testing.assert_array_equal(again.alpha_hat, state.alpha_hat)
        np.testing.assert_array_equal(again.zeta, state.zeta)

    def test_rejects_misshaped_blocks(self):
        with pytest.raises(ValueError):
            ClosedLoopState(x=np.zeros(3), alpha_hat=np.zeros(3), zeta=np.zeros(3), t=0.0)
        with pytest.raises(ValueError):
            ClosedLoopState.from_flat(np.zeros(7), 0.0, 3)


class TestClosedLoopRhs:
    def test_equilibrium_probe(self):
        sc = make_chain_scenario(n=3, reference="zero")
        state = ClosedLoopState(x=np.zeros(3), alpha_hat=np.zeros(2), zeta=np.zeros(3), t=0.0)
        dy = closed_loop_rhs(state, sc.plant, sc.controller, sc.gain, sc.reference)
        np.testing.assert_array_equal(dy, np.zeros(8))

    def test_benchmark_start_against_hand_cascade(self, paper_scenario):
        sc = paper_scenario
        loop = ClosedLoop(sc.plant, sc.reference, sc.gain, sc.controller)
        y0 = initial_flat_state(loop, sc.x0)
        sig = loop.signals(0.0, y0)

        # independent reimplementation of the three channel laws at t = 0
        f2 = -48.75 * math.sin(0.5) - 0.3125 * 0.5
        f3 = -0.9375 * 0.5 - (5.0 / 0.96) * 0.5
        z1 = 0.5
        a1 = -8.0 * z1 + 0.75 - 0.5 / math.sqrt(0.25 + 25.0)
        z2 = 0.5 - a1
        a2 = -z2 - f2 - z1 - z2 / math.sqrt(z2 * z2 + 25.0)
        z3 = 0.5 - a2
        u = -z3 - f3 - z2 - z3 / math.sqrt(z3 * z3 + 25.0)

        assert sig.alpha[0] == pytest.approx(a1, rel=1e-14)
        assert sig.alpha[1] == pytest.approx(a2, rel=1e-14)
        assert sig.u == pytest.approx(u, rel=1e-14)
        np.testing.assert_allclose(
            sig.dy[:3], [0.5, 0.5 + f2, u + f3], rtol=1e-14
        )
        # regression pin against the frozen reference values
        assert sig.u == pytest.approx(BENCH_U0, rel=1e-15)
        np.testing.assert_allclose(sig.alpha, BENCH_ALPHA0, rtol=1e-15)
        np.testing.assert_allclose(sig.dy, BENCH_DY0, rtol=1e-14, atol=1e-300)

    def test_matched_filters_start_at_rest(self, paper_scenario):
        sc = paper_scenario
        loop = ClosedLoop(sc.plant, sc.reference, sc.gain, sc.controller)
        y0 = initial_flat_state(loop, sc.x0)
        sig = loop.signals(0.0, y0)
        np.testing.assert_array_equal(y0[3:5], sig.alpha)  # alpha_hat(0) = alpha(0)
        np.testing.assert_array_equal(sig.dy[3:5], np.zeros(2))

    def test_nonfinite_drift_detected(self):
        one = lambda x, t: 1.0
        model = PlantModel(
            n=2, g=(one, one), f=(lambda x, t: math.nan, lambda x, t: 0.0)
        )
        sc = make_chain_scenario(n=2)
        state = ClosedLoopState(x=np.zeros(2), alpha_hat=np.zeros(1), zeta=np.zeros(2), t=0.25)
        with pytest.raises(NonFinite) as info:
            closed_loop_rhs(state, model, sc.controller, sc.gain, sc.reference)
        assert info.value.t == 0.25


class TestRun:
    def test_deterministic(self, paper_scenario):
        sc = replace(paper_scenario, horizon=2.0)
        a, b = ctfb.run(sc), ctfb.run(sc)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.u, b.u)
        np.testing.assert_array_equal(a.zeta, b.zeta)

    def test_zero_error_start_stays_on_reference(self):
        sc = make_chain_scenario(n=3, reference="zero", horizon=2.0, h=0.005)
        trace = ctfb.run(sc)
        assert np.max(np.abs(trace.z[:, 0])) <= 1e-12

    def test_grid_and_shapes(self, paper_trace):
        m = paper_trace.t.shape[0]
        assert m == 10001
        assert paper_trace.x.shape == (m, 3)
        assert paper_trace.alpha.shape == (m, 2)
        assert paper_trace.h == pytest.approx(1e-3, rel=1e-12)
        assert paper_trace.t[0] == 0.0 and paper_trace.t[-1] == pytest.approx(10.0)

    def test_convergence_order_on_smooth_chain(self):
        base = make_chain_scenario(
            n=2, reference="paper", x0=[0.3, -0.2], T=0.5, epsilon=0.2,
            horizon=1.0, k=[2.0, 2.0], l=[0.5, 0.5], delta=[0.05],
        )
        finals = {}
        for h in (0.01, 0.005, 0.0025):
            tr = ctfb.run(replace(base, h=h))
            finals[h] = np.concatenate([tr.x[-1], tr.alpha_hat[-1], tr.zeta[-1]])
        e1 = np.max(np.abs(finals[0.01] - finals[0.005]))
        e2 = np.max(np.abs(finals[0.005] - finals[0.0025]))
        assert math.log2(e1 / e2) >= 3.5

    def test_divergence_aborts_with_timestamp(self):
        # a 0.1 ms filter driven at a 50 ms step is far outside the stability
        # region; the blow-up must surface as NonFinite, not raw overflow
        sc = make_chain_scenario(
            n=2, reference="zero", x0=[0.5, 0.0], T=0.5, epsilon=0.2,
            h=0.05, horizon=5.0, delta=[1e-4],
        )
        with np.errstate(all="ignore"):
            with pytest.raises(NonFinite) as info:
                ctfb.run(sc)
        assert 0.0 < info.value.t <= 5.0

    def test_controllability_loss_aborts_with_timestamp(self):
        drifting_gain = lambda x, t: 1.0 - t  # crosses zero at t = 1
        one = lambda x, t: 1.0
        zero = lambda x, t: 0.0
        model = PlantModel(n=2, g=(drifting_gain, one), f=(zero, zero), g_min=1e-6)
        sc = make_chain_scenario(n=2, reference="zero", x0=[0.1, 0.0], horizon=2.0)
        sc = replace(sc, plant=model)
        with pytest.raises(ControllabilityLoss) as info:
            ctfb.run(sc)
        assert info.value.channel == 1
        assert info.value.t == pytest.approx(1.0, abs=2 * sc.h)

    def test_rejects_misaligned_horizon(self, paper_scenario):
        from ctfb.scenario import ValidationError

        with pytest.raises(ValidationError):
            replace(paper_scenario, horizon=10.0005)
