import math

import numpy as np
import pytest

from ctfb.controller import ControllerConfig, control_laws, error_coordinates
from ctfb.errors import ControllabilityLoss
from ctfb.gain import SigmaSchedule


def make_config(k, l, delta=None, amp=5.0, decay=0.01):
    k = np.asarray(k, dtype=float)
    n = k.shape[0]
    return ControllerConfig(
        k=k,
        l=np.asarray(l, dtype=float),
        sigma_schedule=SigmaSchedule(amplitude=np.full(n, amp), decay=np.full(n, decay)),
        delta=np.full(n - 1, 0.01) if delta is None else np.asarray(delta, dtype=float),
    )


ZERO_AHD = lambda idx, a: 0.0


class TestErrorCoordinates:
    def test_benchmark_initial_error(self):
        coords = error_coordinates(
            np.array([0.5, 0.5, 0.5]), np.array([0.0, 0.0]), xd=0.0, zeta=np.zeros(3)
        )
        assert coords.z[0] == 0.5

    def test_perfect_match_is_zero(self):
        x = np.array([0.3, 1.1, -0.4])
        coords = error_coordinates(x, x[1:], xd=x[0], zeta=np.zeros(3))
        np.testing.assert_array_equal(coords.z, np.zeros(3))
        np.testing.assert_array_equal(coords.s, np.zeros(3))

    def test_componentwise_subtraction(self):
        coords = error_coordinates(
            np.array([1.0, 2.0]), np.array([0.0]), xd=0.0, zeta=np.array([0.5, 0.5])
        )
        np.testing.assert_array_equal(coords.z, [1.0, 2.0])
        np.testing.assert_array_equal(coords.s, [0.5, 1.5])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            error_coordinates(np.zeros(3), np.zeros(1), 0.0, np.zeros(3))
        with pytest.raises(ValueError):
            error_coordinates(np.zeros(3), np.zeros(2), 0.0, np.zeros(2))


class TestControlLaws:
    def test_all_zero_inputs_give_zero_controls(self):
        cfg = make_config([2.0, 3.0, 4.0], [1.0, 1.0, 1.0])
        coords = error_coordinates(np.zeros(3), np.zeros(2), 0.0, np.zeros(3))
        alpha, u, ah_dot = control_laws(
            cfg, coords, np.zeros(3), np.ones(3), np.zeros(3),
            xd_dot=0.0, alpha_hat_dot_fn=ZERO_AHD, mu_t=1.0, sigma_t=np.full(3, 5.0),
        )
        np.testing.assert_array_equal(alpha, np.zeros(2))
        assert u == 0.0
        np.testing.assert_array_equal(ah_dot, np.zeros(2))

    def test_single_channel_value(self):
        # one-channel reduction: u = -k mu z + xd_dot - soft(s)
        cfg = make_config([8.0], [0.1], delta=np.empty(0))
        coords = error_coordinates(np.array([0.5]), np.empty(0), 0.0, np.zeros(1))
        alpha, u, _ = control_laws(
            cfg, coords, np.zeros(1), np.ones(1), np.zeros(1),
            xd_dot=0.75, alpha_hat_dot_fn=ZERO_AHD, mu_t=1.0, sigma_t=np.full(1, 5.0),
        )
        expected = 0.75 - 4.0 - 0.5 / math.sqrt(0.25 + 25.0)
        assert u == pytest.approx(expected, rel=1e-14)
        assert u == pytest.approx(-3.3495, abs=1e-4)
        assert alpha.shape == (0,)

    def test_doubling_gain_halves_first_virtual_control(self):
        cfg = make_config([8.0, 1.0], [0.1, 0.4])
        coords = error_coordinates(
            np.array([0.5, 0.2]), np.array([0.1]), 0.0, np.zeros(2)
        )
        args = dict(
            zeta=np.zeros(2), f_vals=np.zeros(2), xd_dot=0.75,
            alpha_hat_dot_fn=ZERO_AHD, mu_t=1.0, sigma_t=np.full(2, 5.0),
        )
        alpha1, _, _ = control_laws(cfg, coords, g_vals=np.array([1.0, 1.0]), **args)
        alpha2, _, _ = control_laws(cfg, coords, g_vals=np.array([2.0, 1.0]), **args)
        assert alpha2[0] == alpha1[0] / 2.0

    def test_cascade_feeds_filter_derivatives_downstream(self):
        # the second channel must see exactly the derivative our fake filter returns
        cfg = make_config([1.0, 1.0], [1.0, 1.0])
        coords = error_coordinates(np.array([0.0, 0.0]), np.array([0.0]), 0.0, np.zeros(2))
        seen = []

        def ahd(idx, a):
            seen.append((idx, a))
            return 7.0

        _, u, ah_dot = control_laws(
            cfg, coords, np.zeros(2), np.ones(2), np.zeros(2),
            xd_dot=0.0, alpha_hat_dot_fn=ahd, mu_t=1.0, sigma_t=np.ones(2),
        )
        assert seen == [(0, 0.0)]
        assert ah_dot.tolist() == [7.0]
        assert u == 7.0  # -k mu z + ahd - f - g z - soft terms, all else zero

    def test_compensation_flag_drops_softening_terms(self):
        cfg = make_config([2.0], [5.0], delta=np.empty(0))
        coords = error_coordinates(np.array([1.0]), np.empty(0), 0.0, np.array([0.4]))
        common = dict(
            zeta=np.array([0.4]), g_vals=np.ones(1), f_vals=np.zeros(1),
            xd_dot=0.0, alpha_hat_dot_fn=ZERO_AHD, mu_t=1.0, sigma_t=np.ones(1),
        )
        _, u_on, _ = control_laws(cfg, coords, compensation=True, **common)
        _, u_off, _ = control_laws(cfg, coords, compensation=False, **common)
        assert u_off == -2.0
        soft_zeta = 0.4 / math.sqrt(0.4**2 + 1.0)
        soft_s = 0.6 / math.sqrt(0.6**2 + 1.0)
        assert u_on == pytest.approx(-2.0 - 5.0 * soft_zeta - soft_s, rel=1e-14)

    def test_controllability_guard(self):
        cfg = make_config([1.0, 1.0], [1.0, 1.0])
        coords = error_coordinates(np.zeros(2), np.zeros(1), 0.0, np.zeros(2))
        with pytest.raises(ControllabilityLoss) as info:
            control_laws(
                cfg, coords, np.zeros(2), np.array([1.0, 1e-9]), np.zeros(2),
                0.0, ZERO_AHD, 1.0, np.ones(2), t=1.5, g_min=1e-6,
            )
        assert info.value.channel == 2

    def test_config_validation_messages(self):
        with pytest.raises(ValueError, match=r"k_1 must be > 0"):
            make_config([-1.0, 1.0], [1.0, 1.0])
        with pytest.raises(ValueError, match=r"l_2 must be > 0"):
            make_config([1.0, 1.0], [1.0, 0.0])
        with pytest.raises(ValueError, match=r"delta_1 must be > 0"):
            make_config([1.0, 1.0], [1.0, 1.0], delta=np.array([-0.01]))
