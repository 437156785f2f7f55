from __future__ import annotations

import numpy as np
import pytest

from saturnet import InputError, equilibrium_set, simulate

from conftest import C_STAR, X_MAX_STAR, X_MIN_STAR, random_network

TOL_DYN = 1e-8


class TestSimulate:
    def test_rest_point_stays_put(self, triangle):
        traj = simulate(triangle, C_STAR, X_MIN_STAR, t_end=1.0, dt=0.01)
        assert traj.residual <= 1e-12
        assert np.max(np.abs(traj.states - X_MIN_STAR)) <= 1e-12

    def test_settles_at_minimal_from_below(self, triangle):
        traj = simulate(triangle, C_STAR, np.zeros(3), t_end=200.0, dt=0.01, stop_tol=1e-12)
        assert traj.residual <= TOL_DYN
        assert np.max(np.abs(traj.terminal - X_MIN_STAR)) <= TOL_DYN

    def test_settles_at_maximal_from_above(self, triangle):
        traj = simulate(triangle, C_STAR, triangle.w, t_end=200.0, dt=0.01, stop_tol=1e-12)
        assert np.max(np.abs(traj.terminal - X_MAX_STAR)) <= TOL_DYN

    def test_forward_invariance(self):
        rng = np.random.default_rng(111)
        for _ in range(25):
            net = random_network(rng, n_max=6)
            c = rng.uniform(-3, 3, net.n)
            x0 = rng.uniform(0, 1, net.n) * net.w
            traj = simulate(net, c, x0, t_end=30.0, dt=0.02)
            assert np.all(traj.states >= -TOL_DYN)
            assert np.all(traj.states <= net.w + TOL_DYN)

    def test_ordered_starts_stay_ordered(self):
        rng = np.random.default_rng(113)
        for _ in range(20):
            net = random_network(rng, n_max=6)
            c = rng.uniform(-2, 2, net.n)
            a = rng.uniform(0, 1, net.n) * net.w
            b = a + rng.uniform(0, 1, net.n) * (net.w - a)
            ta = simulate(net, c, a, t_end=20.0, dt=0.02)
            tb = simulate(net, c, b, t_end=20.0, dt=0.02)
            assert ta.states.shape == tb.states.shape
            assert np.all(ta.states <= tb.states + 1e-9)

    def test_terminal_lands_on_the_equilibrium_set(self):
        rng = np.random.default_rng(115)
        for _ in range(20):
            net = random_network(rng, n_max=6)
            c = rng.uniform(-2, 2, net.n)
            x0 = rng.uniform(0, 1, net.n) * net.w
            traj = simulate(net, c, x0, t_end=300.0, dt=0.02, stop_tol=1e-11)
            assert traj.residual <= 1e-6
            assert equilibrium_set(net, c).distance_sup(traj.terminal) <= 1e-4

    def test_sampling_and_early_stop(self, triangle):
        traj = simulate(triangle, C_STAR, np.zeros(3), t_end=50.0, dt=0.01,
                        sample_every=10, stop_tol=1e-10)
        assert traj.times[0] == 0.0
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[-1] < 50.0  # stopped early
        assert np.array_equal(traj.states[-1], traj.terminal)

    def test_csv_format(self, triangle):
        traj = simulate(triangle, C_STAR, np.zeros(3), t_end=0.05, dt=0.01)
        lines = traj.to_csv().strip().split("\n")
        assert lines[0] == "t,x_1,x_2,x_3"
        assert len(lines) == len(traj.times) + 1

    def test_input_validation(self, triangle):
        with pytest.raises(InputError):
            simulate(triangle, C_STAR, np.zeros(3), dt=0.0)
        with pytest.raises(InputError):
            simulate(triangle, C_STAR, np.zeros(3), t_end=0.001, dt=0.01)
        with pytest.raises(InputError):
            simulate(triangle, C_STAR, np.zeros(2))
        with pytest.raises(InputError):
            simulate(triangle, C_STAR, [np.nan, 0.0, 0.0])
