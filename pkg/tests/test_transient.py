import math

import numpy as np
import pytest
from scipy.linalg import expm

import retrialsi as rs
from retrialsi import ModelConfig
from retrialsi.errors import DomainError

STENCIL_MOVES = {(1, 0), (-1, 0), (1, -1), (0, 1)}


class TestUniformize:
    def test_zero_time_returns_p0(self, wellmixed_generator, wellmixed_p0):
        out = rs.uniformize(wellmixed_generator, wellmixed_p0, 0.0)
        np.testing.assert_array_equal(out.values, wellmixed_p0.values)

    def test_two_state_closed_form(self, two_state_toy):
        p0 = rs.ProbabilityVector([1.0, 0.0], 0.0, "uniformization")
        out = rs.uniformize(two_state_toy, p0, 1.0)
        expected = [(1 + math.exp(-2)) / 2, (1 - math.exp(-2)) / 2]
        np.testing.assert_allclose(out.values, expected, atol=1e-10)

    @pytest.mark.parametrize("t", [0.5, 2.0, 20.0])
    def test_matches_dense_matrix_exponential(self, wellmixed_generator, wellmixed_p0, t):
        out = rs.uniformize(wellmixed_generator, wellmixed_p0, t)
        dense = wellmixed_p0.values @ expm(wellmixed_generator.toarray() * t)
        assert np.abs(out.values - dense).max() <= 1e-9

    def test_conservation(self, wellmixed_generator, wellmixed_p0):
        for t in (0.1, 1.0, 10.0, 100.0):
            out = rs.uniformize(wellmixed_generator, wellmixed_p0, t)
            assert abs(out.total - 1.0) <= 1e-12
            assert out.values.min() >= 0.0

    def test_semigroup(self, wellmixed_generator, wellmixed_p0):
        eps = 1e-10
        direct = rs.uniformize(wellmixed_generator, wellmixed_p0, 3.0, eps)
        stepped = rs.uniformize(
            wellmixed_generator, rs.uniformize(wellmixed_generator, wellmixed_p0, 1.2, eps), 1.8, eps)
        assert np.abs(direct.values - stepped.values).max() <= 2 * eps + 1e-12

    def test_domain_checks(self, wellmixed_generator, wellmixed_p0):
        with pytest.raises(DomainError):
            rs.uniformize(wellmixed_generator, wellmixed_p0, -1.0)
        for eps in (0.0, 1e-5):
            with pytest.raises(DomainError):
                rs.uniformize(wellmixed_generator, wellmixed_p0, 1.0, eps)

    def test_timestamp_accumulates(self, wellmixed_generator, wellmixed_p0):
        mid = rs.uniformize(wellmixed_generator, wellmixed_p0, 1.5)
        out = rs.uniformize(wellmixed_generator, mid, 2.5)
        assert out.t == pytest.approx(4.0)


class TestTransientGrid:
    def test_time_zero_grid(self, wellmixed_generator, wellmixed_p0):
        sol = rs.transient_grid(wellmixed_generator, wellmixed_p0, [0.0])
        np.testing.assert_array_equal(sol.vectors[0].values, wellmixed_p0.values)

    def test_stepwise_equals_direct(self, wellmixed_generator, wellmixed_p0):
        eps = 1e-10
        sol = rs.transient_grid(wellmixed_generator, wellmixed_p0, [0.5, 2.0, 5.0], eps)
        direct = rs.uniformize(wellmixed_generator, wellmixed_p0, 5.0, eps)
        assert np.abs(sol.vectors[-1].values - direct.values).max() <= 2 * eps + 1e-12

    def test_grid_validation(self, wellmixed_generator, wellmixed_p0):
        with pytest.raises(DomainError):
            rs.transient_grid(wellmixed_generator, wellmixed_p0, [])
        with pytest.raises(DomainError):
            rs.transient_grid(wellmixed_generator, wellmixed_p0, [2.0, 1.0])
        with pytest.raises(DomainError):
            rs.transient_grid(wellmixed_generator, wellmixed_p0, [-1.0, 1.0])

    def test_metadata_and_lookup(self, wellmixed_generator, wellmixed_p0):
        sol = rs.transient_grid(wellmixed_generator, wellmixed_p0, [1.0, 2.0])
        assert sol.metadata["method"] == "uniformization"
        assert sol.at(2.0).t == pytest.approx(2.0)
        with pytest.raises(DomainError):
            sol.at(3.0)


class TestGillespie:
    def test_first_jump_from_empty_system(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        for seed in range(20):
            traj = rs.simulate_gillespie(wellmixed_config, rate, horizon=1.0, seed=seed)
            assert tuple(traj.states[0]) == (0, 0)
            if len(traj) > 1:
                assert tuple(traj.states[1]) == (1, 0)

    def test_seed_determinism(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        a = rs.simulate_gillespie(wellmixed_config, rate, horizon=5.0, seed=77)
        b = rs.simulate_gillespie(wellmixed_config, rate, horizon=5.0, seed=77)
        c = rs.simulate_gillespie(wellmixed_config, rate, horizon=5.0, seed=78)
        assert np.array_equal(a.times, b.times) and np.array_equal(a.states, b.states)
        assert not np.array_equal(a.times, c.times)

    def test_trajectory_stays_on_stencil(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        traj = rs.simulate_gillespie(wellmixed_config, rate, horizon=50.0, seed=3)
        assert len(traj) > 50
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times.max() <= traj.horizon
        moves = {tuple(d) for d in np.diff(traj.states, axis=0)}
        assert moves <= STENCIL_MOVES
        for (i, _), move in zip(traj.states[:-1], np.diff(traj.states, axis=0)):
            if tuple(move) == (0, 1):
                assert i == wellmixed_config.c  # orbit arrivals only when units saturated

    def test_holding_time_at_origin(self, wellmixed_config):
        # exit rate at (0,0) is alpha = 5, so holding times average 0.2
        rate = rs.rate_function(wellmixed_config)
        first = []
        for seed in range(30000):
            traj = rs.simulate_gillespie(wellmixed_config, rate, horizon=2.0, seed=seed)
            if len(traj) > 1:
                first.append(traj.times[1])
        mean = np.mean(first)
        se = np.std(first, ddof=1) / math.sqrt(len(first))
        assert abs(mean - 0.2) <= 3 * se

    def test_bad_horizon(self, wellmixed_config):
        with pytest.raises(DomainError):
            rs.simulate_gillespie(wellmixed_config, rs.rate_function(wellmixed_config), 0.0, 1)

    def test_csv_dump(self, wellmixed_config, tmp_path):
        traj = rs.simulate_gillespie(wellmixed_config, rs.rate_function(wellmixed_config), 2.0, 5)
        out = tmp_path / "traj.csv"
        with open(out, "w") as f:
            traj.write_csv(f)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "time,i,j"
        assert len(lines) - 1 == len(traj)
        assert lines[1] == "0.0,0,0"


class TestMonteCarlo:
    def test_time_zero_is_point_mass(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        mc = rs.monte_carlo_estimate(wellmixed_config, rate, [0.0, 1.0], 1000, seed=1)
        first = mc.solution.vectors[0]
        assert first.values[wellmixed_config.space.index(0, 0)] == 1.0
        assert first.total == 1.0

    def test_counts_are_exactly_normalized(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        mc = rs.monte_carlo_estimate(wellmixed_config, rate, [2.0], 2000, seed=9)
        assert mc.solution.vectors[0].total == pytest.approx(1.0, abs=1e-15)

    def test_seed_determinism(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        a = rs.monte_carlo_estimate(wellmixed_config, rate, [1.0, 3.0], 2000, seed=4)
        b = rs.monte_carlo_estimate(wellmixed_config, rate, [1.0, 3.0], 2000, seed=4)
        for va, vb in zip(a.solution.vectors, b.solution.vectors):
            np.testing.assert_array_equal(va.values, vb.values)

    def test_agrees_with_uniformization(self, wellmixed_config, wellmixed_generator, wellmixed_p0):
        rate = rs.rate_function(wellmixed_config)
        replicas = 20000
        mc = rs.monte_carlo_estimate(wellmixed_config, rate, [2.0], replicas, seed=20260810)
        exact = rs.uniformize(wellmixed_generator, wellmixed_p0, 2.0)
        for moment in (rs.moment_recovering, rs.moment_orbit):
            var = (moment(exact, 2) - moment(exact) ** 2)
            se = math.sqrt(var / replicas)
            assert abs(moment(mc.solution.vectors[0]) - moment(exact)) <= 3 * se

    def test_replica_floor(self, wellmixed_config):
        with pytest.raises(DomainError):
            rs.monte_carlo_estimate(wellmixed_config, rs.rate_function(wellmixed_config), [1.0], 999, 0)

    def test_standard_errors_shape(self, wellmixed_config):
        rate = rs.rate_function(wellmixed_config)
        mc = rs.monte_carlo_estimate(wellmixed_config, rate, [1.0, 2.0], 1000, seed=2)
        assert len(mc.standard_errors) == 2
        assert mc.standard_errors[0].shape == (wellmixed_config.space.size,)
        assert mc.solution.metadata["rng"] == "pcg64"


class TestContainers:
    def test_trajectory_validation(self):
        with pytest.raises(DomainError):
            rs.Trajectory(np.array([0.0, 0.0]), np.array([[0, 0], [1, 0]]), 1.0, 0)

    def test_transient_solution_validation(self, wellmixed_config, wellmixed_p0):
        with pytest.raises(DomainError):
            rs.TransientSolution(np.array([1.0, 1.0]), [wellmixed_p0, wellmixed_p0])

    def test_probability_vector_guards(self, wellmixed_config):
        with pytest.raises(DomainError):
            rs.ProbabilityVector(np.zeros((2, 2)), 0.0, "ilt")
        with pytest.raises(DomainError):
            rs.ProbabilityVector(np.zeros(7), 0.0, "ilt", wellmixed_config.space)

    def test_clipped_restores_distribution(self, wellmixed_config):
        values = np.full(36, 1.0 / 36)
        values[0] = -1e-5
        values[1] += 1e-5 + 1.0 / 36
        vec = rs.ProbabilityVector(values / values.sum(), 1.0, "ilt", wellmixed_config.space)
        clean = vec.clipped()
        assert clean.values.min() >= 0.0
        assert clean.total == pytest.approx(1.0)
