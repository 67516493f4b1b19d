import numpy as np
import pytest

import retrialsi as rs
from retrialsi import GeneratorMatrix, ModelConfig
from retrialsi.errors import DomainError, ModelError
from retrialsi.laplace import DEFAULT_S_GRID

SMALL_CONFIGS = [(2, 1), (10, 5), (20, 5), (20, 15)]  # all |state space| <= 100


def make_gen(N, c, theta=2.0):
    cfg = ModelConfig(N=N, c=c, alpha=5.0, mu=0.4, theta=theta)
    return cfg, rs.build_generator(cfg, rs.rate_function(cfg))


class TestAssemble:
    def test_tiny_blocks_by_hand(self, tiny_generator):
        # N=2, c=1: lambda(0,0)=5, lambda(0,1)=2.5, lambda(1,0)=2.5
        sys_ = rs.assemble_resolvent(tiny_generator, s=1.0)
        np.testing.assert_allclose(sys_.sub_blocks[0], np.diag([-0.4, -0.4]))
        np.testing.assert_allclose(sys_.super_blocks[0], [[-5.0, 0.0], [-2.0, -2.5]])
        np.testing.assert_allclose(sys_.diag_blocks[0], np.diag([1.0 + 5.0, 1.0 + 2.5 + 2.0]))
        # top orbit row: arrival to orbit leaves (1,0); nothing leaves (1,1) but recovery
        np.testing.assert_allclose(sys_.diag_blocks[1],
                                   [[1.0 + 2.5 + 0.4, -2.5], [0.0, 1.0 + 0.4]])

    @pytest.mark.parametrize("N,c", SMALL_CONFIGS[1:])
    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    def test_blocks_reassemble_exactly(self, N, c, s):
        _, gen = make_gen(N, c)
        sys_ = rs.assemble_resolvent(gen, s)
        m = s * np.eye(gen.dim) - gen.toarray()
        assert np.array_equal(sys_.to_dense(), m)

    def test_block_shapes(self):
        cfg, gen = make_gen(10, 5)
        sys_ = rs.assemble_resolvent(gen, 1.0)
        w = cfg.space.width
        for i, a in enumerate(sys_.diag_blocks[:-1]):
            assert np.count_nonzero(a - np.diag(np.diag(a))) == 0, f"A_{i} not diagonal"
        a_c = sys_.diag_blocks[-1]
        assert np.count_nonzero(np.tril(a_c, -1)) == 0
        assert np.count_nonzero(np.triu(a_c, 2)) == 0
        for b in sys_.super_blocks:
            assert np.count_nonzero(np.triu(b, 1)) == 0
            assert np.count_nonzero(np.tril(b, -2)) == 0
        for i, cblock in enumerate(sys_.sub_blocks, start=1):
            np.testing.assert_allclose(cblock, -i * cfg.mu * np.eye(w))

    def test_nonpositive_s_rejected(self, wellmixed_generator):
        for s in (0.0, -1.0):
            with pytest.raises(DomainError):
                rs.assemble_resolvent(wellmixed_generator, s)


class TestSolveResolvent:
    @pytest.mark.parametrize("N,c", SMALL_CONFIGS)
    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    def test_block_solve_matches_dense(self, N, c, s):
        cfg, gen = make_gen(N, c)
        p0 = rs.delta_vector(cfg.space, (0, 0))
        sys_ = rs.assemble_resolvent(gen, s)
        sol = rs.solve_resolvent(sys_, p0)
        dense = np.linalg.solve(sys_.to_dense().T, p0.values)
        assert np.abs(sol.pstar - dense).max() <= 1e-10

    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    def test_total_transform_mass(self, wellmixed_generator, wellmixed_p0, s):
        sol = rs.solve_resolvent(rs.assemble_resolvent(wellmixed_generator, s), wellmixed_p0)
        assert abs(s * sol.total - 1.0) <= 1e-10

    def test_large_s_initial_value(self, wellmixed_generator, wellmixed_p0):
        s = 1e6
        sol = rs.solve_resolvent(rs.assemble_resolvent(wellmixed_generator, s), wellmixed_p0)
        assert np.abs(s * sol.pstar - wellmixed_p0.values).max() <= 1e-4

    def test_resolvent_identity(self, wellmixed_generator, wellmixed_p0):
        s = 1.0
        sol = rs.solve_resolvent(rs.assemble_resolvent(wellmixed_generator, s), wellmixed_p0)
        residual = s * sol.pstar - sol.pstar @ wellmixed_generator.toarray() - wellmixed_p0.values
        assert np.abs(residual).max() <= 1e-10

    def test_transform_nonnegative(self, wellmixed_generator, wellmixed_p0):
        for s in (0.05, 0.5, 5.0):
            sol = rs.solve_resolvent(rs.assemble_resolvent(wellmixed_generator, s), wellmixed_p0)
            assert sol.pstar.min() >= -1e-12

    def test_refined_solve_consistent(self, wellmixed_generator, wellmixed_p0):
        sys_ = rs.assemble_resolvent(wellmixed_generator, 0.7)
        x64 = sys_.solve(wellmixed_p0.values)
        xext = sys_.solve_refined(wellmixed_p0.values)
        assert xext.dtype == np.longdouble
        assert np.abs(xext.astype(float) - x64).max() <= 1e-12
        residual = wellmixed_p0.values - sys_.apply_transpose_extended(xext).astype(float)
        assert np.abs(residual).max() <= 1e-15

    def test_p0_validation(self, wellmixed_generator, wellmixed_config):
        sys_ = rs.assemble_resolvent(wellmixed_generator, 1.0)
        bad = rs.ProbabilityVector(np.full(36, 0.5), 0.0, "ilt", wellmixed_config.space)
        with pytest.raises(DomainError):
            rs.solve_resolvent(sys_, bad)


class TestStationaryNullspace:
    def test_two_state_toy(self, two_state_toy):
        pi = rs.stationary_nullspace(two_state_toy)
        np.testing.assert_allclose(pi.values, [0.5, 0.5], atol=1e-14)
        assert pi.provenance is rs.Provenance.STATIONARY

    def test_normalization(self, wellmixed_generator):
        pi = rs.stationary_nullspace(wellmixed_generator)
        assert abs(pi.total - 1.0) <= 1e-12
        assert pi.values.min() >= 0.0

    def test_agrees_with_long_horizon(self, wellmixed_generator, wellmixed_p0):
        pi = rs.stationary_nullspace(wellmixed_generator)
        late = rs.uniformize(wellmixed_generator, wellmixed_p0, 200.0)
        assert np.abs(pi.values - late.values).max() <= 1e-6

    def test_residual_small(self, wellmixed_generator):
        pi = rs.stationary_nullspace(wellmixed_generator)
        assert np.abs(pi.values @ wellmixed_generator.toarray()).max() <= 1e-10

    def test_no_retrials_still_unique(self):
        # theta = 0 leaves transient states but a single recurrent class
        cfg = ModelConfig(N=10, c=5, alpha=5.0, mu=0.4, theta=0.0)
        gen = rs.build_generator(cfg, rs.rate_function(cfg))
        pi = rs.stationary_nullspace(gen)
        grid = pi.values.reshape(6, 6)
        assert grid[:, -1].sum() == pytest.approx(1.0)  # all mass at a full orbit

    def test_reducible_chain_rejected(self):
        blocks = np.zeros((4, 4))
        blocks[:2, :2] = [[-1.0, 1.0], [1.0, -1.0]]
        blocks[2:, 2:] = [[-2.0, 2.0], [2.0, -2.0]]
        with pytest.raises(ModelError):
            rs.stationary_nullspace(GeneratorMatrix.from_dense(blocks))


class TestStationaryFvt:
    def test_agrees_with_nullspace(self, wellmixed_generator, wellmixed_p0):
        result = rs.stationary_fvt(wellmixed_generator, wellmixed_p0)
        pi = rs.stationary_nullspace(wellmixed_generator)
        assert result.converged
        assert np.abs(result.vector.values - pi.values).max() <= 1e-5

    def test_mass_identity_along_grid(self, wellmixed_generator, wellmixed_p0):
        for s in DEFAULT_S_GRID:
            sol = rs.solve_resolvent(rs.assemble_resolvent(wellmixed_generator, s), wellmixed_p0)
            assert abs(s * sol.total - 1.0) <= 1e-10

    def test_tiny_matches_dense_stationary(self, tiny_generator, tiny_config):
        p0 = rs.delta_vector(tiny_config.space, (0, 0))
        result = rs.stationary_fvt(tiny_generator, p0)
        q = tiny_generator.toarray()
        a = np.vstack([q.T, np.ones(4)])
        b = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
        pi, *_ = np.linalg.lstsq(a, b, rcond=None)
        assert np.abs(result.vector.values - pi).max() <= 1e-5

    def test_successive_diffs_shrink(self, wellmixed_generator, wellmixed_p0):
        result = rs.stationary_fvt(wellmixed_generator, wellmixed_p0)
        diffs = result.successive_diffs
        assert len(diffs) == len(DEFAULT_S_GRID) - 1
        assert diffs[-1] < diffs[0]

    def test_grid_validation(self, wellmixed_generator, wellmixed_p0):
        with pytest.raises(DomainError):
            rs.stationary_fvt(wellmixed_generator, wellmixed_p0, s_grid=(1e-3, 1e-2))
        with pytest.raises(DomainError):
            rs.stationary_fvt(wellmixed_generator, wellmixed_p0, s_grid=())

    def test_nonconvergence_warns(self, wellmixed_generator, wellmixed_p0):
        with pytest.warns(UserWarning):
            result = rs.stationary_fvt(wellmixed_generator, wellmixed_p0, s_grid=(1.0, 0.5))
        assert not result.converged
