import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from corrsep import states as st
from corrsep.correlation import correlation_tensor
from corrsep.criteria import family_gap, ppt_check
from corrsep.exceptions import DimensionError, DomainError
from corrsep.linalg_core import numerical_rank, partial_trace, trace_norm

# printed 9x9 matrix of the noisy chessboard state (4 decimals)
PRINTED_CHESSBOARD = np.array([
    [0.0964, 0, -0.1118, 0, 0, 0, 0.0450, 0, 0],
    [0, 0.0505, 0, 0, 0, -0.0506, 0, -0.0218, 0],
    [-0.1118, 0, 0.2641, 0, 0.0753, 0, 0, 0, 0],
    [0, 0, 0, 0.0505, 0, 0.0165, 0, -0.0671, 0],
    [0, 0, 0.0753, 0, 0.0964, 0, 0.0668, 0, 0],
    [0, -0.0506, 0, 0.0165, 0, 0.1191, 0, 0, 0],
    [0.0450, 0, 0, 0, 0.0668, 0, 0.1082, 0, 0],
    [0, -0.0218, 0, -0.0671, 0, 0, 0, 0.1931, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0.0215],
])


def assert_density_matrix(rho, tol=1e-10):
    m = rho.mat
    np.testing.assert_allclose(m, m.conj().T, atol=tol)
    assert np.trace(m).real == pytest.approx(1, abs=tol)
    assert np.linalg.eigvalsh(m)[0] >= -1e-9


class TestValidation:
    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError, match="Hermitian"):
            st.DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), (2,))

    def test_rejects_bad_trace(self):
        with pytest.raises(DomainError, match="trace"):
            st.DensityMatrix(np.eye(2), (2,))

    def test_rejects_negative(self):
        with pytest.raises(DomainError, match="positive"):
            st.DensityMatrix(np.diag([1.5, -0.5]), (2,))

    def test_rejects_dims(self):
        with pytest.raises(DimensionError):
            st.DensityMatrix(np.eye(4) / 4, (2, 3))

    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            st.DensityMatrix(np.full((2, 2), np.nan), (2,))

    def test_stored_copy_is_read_only_and_caller_untouched(self):
        raw = np.eye(2) / 2
        rho = st.DensityMatrix(raw, (2,))
        raw[0, 0] = 7
        assert rho.mat[0, 0] == 0.5
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 1

    def test_rounded_mode_accepts_printed_matrix(self):
        with pytest.raises(DomainError):
            st.DensityMatrix(PRINTED_CHESSBOARD, (3, 3))
        rho = st.DensityMatrix(PRINTED_CHESSBOARD, (3, 3), rounded=True)
        assert rho.rounded


class TestRudolph:
    def test_zero_parameters(self):
        np.testing.assert_allclose(st.rudolph_state(0, 0, 0).mat, np.diag([0.5, 0, 0, 0.5]))

    def test_npt_for_nonzero_t(self):
        rho = st.rudolph_state(0, 0, 0.5)
        assert np.linalg.eigvalsh(rho.partial_transpose())[0] < 0

    def test_rejects_non_psd_with_eigenvalue(self):
        with pytest.raises(DomainError, match="eigenvalue -"):
            st.rudolph_state(0.1, 0.2, 1.2)

    def test_npt_iff_t_nonzero(self):
        for r, s, t in [(0.1, 0.3, 0.0), (0.1, 0.3, 0.05), (-0.5, 0.5, -0.2)]:
            assert ppt_check(st.rudolph_state(r, s, t)).detected == (t != 0)


class TestChessboard:
    def test_matches_printed_matrix(self):
        rho = st.noisy_chessboard()
        assert np.max(np.abs(rho.mat - PRINTED_CHESSBOARD)) < 5e-4
        assert np.abs(rho.mat.imag).max() == 0

    def test_ppt(self):
        assert np.linalg.eigvalsh(st.noisy_chessboard().partial_transpose())[0] >= -1e-9

    def test_single_nonzero_parameter_d_is_pure(self):
        rho = st.chessboard_state(d=1.0)
        assert rho.purity() == pytest.approx(1)
        assert rho.mat[7, 7] == pytest.approx(1)

    def test_parameter_a_alone_gives_rank_two(self):
        # a appears in two of the four vectors
        rho = st.chessboard_state(a=1.0)
        assert numerical_rank(rho.mat) == 2
        assert rho.purity() == pytest.approx(0.5)

    def test_rank_at_most_four(self):
        assert numerical_rank(st.chessboard_state(**st.CHESSBOARD_PARAMS).mat) <= 4

    def test_all_zero_rejected(self):
        with pytest.raises(DomainError):
            st.chessboard_state()


class TestUpb:
    @pytest.mark.parametrize("kind", ["tiles", "pyramid"])
    def test_vectors_orthonormal_products(self, kind):
        V = st.upb_vectors(kind)
        np.testing.assert_allclose(V.conj() @ V.T, np.eye(5), atol=1e-14)
        for v in V:
            assert numerical_rank(v.reshape(3, 3)) == 1

    @pytest.mark.parametrize("kind", ["tiles", "pyramid"])
    def test_state_is_ppt_rank_four(self, kind):
        rho = st.upb_state(kind)
        assert_density_matrix(rho)
        assert numerical_rank(rho.mat) == 4
        assert not ppt_check(rho).detected

    def test_pyramid_apex_height(self):
        h = 0.5 * np.sqrt(1 + np.sqrt(5))
        a, _ = st.pyramid_upb()[0]
        assert a[2] / a[0] == pytest.approx(h)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            st.upb_state("cube")


class TestNoise:
    def test_endpoints(self):
        rho = st.bell_state()
        np.testing.assert_allclose(st.mix_with_white_noise(rho, 1).mat, rho.mat)
        np.testing.assert_allclose(st.mix_with_white_noise(rho, 0).mat, np.eye(4) / 4)

    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_out_of_range(self, p):
        with pytest.raises(DomainError):
            st.mix_with_white_noise(st.bell_state(), p)

    def test_family_callable(self):
        fam = st.upb_family("tiles")
        assert "tiles" in fam.label
        np.testing.assert_allclose(fam(0.0).mat, np.eye(9) / 9)


class TestStandardStates:
    def test_bell(self):
        rho = st.bell_state()
        assert numerical_rank(rho.mat) == 1
        np.testing.assert_allclose(rho.marginal(0), np.eye(2) / 2, atol=1e-15)
        np.testing.assert_allclose(rho.marginal(1), np.eye(2) / 2, atol=1e-15)

    def test_ghz_pure(self):
        assert st.ghz_state(3).purity() == pytest.approx(1)

    def test_w_marginal(self):
        rho = st.w_state(3)
        for k in range(3):
            np.testing.assert_allclose(partial_trace(rho.mat, rho.dims, k), np.diag([2 / 3, 1 / 3]), atol=1e-15)

    def test_too_few_parties(self):
        with pytest.raises(DomainError):
            st.ghz_state(1)
        with pytest.raises(DomainError):
            st.w_state(1)


class TestRandom:
    @settings(max_examples=30, deadline=None)
    @given(hst.integers(0, 10**6), hst.sampled_from([(2, 2), (2, 3), (3, 4), (2, 2, 2)]), hst.booleans())
    def test_samplers_give_density_matrices(self, seed, dims, pure):
        assert_density_matrix(st.random_product_state(dims, seed, pure))
        assert_density_matrix(st.random_separable_state(dims, 3, seed, pure))
        assert_density_matrix(st.random_state(dims, seed))

    def test_seeded_reproducible(self):
        a = st.random_separable_state((2, 3), 4, seed=11)
        b = st.random_separable_state((2, 3), 4, seed=11)
        np.testing.assert_array_equal(a.mat, b.mat)

    def test_pure_product_qubits_unit_ccnr_norm(self):
        for seed in range(5):
            rho = st.random_product_state((2, 2), seed, pure=True)
            assert trace_norm(correlation_tensor(rho).matrix()) == pytest.approx(1, abs=1e-10)

    def test_separable_mixture_not_detected_by_ccnr(self):
        for seed in range(20):
            rho = st.random_separable_state((3, 3), 3, seed)
            assert family_gap(rho, 1, 1).gap >= -1e-10

    def test_random_state_rank(self):
        assert numerical_rank(st.random_state((2, 3), seed=1, rank=2).mat) == 2

    def test_bad_term_count(self):
        with pytest.raises(DomainError):
            st.random_separable_state((2, 2), 0, seed=1)
