import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst
from scipy.stats import ortho_group

from corrsep import states as st
from corrsep.bases import canonical_basis
from corrsep.correlation import norm_factor
from corrsep.criteria import family_gap
from corrsep.exceptions import DimensionError, DomainError
from corrsep.linalg_core import kron
from corrsep.witnesses import (
    build_witness,
    export_witness,
    load_witness,
    witness_expectation,
    witness_from_isometry,
)


@pytest.mark.parametrize(
    "make,x,y",
    [
        (st.bell_state, 1.0, 1.0),
        (st.noisy_chessboard, 5.9, 5.8),
        (lambda: st.rudolph_state(0, 0, 0.5), 1.0, 1.0),
        (lambda: st.upb_state("pyramid"), 3.0, 3.0),
        (lambda: st.random_state((2, 3), seed=1), 2.0, 0.5),
    ],
)
def test_expectation_equals_gap(make, x, y):
    rho = make()
    W = build_witness(rho, x, y)
    assert witness_expectation(W, rho) == pytest.approx(family_gap(rho, x, y).gap, abs=1e-10)
    assert W.isometry_defect() < 1e-10
    np.testing.assert_allclose(W.operator, W.operator.conj().T, atol=1e-14)


def test_bell_value():
    rho = st.bell_state()
    assert build_witness(rho, 1, 1).expectation(rho) == pytest.approx(-1, abs=1e-12)


def test_maximally_mixed_direct_trace():
    rho = st.maximally_mixed((3, 2))
    for x, y in [(0.0, 0.0), (1.0, 2.0), (4.0, 0.5)]:
        W = build_witness(rho, x, y)
        O00 = W.isometry[0, 0]
        expected = norm_factor(3, x) * norm_factor(2, y) + x * y * O00 / np.sqrt(6)
        assert witness_expectation(W, rho) == pytest.approx(expected, abs=1e-12)
        assert witness_expectation(W, rho) >= -1e-12


def test_nonnegative_on_random_products():
    rng = np.random.default_rng(0)
    for make, x, y in [(st.bell_state, 1, 1), (st.noisy_chessboard, 5.9, 5.8)]:
        rho = make()
        W = build_witness(rho, x, y)
        values = [witness_expectation(W, st.random_product_state(rho.dims, rng, pure=True)) for _ in range(300)]
        assert min(values) >= -1e-10


@settings(max_examples=25, deadline=None)
@given(hst.integers(0, 10**6), hst.floats(0, 10), hst.floats(0, 10))
def test_any_isometry_gives_valid_witness(seed, x, y):
    rng = np.random.default_rng(seed)
    O = ortho_group.rvs(9, random_state=rng)[:4, :]  # 4 x 9 with orthonormal rows
    W = witness_from_isometry(O, (2, 3), x, y)
    for _ in range(20):
        assert witness_expectation(W, st.random_product_state((2, 3), rng, pure=True)) >= -1e-10


def test_coefficient_blocks():
    rho = st.random_state((3, 2), seed=2)
    x, y = 1.7, 2.3
    W = build_witness(rho, x, y)
    O = W.isometry
    dA, dB = 3, 2
    assert W.coeffs[0, 0] == pytest.approx(np.sqrt((dA - 1 + x * x) * (dB - 1 + y * y)) + x * y * O[0, 0])
    np.testing.assert_allclose(W.coeffs[0, 1:], x * O[0, 1:])
    np.testing.assert_allclose(W.coeffs[1:, 0], y * O[1:, 0])
    np.testing.assert_allclose(W.coeffs[1:, 1:], O[1:, 1:])
    # projection onto 1_A x G_beta: coefficient (x / sqrt(dA)) O[0, beta]
    GB = canonical_basis(dB).elements
    for beta in range(1, dB * dB):
        probe = kron(np.eye(dA), GB[beta])
        coeff = np.trace(W.operator @ probe).real / np.trace(probe @ probe).real
        assert coeff == pytest.approx(x / np.sqrt(dA) * O[0, beta], abs=1e-12)


def test_operator_matches_coefficient_expansion():
    rho = st.random_state((2, 2), seed=3)
    W = build_witness(rho, 0.5, 4.0)
    G = canonical_basis(2).elements
    rebuilt = sum(W.coeffs[a, b] * kron(G[a], G[b]) for a in range(4) for b in range(4))
    np.testing.assert_allclose(W.operator, rebuilt, atol=1e-13)


def test_export_roundtrip_is_exact():
    rho = st.noisy_chessboard()
    W = build_witness(rho, 5.9, 5.8)
    W2 = load_witness(export_witness(W))
    np.testing.assert_array_equal(W2.operator, W.operator)
    np.testing.assert_array_equal(W2.coeffs, W.coeffs)
    np.testing.assert_array_equal(W2.isometry, W.isometry)
    assert witness_expectation(W2, rho) - witness_expectation(W, rho) == 0
    assert (W2.dims, W2.x, W2.y) == (W.dims, W.x, W.y)


def test_errors():
    W = build_witness(st.bell_state(), 1, 1)
    with pytest.raises(DimensionError):
        witness_expectation(W, st.maximally_mixed((2, 3)))
    with pytest.raises(DimensionError):
        witness_from_isometry(np.eye(3), (2, 2), 1, 1)
    with pytest.raises(DomainError):
        load_witness("{not json")
    with pytest.raises(DomainError):
        load_witness('{"dims": [2, 2]}')
    with pytest.raises(DomainError):
        build_witness(st.bell_state(), -1, 1)
