import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from corrsep import states as st
from corrsep.correlation import correlation_tensor
from corrsep.criteria import family_gap
from corrsep.estimators import (
    CorrelationTransformer,
    FamilyWitness,
    LocalFilter,
    ScalingSearch,
    SeparabilityCriterion,
    check_states,
)
from corrsep.exceptions import DimensionError, DomainError


@pytest.fixture
def batch():
    return [st.bell_state(), st.maximally_mixed((2, 2)), st.random_product_state((2, 2), seed=1)]


def test_check_states_inputs(batch):
    assert len(check_states(batch[0])) == 1
    assert len(check_states(batch)) == 3
    stack = np.stack([s.mat for s in batch])
    got = check_states(stack)
    assert [s.dims for s in got] == [(2, 2)] * 3
    assert check_states(np.eye(6) / 6, dims=(2, 3))[0].dims == (2, 3)
    with pytest.raises(DimensionError):
        check_states(np.eye(6) / 6)
    with pytest.raises(DimensionError):
        check_states(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        check_states(np.zeros((0, 4, 4)))


def test_params_and_clone():
    est = SeparabilityCriterion(criterion="family", x=2.0, y=3.0)
    assert est.get_params()["x"] == 2.0
    est.set_params(y=5.0)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert not hasattr(twin, "criterion_")


def test_criterion_predict(batch):
    est = SeparabilityCriterion(criterion="ccnr").fit(batch)
    np.testing.assert_array_equal(est.predict(batch), [1, 0, 0])
    np.testing.assert_allclose(est.decision_function(batch), -est.gap(batch))
    assert est.gap(batch)[0] == pytest.approx(-1)


def test_not_fitted(batch):
    for est in (SeparabilityCriterion(), ScalingSearch(), FamilyWitness(), LocalFilter(), CorrelationTransformer()):
        method = getattr(est, "predict", None) or est.transform
        with pytest.raises(NotFittedError):
            method(batch)


def test_mixed_dims_rejected():
    with pytest.raises(DimensionError):
        SeparabilityCriterion().fit([st.bell_state(), st.maximally_mixed((2, 3))])


def test_transformer_matches_tensor(batch):
    est = CorrelationTransformer().fit(batch)
    out = est.transform(batch)
    assert out.shape == (3, 16)
    np.testing.assert_allclose(out[0], correlation_tensor(batch[0]).entries.ravel())
    scaled = CorrelationTransformer(xs=(2.0, 3.0)).fit_transform(batch)
    assert scaled[0, 0] == pytest.approx(6 * out[0, 0])


def test_scaling_search_chessboard():
    rho = st.noisy_chessboard()
    est = ScalingSearch(grid_size=15).fit(rho)
    assert est.gap_ < 0
    assert est.predict(rho)[0] == 1
    assert est.gap(rho)[0] == pytest.approx(family_gap(rho, est.x_, est.y_).gap, abs=1e-12)
    with pytest.raises(DomainError):
        ScalingSearch().fit([rho, rho])


def test_family_witness(batch):
    est = FamilyWitness(x=1, y=1).fit(batch[0])
    np.testing.assert_allclose(est.expectation(batch[:1]), [-1], atol=1e-12)
    pred = est.predict(batch)
    np.testing.assert_array_equal(pred, [1, 0, 0])


def test_local_filter_transform():
    rho = st.noisy_chessboard()
    out = LocalFilter().fit(rho).transform(rho)
    assert out.shape == (1, 9, 9)
    tr_b = out[0].reshape(3, 3, 3, 3).trace(axis1=1, axis2=3)
    np.testing.assert_allclose(tr_b, np.eye(3) / 3, atol=1e-8)
