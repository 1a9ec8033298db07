"""scikit-learn compatible wrappers.

Samples are density matrices. ``X`` may be a single ``DensityMatrix``, a list of
them, a square array, or a stack of square arrays of shape ``(n, D, D)``; for
raw arrays pass ``dims`` (two equal parties are assumed when ``D`` is a square).

Classifiers use label 1 for "entanglement detected" and 0 otherwise, so
``decision_function`` returns the negated gap (positive means detected).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bases import canonical_basis, sic_basis
from .correlation import correlation_tensor, scale
from .criteria import DETECTION_TOL, make_criterion, optimize_xy
from .exceptions import DimensionError, DomainError
from .filtering import local_filter_normal_form
from .states import DensityMatrix
from .witnesses import build_witness, witness_expectation


def _infer_dims(n: int) -> tuple[int, int]:
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionError(f"cannot infer subsystem dims for size {n}; pass dims explicitly")
    return d, d


def check_states(X, dims: Sequence[int] | None = None, rounded: bool = False) -> list[DensityMatrix]:
    """Coerce ``X`` to a list of validated :class:`DensityMatrix`."""
    if isinstance(X, DensityMatrix):
        return [X]
    if isinstance(X, (list, tuple)) and X and all(isinstance(x, DensityMatrix) for x in X):
        return list(X)
    arr = np.asarray(X)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionError(f"expected square matrices, got array of shape {np.shape(X)}")
    if arr.shape[0] == 0:
        raise DomainError("no samples given")
    dims = tuple(dims) if dims is not None else _infer_dims(arr.shape[1])
    return [DensityMatrix(m, dims, rounded=rounded) for m in arr]


def _check_consistent_dims(states: list[DensityMatrix], expected=None) -> tuple[int, ...]:
    dims = {s.dims for s in states}
    if len(dims) != 1:
        raise DimensionError(f"samples have mixed dimensions {sorted(dims)}")
    (found,) = dims
    if expected is not None and tuple(expected) != found:
        raise DimensionError(f"estimator fitted for dims {tuple(expected)}, got {found}")
    return found


class CorrelationTransformer(TransformerMixin, BaseEstimator):
    """Map states to flattened (optionally scaled) correlation tensors."""

    def __init__(self, dims=None, basis="canonical", xs=None):
        self.dims = dims
        self.basis = basis
        self.xs = xs

    def _bases(self, dims):
        if self.basis == "canonical":
            return [canonical_basis(d) for d in dims]
        if self.basis in ("sic_minus", "sic_plus"):
            return [sic_basis(d, self.basis.removeprefix("sic_")) for d in dims]
        raise DomainError(f"unknown basis {self.basis!r}")

    def fit(self, X, y=None):
        states = check_states(X, self.dims)
        self.dims_ = _check_consistent_dims(states)
        if self.xs is not None and len(self.xs) != len(self.dims_):
            raise DimensionError("one scaling factor per party is required")
        self.n_features_out_ = int(np.prod([d * d for d in self.dims_]))
        return self

    def transform(self, X):
        check_is_fitted(self, "dims_")
        states = check_states(X, self.dims_)
        _check_consistent_dims(states, self.dims_)
        bases = self._bases(self.dims_)
        out = np.empty((len(states), self.n_features_out_))
        for i, s in enumerate(states):
            C = correlation_tensor(s, bases)
            if self.xs is not None:
                C = scale(C, self.xs)
            out[i] = C.scaled().ravel()
        return out


class SeparabilityCriterion(ClassifierMixin, BaseEstimator):
    """Stateless criterion evaluated sample by sample.

    ``criterion`` is any name accepted by :func:`corrsep.criteria.make_criterion`.
    """

    def __init__(self, criterion="family", x=1.0, y=1.0, xs=None, dims=None, tol=DETECTION_TOL):
        self.criterion = criterion
        self.x = x
        self.y = y
        self.xs = xs
        self.dims = dims
        self.tol = tol

    def fit(self, X=None, y=None):
        if X is not None:
            self.dims_ = _check_consistent_dims(check_states(X, self.dims))
        else:
            self.dims_ = tuple(self.dims) if self.dims is not None else None
        self.classes_ = np.array([0, 1])
        self.criterion_ = make_criterion(self.criterion, self.x, self.y, self.xs, self.tol)
        return self

    def reports(self, X):
        check_is_fitted(self, "criterion_")
        states = check_states(X, self.dims_ or self.dims)
        return [self.criterion_(s) for s in states]

    def gap(self, X) -> np.ndarray:
        return np.array([r.gap for r in self.reports(X)])

    def decision_function(self, X) -> np.ndarray:
        return -self.gap(X)

    def predict(self, X) -> np.ndarray:
        return np.array([int(r.detected) for r in self.reports(X)])


class ScalingSearch(ClassifierMixin, BaseEstimator):
    """Learn the most violating ``(x, y)`` for one state, then apply it to others."""

    def __init__(self, grid_size=25, refine=True, dims=None, tol=DETECTION_TOL):
        self.grid_size = grid_size
        self.refine = refine
        self.dims = dims
        self.tol = tol

    def fit(self, X, y=None):
        states = check_states(X, self.dims)
        if len(states) != 1:
            raise DomainError(f"fit expects exactly one state, got {len(states)}")
        res = optimize_xy(states[0], self.grid_size, self.refine, self.tol)
        self.x_, self.y_, self.gap_ = res.x, res.y, res.gap
        self.dims_ = states[0].dims
        self.classes_ = np.array([0, 1])
        return self

    def gap(self, X) -> np.ndarray:
        check_is_fitted(self, "x_")
        crit = make_criterion("family", self.x_, self.y_, tol=self.tol)
        return np.array([crit(s).gap for s in check_states(X, self.dims_)])

    def decision_function(self, X) -> np.ndarray:
        return -self.gap(X)

    def predict(self, X) -> np.ndarray:
        return (self.gap(X) < -self.tol).astype(int)


class FamilyWitness(ClassifierMixin, BaseEstimator):
    """Fit a witness ``W^{xy}_O`` on one state; score others by ``Tr(W sigma)``."""

    def __init__(self, x=1.0, y=1.0, dims=None, tol=DETECTION_TOL):
        self.x = x
        self.y = y
        self.dims = dims
        self.tol = tol

    def fit(self, X, y=None):
        states = check_states(X, self.dims)
        if len(states) != 1:
            raise DomainError(f"fit expects exactly one state, got {len(states)}")
        self.witness_ = build_witness(states[0], self.x, self.y)
        self.classes_ = np.array([0, 1])
        return self

    def expectation(self, X) -> np.ndarray:
        check_is_fitted(self, "witness_")
        states = check_states(X, self.witness_.dims)
        return np.array([witness_expectation(self.witness_, s) for s in states])

    def decision_function(self, X) -> np.ndarray:
        return -self.expectation(X)

    def predict(self, X) -> np.ndarray:
        return (self.expectation(X) < -self.tol).astype(int)


class LocalFilter(TransformerMixin, BaseEstimator):
    """Bring each state to the normal form with maximally mixed marginals."""

    def __init__(self, tol=1e-10, max_iter=10_000, dims=None):
        self.tol = tol
        self.max_iter = max_iter
        self.dims = dims

    def fit(self, X=None, y=None):
        if X is not None:
            self.dims_ = _check_consistent_dims(check_states(X, self.dims))
        else:
            self.dims_ = tuple(self.dims) if self.dims is not None else None
        return self

    def filter_results(self, X):
        check_is_fitted(self, "dims_")
        return [local_filter_normal_form(s, self.tol, self.max_iter) for s in check_states(X, self.dims_ or self.dims)]

    def transform(self, X) -> np.ndarray:
        return np.stack([r.filtered.mat for r in self.filter_results(X)])
