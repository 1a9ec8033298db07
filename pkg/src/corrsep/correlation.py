"""Bloch vectors and correlation tensors ``C[a1..aN] = Tr(rho G1_a1 x ... x GN_aN)``."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bases import OperatorBasis, canonical_basis
from .exceptions import DimensionError, DomainError
from .states import DensityMatrix


@dataclass(frozen=True)
class BlochVector:
    dim: int
    r: np.ndarray = field(repr=False)

    @property
    def norm_sq(self) -> float:
        return float(self.r @ self.r)


@dataclass(frozen=True)
class CorrelationTensor:
    """Real correlation tensor with a lazily applied per-party scaling.

    ``entries`` holds the unscaled expectation values; ``scaling[k]`` multiplies
    every entry whose index on party ``k`` is 0.
    """

    entries: np.ndarray = field(repr=False)
    party_dims: tuple[int, ...]
    basis_kinds: tuple[str, ...]
    scaling: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.scaling:
            object.__setattr__(self, "scaling", (1.0,) * len(self.party_dims))
        if len(self.scaling) != len(self.party_dims):
            raise DimensionError("one scaling factor per party is required")

    @property
    def n_parties(self) -> int:
        return len(self.party_dims)

    @property
    def entry_dims(self) -> tuple[int, ...]:
        return tuple(d * d for d in self.party_dims)

    def scaled(self) -> np.ndarray:
        """The entries with the stored scaling applied."""
        out = self.entries
        for k, x in enumerate(self.scaling):
            if x != 1.0:
                diag = np.ones(self.entries.shape[k])
                diag[0] = x
                shape = [1] * out.ndim
                shape[k] = -1
                out = out * diag.reshape(shape)
        return out

    def matrix(self) -> np.ndarray:
        """Bipartite view (scaling applied) as a ``d_A^2 x d_B^2`` matrix."""
        if self.n_parties != 2:
            raise DimensionError(f"matrix view needs 2 parties, tensor has {self.n_parties}")
        return self.scaled()


def _as_state(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    raise DomainError(f"expected a DensityMatrix, got {type(rho).__name__}")


def bloch_vector(rho: DensityMatrix | np.ndarray, basis: OperatorBasis | None = None) -> BlochVector:
    """Generalized Bloch vector ``r_i = Tr(rho G_i)``, ``i >= 1``, in a canonical basis."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if isinstance(rho, DensityMatrix) and rho.n_parties != 1:
        raise DimensionError(f"expected a single-party state, got dims {rho.dims}")
    d = mat.shape[0]
    basis = basis or canonical_basis(d)
    if basis.kind != "canonical":
        raise DomainError(f"Bloch vectors need a canonical basis, got {basis.kind!r}")
    if basis.dim != d:
        raise DimensionError(f"basis dimension {basis.dim} does not match state dimension {d}")
    r = np.real(np.einsum("aij,ji->a", basis.elements[1:], mat))
    return BlochVector(d, r)


def reconstruct_from_bloch(b: BlochVector, basis: OperatorBasis | None = None) -> np.ndarray:
    basis = basis or canonical_basis(b.dim)
    return np.eye(b.dim) / b.dim + np.einsum("a,aij->ij", b.r, basis.elements[1:])


def expectation_tensor(mat: np.ndarray, dims: Sequence[int], operator_sets: Sequence[np.ndarray]) -> np.ndarray:
    """``T[a1..aN] = Tr(mat  O1_a1 x ... x ON_aN)`` for stacks of local operators."""
    dims = tuple(dims)
    n = len(dims)
    if len(operator_sets) != n:
        raise DimensionError(f"{len(operator_sets)} operator sets for {n} parties")
    t = np.asarray(mat).reshape(dims + dims)
    # contract party 0 each round; the new index is appended at the end
    for k, ops in enumerate(operator_sets):
        if ops.shape[1:] != (dims[k], dims[k]):
            raise DimensionError(f"operators of shape {ops.shape[1:]} on party {k} with dim {dims[k]}")
        # axes: [i_k..i_{n-1}, j_k..j_{n-1}, a_0..a_{k-1}]; Tr(rho O) = sum rho_ij O_ji
        t = np.tensordot(t, ops, axes=([0, n - k], [2, 1]))
    return t


def correlation_tensor(
    rho: DensityMatrix,
    bases: Sequence[OperatorBasis] | OperatorBasis | None = None,
) -> CorrelationTensor:
    """Correlation tensor of ``rho`` in the given per-party bases (canonical by default)."""
    rho = _as_state(rho)
    if bases is None:
        bases = [canonical_basis(d) for d in rho.dims]
    elif isinstance(bases, OperatorBasis):
        bases = [bases] * rho.n_parties
    if len(bases) != rho.n_parties:
        raise DimensionError(f"{len(bases)} bases for {rho.n_parties} parties")
    for b, d in zip(bases, rho.dims):
        if b.dim != d:
            raise DimensionError(f"basis dimension {b.dim} does not match party dimension {d}")
    t = expectation_tensor(rho.mat, rho.dims, [b.elements for b in bases])
    return CorrelationTensor(np.real(t).copy(), rho.dims, tuple(b.kind for b in bases))


def scale(C: CorrelationTensor, xs: Sequence[float]) -> CorrelationTensor:
    """Compose the stored scaling with ``xs`` (multiplicatively)."""
    xs = tuple(float(x) for x in xs)
    if len(xs) != C.n_parties:
        raise DimensionError(f"{len(xs)} scaling factors for {C.n_parties} parties")
    if any(not np.isfinite(x) or x < 0 for x in xs):
        raise DomainError(f"scaling factors must be finite and >= 0, got {xs}")
    return replace(C, scaling=tuple(a * b for a, b in zip(C.scaling, xs)))


def norm_factor(d: int, x: float) -> float:
    """``sqrt((d - 1 + x^2)/d)``, the per-party bound factor."""
    return float(np.sqrt((d - 1 + x * x) / d))
