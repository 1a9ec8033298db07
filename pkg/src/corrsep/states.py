"""Benchmark density matrices and seeded random samplers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import DimensionError, DomainError
from .linalg_core import partial_trace, partial_transpose

# invariant tolerances for constructed states
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
# loosened tolerances for matrices printed with 4 decimals
ROUNDED_PSD_TOL = 5e-4
ROUNDED_TRACE_TOL = 1e-3

CHESSBOARD_PARAMS = dict(a=0.3346, b=-0.1090, c=-0.6456, d=0.8560, m=0.4690, n=-0.3161, s=-1.0178, t=-0.6085)
CHESSBOARD_P = 0.8062


def check_density_matrix(
    mat: np.ndarray,
    dims: Sequence[int],
    *,
    herm_tol: float = HERM_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = PSD_TOL,
) -> np.ndarray:
    """Validate a density matrix against ``dims``; return it as a complex array."""
    mat = np.asarray(mat, dtype=complex)
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims)) if dims else 0
    if mat.ndim != 2 or mat.shape != (n, n):
        raise DimensionError(f"matrix of shape {mat.shape} does not match dims {dims}")
    if not np.all(np.isfinite(mat)):
        raise DomainError("density matrix has non-finite entries")
    herm = np.max(np.abs(mat - mat.conj().T))
    if herm > herm_tol:
        raise DomainError(f"matrix is not Hermitian (defect {herm:.3e})")
    tr = np.trace(mat).real
    if abs(tr - 1) > trace_tol:
        raise DomainError(f"trace is {float(tr)!r}, expected 1")
    lam = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
    if lam < -psd_tol:
        raise DomainError(f"matrix is not positive semidefinite (eigenvalue {lam:.6e})")
    return mat


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix on ``prod(dims)``-dimensional space."""

    mat: np.ndarray = field(repr=False)
    dims: tuple[int, ...]
    rounded: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        tol = dict(psd_tol=ROUNDED_PSD_TOL, trace_tol=ROUNDED_TRACE_TOL) if self.rounded else {}
        mat = check_density_matrix(self.mat, self.dims, **tol).copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def marginal(self, keep) -> np.ndarray:
        return partial_trace(self.mat, self.dims, keep)

    def partial_transpose(self, subsystem: int = -1) -> np.ndarray:
        return partial_transpose(self.mat, self.dims, subsystem)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))


@dataclass(frozen=True)
class StateFamily:
    """One-parameter family ``p -> state``, ``p`` in [0, 1]."""

    generator: Callable[[float], DensityMatrix]
    label: str = ""

    def __call__(self, p: float) -> DensityMatrix:
        return self.generator(p)


def _pure(vec: np.ndarray, dims) -> DensityMatrix:
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return DensityMatrix(np.outer(vec, vec.conj()), dims)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    n = int(np.prod(dims))
    return DensityMatrix(np.eye(n) / n, dims)


def mix_with_white_noise(rho: DensityMatrix, p: float) -> DensityMatrix:
    if not 0 <= p <= 1:
        raise DomainError(f"mixing weight p must lie in [0, 1], got {p}")
    n = rho.mat.shape[0]
    return DensityMatrix(p * rho.mat + (1 - p) * np.eye(n) / n, rho.dims)


def rudolph_state(r: float, s: float, t: float) -> DensityMatrix:
    """Two-qubit state ``(1/2) [[1+r,0,0,t],[0,0,0,0],[0,0,s-r,0],[t,0,0,1-s]]``."""
    mat = 0.5 * np.array([
        [1 + r, 0, 0, t],
        [0, 0, 0, 0],
        [0, 0, s - r, 0],
        [t, 0, 0, 1 - s],
    ], dtype=complex)
    lam = np.linalg.eigvalsh(mat)
    if lam[0] < -PSD_TOL:
        raise DomainError(
            f"parameters (r={r}, s={s}, t={t}) give a non-PSD matrix: eigenvalue {lam[0]:.6e}"
        )
    return DensityMatrix(mat, (2, 2))


def chessboard_vectors(a, b, c, d, m, n, s, t) -> np.ndarray:
    """The four 3x3 chessboard vectors (rows), components ``|i j>`` in index ``3i+j``."""
    cj = np.conj
    return np.array([
        [m, 0, s, 0, n, 0, 0, 0, 0],
        [0, a, 0, b, 0, c, 0, 0, 0],
        [cj(n), 0, 0, 0, -cj(m), 0, t, 0, 0],
        [0, cj(b), 0, -cj(a), 0, 0, 0, d, 0],
    ], dtype=complex)


def chessboard_state(a=0.0, b=0.0, c=0.0, d=0.0, m=0.0, n=0.0, s=0.0, t=0.0) -> DensityMatrix:
    V = chessboard_vectors(a, b, c, d, m, n, s, t)
    unnorm = V.T @ V.conj()
    tr = np.trace(unnorm).real
    if tr == 0:
        raise DomainError("all chessboard vectors vanish")
    return DensityMatrix(unnorm / tr, (3, 3))


def noisy_chessboard(p: float = CHESSBOARD_P) -> DensityMatrix:
    """Chessboard state at the published parameters, mixed with white noise."""
    return mix_with_white_noise(chessboard_state(**CHESSBOARD_PARAMS), p)


def tiles_upb() -> list[tuple[np.ndarray, np.ndarray]]:
    e = np.eye(3)
    r2 = np.sqrt(2)
    return [
        (e[0], (e[0] - e[1]) / r2),
        (e[2], (e[1] - e[2]) / r2),
        ((e[0] - e[1]) / r2, e[2]),
        ((e[1] - e[2]) / r2, e[0]),
        (np.ones(3) / np.sqrt(3), np.ones(3) / np.sqrt(3)),
    ]


def pyramid_upb() -> list[tuple[np.ndarray, np.ndarray]]:
    h = 0.5 * np.sqrt(1 + np.sqrt(5))
    v = [np.array([np.cos(2 * np.pi * j / 5), np.sin(2 * np.pi * j / 5), h]) for j in range(5)]
    v = [x / np.linalg.norm(x) for x in v]
    return [(v[j], v[(2 * j) % 5]) for j in range(5)]


def upb_vectors(kind: str) -> np.ndarray:
    """The five product vectors (rows, length 9) of a 3x3 UPB."""
    pairs = {"tiles": tiles_upb, "pyramid": pyramid_upb}
    if kind not in pairs:
        raise DomainError(f"unknown UPB kind {kind!r}; expected 'tiles' or 'pyramid'")
    return np.array([np.kron(a, b) for a, b in pairs[kind]()], dtype=complex)


def upb_state(kind: str) -> DensityMatrix:
    """Bound entangled state ``(1 - sum_j |psi_j><psi_j|) / 4``."""
    V = upb_vectors(kind)
    proj = V.T @ V.conj()
    return DensityMatrix((np.eye(9) - proj) / 4, (3, 3))


def upb_family(kind: str) -> StateFamily:
    rho = upb_state(kind)
    return StateFamily(lambda p: mix_with_white_noise(rho, p), f"{kind} UPB + white noise")


def chessboard_family() -> StateFamily:
    rho = chessboard_state(**CHESSBOARD_PARAMS)
    return StateFamily(lambda p: mix_with_white_noise(rho, p), "chessboard + white noise")


def bell_state() -> DensityMatrix:
    """``(|00> + |11>)/sqrt(2)``."""
    return _pure([1, 0, 0, 1], (2, 2))


def ghz_state(n: int) -> DensityMatrix:
    if n < 2:
        raise DomainError("GHZ state needs at least 2 parties")
    vec = np.zeros(2**n)
    vec[0] = vec[-1] = 1
    return _pure(vec, (2,) * n)


def w_state(n: int) -> DensityMatrix:
    if n < 2:
        raise DomainError("W state needs at least 2 parties")
    vec = np.zeros(2**n)
    for k in range(n):
        vec[1 << k] = 1
    return _pure(vec, (2,) * n)


def _haar_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_local_state(d: int, rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    """Haar pure state, or the marginal of a Haar pure state on ``d x d`` when mixed."""
    if pure:
        v = _haar_vector(d, rng)
        return np.outer(v, v.conj())
    v = _haar_vector(d * d, rng).reshape(d, d)
    return v @ v.conj().T


def random_product_state(dims: Sequence[int], seed=None, pure: bool = False) -> DensityMatrix:
    """Product of independent single-party states; ``seed`` may be a Generator."""
    rng = np.random.default_rng(seed)
    mat = np.ones((1, 1), dtype=complex)
    for d in dims:
        mat = np.kron(mat, random_local_state(d, rng, pure))
    return DensityMatrix(mat, dims)


def random_separable_state(dims: Sequence[int], k_terms: int = 3, seed=None, pure: bool = False) -> DensityMatrix:
    """Dirichlet-weighted mixture of ``k_terms`` random product states."""
    if k_terms < 1:
        raise DomainError("k_terms must be >= 1")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(k_terms))
    n = int(np.prod(dims))
    mat = np.zeros((n, n), dtype=complex)
    for w in weights:
        mat += w * random_product_state(dims, rng, pure).mat
    return DensityMatrix(mat, dims)


def random_state(dims: Sequence[int], seed=None, rank: int | None = None) -> DensityMatrix:
    """Generic (usually entangled) state from a Haar-random purification."""
    rng = np.random.default_rng(seed)
    n = int(np.prod(dims))
    k = rank or n
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    mat = g @ g.conj().T
    return DensityMatrix(mat / np.trace(mat).real, dims)
