"""Dense matrix and tensor primitives.

Convention used throughout the package: for a composite system with
``dims = (d_1, ..., d_N)``, subsystem 0 is the slowest-varying tensor factor,
so ``np.kron(rho_A, rho_B)`` has ``rho_A`` on subsystem 0.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .exceptions import DimensionError, DomainError, NumericalError

RANK_RTOL = 1e-12


def svd(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U @ diag(s) @ V.conj().T`` with ``s`` descending.

    Note that ``V`` is returned with singular vectors as columns, unlike
    :func:`numpy.linalg.svd` which returns ``V^dagger``.
    """
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return U, s, Vh.conj().T


def singular_values(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def trace_norm(M: np.ndarray) -> float:
    """Sum of singular values (nuclear / trace norm)."""
    return float(np.sum(singular_values(M)))


def spectral_norm(M: np.ndarray) -> float:
    s = singular_values(M)
    return float(s[0]) if s.size else 0.0


def numerical_rank(M: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Count singular values above ``rtol`` times the largest one."""
    s = singular_values(M)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def kron(*mats: np.ndarray) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"invalid subsystem dimensions {dims}")
    n = int(np.prod(dims))
    if rho.ndim != 2 or rho.shape != (n, n):
        raise DimensionError(f"matrix of shape {rho.shape} does not match dims {dims}")
    return dims


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int] | int) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems appear in increasing index order in the result.
    """
    rho = np.asarray(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep={keep} out of range for {n} subsystems")
    # einsum letters: row index i_k, column index j_k; traced parties share a letter
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError("too many subsystems")
    rows = list(letters[:n])
    cols = [letters[n + k] if k in keep else rows[k] for k in range(n)]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    t = rho.reshape(dims + dims)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    m = int(np.prod([dims[k] for k in keep])) if keep else 1
    return red.reshape(m, m)


def partial_transpose(rho: np.ndarray, dims: Sequence[int], subsystem: int | Sequence[int] = -1) -> np.ndarray:
    """Transpose the chosen tensor factor(s) of ``rho``."""
    rho = np.asarray(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    subs = [subsystem] if isinstance(subsystem, (int, np.integer)) else list(subsystem)
    subs = [s % n if -n <= s < n else None for s in subs]
    if None in subs:
        raise DimensionError(f"subsystem {subsystem} out of range for {n} subsystems")
    perm = list(range(2 * n))
    for s in subs:
        perm[s], perm[n + s] = perm[n + s], perm[s]
    N = rho.shape[0]
    return rho.reshape(dims + dims).transpose(perm).reshape(N, N)


def unfold(T: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` matricization (0-based): rows are mode fibres.

    Columns enumerate the remaining indices in lexicographic order.
    """
    T = np.asarray(T)
    if not 0 <= mode < T.ndim:
        raise DomainError(f"mode {mode} out of range for a {T.ndim}-way tensor")
    return np.moveaxis(T, mode, 0).reshape(T.shape[mode], -1)


def fold(M: np.ndarray, mode: int, shape: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`."""
    shape = tuple(shape)
    if not 0 <= mode < len(shape):
        raise DomainError(f"mode {mode} out of range for a {len(shape)}-way tensor")
    rest = shape[:mode] + shape[mode + 1:]
    return np.moveaxis(np.asarray(M).reshape((shape[mode],) + rest), 0, mode)


def hermitian_inv_sqrt(H: np.ndarray, floor: float = 1e-14) -> np.ndarray:
    """``H^{-1/2}`` for a positive definite Hermitian matrix.

    Raises :class:`DomainError` if an eigenvalue falls below ``floor``.
    """
    H = 0.5 * (H + H.conj().T)
    w, V = np.linalg.eigh(H)
    if w[0] < floor:
        raise DomainError(f"matrix is rank deficient (smallest eigenvalue {w[0]:.3e})")
    return (V / np.sqrt(w)) @ V.conj().T
