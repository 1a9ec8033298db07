"""Entanglement witnesses from the trace-norm isometry of ``D_x C^can D_y``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bases import canonical_basis
from .correlation import norm_factor, scale
from .criteria import _check_params, _require_bipartite, canonical_correlation
from .exceptions import DimensionError, DomainError
from .linalg_core import svd
from .states import DensityMatrix


@dataclass(frozen=True)
class Witness:
    """``W = sum_ab w_ab G^A_a x G^B_b`` over canonical bases.

    ``isometry`` is the ``dA^2 x dB^2`` matrix ``O``; the coefficients are the
    deformed isometry ``D_x O D_y`` with ``N_A(x) N_B(y) sqrt(dA dB)`` added at
    ``(0, 0)``.
    """

    dims: tuple[int, int]
    x: float
    y: float
    coeffs: np.ndarray = field(repr=False)
    operator: np.ndarray = field(repr=False)
    isometry: np.ndarray | None = field(default=None, repr=False)

    def expectation(self, sigma: DensityMatrix) -> float:
        return witness_expectation(self, sigma)

    def isometry_defect(self) -> float:
        """Max-abs deviation of ``O^T O`` (or ``O O^T`` if wide) from the identity."""
        O = self.isometry
        G = O.T @ O if O.shape[0] >= O.shape[1] else O @ O.T
        return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def coefficients_to_operator(coeffs: np.ndarray, dims) -> np.ndarray:
    GA = canonical_basis(dims[0]).elements
    GB = canonical_basis(dims[1]).elements
    op = np.einsum("ab,aij,bkl->ikjl", coeffs, GA, GB)
    n = dims[0] * dims[1]
    return op.reshape(n, n)


def witness_from_isometry(O: np.ndarray, dims, x: float, y: float) -> Witness:
    """Assemble ``W^{xy}_O`` for an arbitrary isometry ``O``."""
    dA, dB = dims
    O = np.asarray(O, dtype=float)
    if O.shape != (dA * dA, dB * dB):
        raise DimensionError(f"isometry shape {O.shape} does not match dims {dims}")
    dx = np.ones(dA * dA)
    dx[0] = x
    dy = np.ones(dB * dB)
    dy[0] = y
    coeffs = dx[:, None] * O * dy[None, :]
    coeffs[0, 0] += norm_factor(dA, x) * norm_factor(dB, y) * np.sqrt(dA * dB)
    op = coefficients_to_operator(coeffs, dims)
    op = 0.5 * (op + op.conj().T)
    return Witness((dA, dB), float(x), float(y), coeffs, op, O)


def build_witness(rho: DensityMatrix, x: float, y: float) -> Witness:
    """Witness whose expectation on ``rho`` equals the family gap at ``(x, y)``.

    Uses ``O = -U V^T`` from the SVD of ``D_x C^can D_y``.
    """
    _require_bipartite(rho)
    x, y = _check_params((x, y))
    M = scale(canonical_correlation(rho), (x, y)).matrix()
    U, _, V = svd(M)
    return witness_from_isometry(-(U @ V.T).real, rho.dims, x, y)


def witness_expectation(W: Witness, sigma: DensityMatrix) -> float:
    if tuple(sigma.dims) != tuple(W.dims):
        raise DimensionError(f"state dims {sigma.dims} do not match witness dims {W.dims}")
    return float(np.real(np.trace(W.operator @ sigma.mat)))


def _cplx_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def _cplx_from_json(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def witness_to_dict(W: Witness) -> dict:
    out = {
        "kind": "witness",
        "dims": list(W.dims),
        "x": W.x,
        "y": W.y,
        "coeffs": np.asarray(W.coeffs).tolist(),
        "operator": _cplx_to_json(W.operator),
    }
    if W.isometry is not None:
        out["isometry"] = np.asarray(W.isometry).tolist()
    return out


def witness_from_dict(d: dict) -> Witness:
    iso = d.get("isometry")
    return Witness(
        tuple(d["dims"]),
        float(d["x"]),
        float(d["y"]),
        np.asarray(d["coeffs"], dtype=float),
        _cplx_from_json(d["operator"]),
        None if iso is None else np.asarray(iso, dtype=float),
    )


def export_witness(W: Witness) -> str:
    """JSON text; floats use shortest round-trip repr, so reloading is bit-exact."""
    return json.dumps(witness_to_dict(W))


def load_witness(text: str) -> Witness:
    try:
        return witness_from_dict(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed witness file: {exc}") from None
