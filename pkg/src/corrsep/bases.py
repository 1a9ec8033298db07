"""Orthonormal Hermitian operator bases: canonical (Gell-Mann) and SIC-derived."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .exceptions import DomainError, UnsupportedDimensionError

BasisKind = Literal["canonical", "sic_minus", "sic_plus", "custom"]

# Weyl-Heisenberg covariant fiducials; the SIC is the orbit under X^j Z^k.
_SIC_FIDUCIALS = {
    # Bloch vector (1, 1, 1)/sqrt(3)
    2: np.array([
        np.sqrt((1 + 1 / np.sqrt(3)) / 2),
        np.exp(1j * np.pi / 4) * np.sqrt((1 - 1 / np.sqrt(3)) / 2),
    ]),
    # Hesse configuration
    3: np.array([0.0, 1.0, -1.0]) / np.sqrt(2),
    4: np.array([
        0.20118858648686588 + 0.0j,
        0.3076345531059191 - 0.2569832962716319j,
        0.0 - 0.48571221409126397j,
        -0.10644596661905345 + 0.7426955103628957j,
    ]),
}


@dataclass(frozen=True)
class OperatorBasis:
    """``d**2`` Hermitian ``d x d`` matrices, HS-orthonormal, stacked along axis 0."""

    dim: int
    elements: np.ndarray = field(repr=False)
    kind: BasisKind = "custom"

    def __len__(self) -> int:
        return len(self.elements)

    def gram(self) -> np.ndarray:
        E = self.elements.reshape(len(self.elements), -1)
        return E.conj() @ E.T

    def coefficients(self, op: np.ndarray) -> np.ndarray:
        """Expansion coefficients ``<G_a|op>`` of an operator."""
        return np.einsum("aij,ij->a", self.elements.conj(), op)


@dataclass(frozen=True)
class SicPovm:
    dim: int
    effects: np.ndarray = field(repr=False)
    fiducial: np.ndarray = field(repr=False)

    def vectors(self) -> np.ndarray:
        return weyl_heisenberg_orbit(self.fiducial)


@dataclass(frozen=True)
class BasisReport:
    size_ok: bool
    orthonormality_defect: float
    hermiticity_defect: float

    @property
    def ok(self) -> bool:
        return self.size_ok and self.orthonormality_defect < 1e-10 and self.hermiticity_defect < 1e-10


def canonical_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis normalized to HS-orthonormality.

    Ordering: ``1/sqrt(d)``, symmetric off-diagonal ``(j, k)`` with ``j < k``,
    antisymmetric off-diagonal in the same order, then the ``d - 1`` diagonal
    traceless elements.
    """
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    out = np.zeros((d * d, d, d), dtype=complex)
    out[0] = np.eye(d) / np.sqrt(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    idx = 1
    for j, k in pairs:
        out[idx, j, k] = out[idx, k, j] = 1 / np.sqrt(2)
        idx += 1
    for j, k in pairs:
        out[idx, j, k] = -1j / np.sqrt(2)
        out[idx, k, j] = 1j / np.sqrt(2)
        idx += 1
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        out[idx] = np.diag(diag / np.sqrt(l * (l + 1)))
        idx += 1
    return OperatorBasis(d, out, "canonical")


def weyl_heisenberg_orbit(fiducial: np.ndarray) -> np.ndarray:
    """Vectors ``X^j Z^k |fiducial>`` in row ``j*d + k``."""
    d = len(fiducial)
    omega = np.exp(2j * np.pi / d)
    z_phase = omega ** np.arange(d)
    out = np.empty((d * d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            out[j * d + k] = np.roll(z_phase**k * fiducial, j)
    return out


def sic_povm(d: int) -> SicPovm:
    """SIC-POVM with effects ``|psi_i><psi_i| / d`` for ``d`` in {2, 3, 4}."""
    if d not in _SIC_FIDUCIALS:
        raise UnsupportedDimensionError(
            f"no SIC-POVM fiducial embedded for d={d}; supported: {sorted(_SIC_FIDUCIALS)}"
        )
    fid = _SIC_FIDUCIALS[d] / np.linalg.norm(_SIC_FIDUCIALS[d])
    vecs = weyl_heisenberg_orbit(fid)
    effects = np.einsum("ai,aj->aij", vecs, vecs.conj()) / d
    return SicPovm(d, effects, fid)


def _sic_shift(d: int, sign: str) -> float:
    if sign == "minus":
        return (np.sqrt(d + 1) - 1) / np.sqrt(d**3)
    if sign == "plus":
        return (np.sqrt(d + 1) + 1) / np.sqrt(d**3)
    raise DomainError(f"sign must be 'minus' or 'plus', got {sign!r}")


def sic_basis(d: int, sign: str = "minus") -> OperatorBasis:
    """Orthonormal basis ``sqrt(d(d+1)) Pi_a - c * 1`` built from a SIC-POVM.

    ``c = (sqrt(d+1) - 1)/d^{3/2}`` for ``sign='minus'`` (then ``Tr G_a = +1/sqrt(d)``)
    and ``(sqrt(d+1) + 1)/d^{3/2}`` for ``sign='plus'`` (``Tr G_a = -1/sqrt(d)``).
    """
    shift = _sic_shift(d, sign)
    sic = sic_povm(d)
    elements = np.sqrt(d * (d + 1)) * sic.effects - shift * np.eye(d)
    return OperatorBasis(d, elements, f"sic_{sign}")


def sic_effects_from_basis(basis: OperatorBasis) -> np.ndarray:
    """Invert the SIC-basis map, recovering the POVM effects."""
    if basis.kind not in ("sic_minus", "sic_plus"):
        raise DomainError(f"basis of kind {basis.kind!r} is not SIC-derived")
    d = basis.dim
    shift = _sic_shift(d, basis.kind.removeprefix("sic_"))
    return (basis.elements + shift * np.eye(d)) / np.sqrt(d * (d + 1))


def validate_basis(basis: OperatorBasis | np.ndarray) -> BasisReport:
    """Report orthonormality and Hermiticity defects (max-abs) of a candidate basis."""
    elements = basis.elements if isinstance(basis, OperatorBasis) else np.asarray(basis)
    if elements.ndim != 3 or elements.shape[0] == 0 or elements.shape[1] != elements.shape[2]:
        return BasisReport(False, float("inf"), float("inf"))
    d = elements.shape[1]
    size_ok = elements.shape[0] == d * d
    E = elements.reshape(len(elements), -1)
    gram = E.conj() @ E.T
    ortho = float(np.max(np.abs(gram - np.eye(len(elements)))))
    herm = float(np.max(np.abs(elements - elements.conj().transpose(0, 2, 1))))
    return BasisReport(size_ok, ortho, herm)
