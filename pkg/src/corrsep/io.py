"""JSON state files: ``{"dims": [...], "re": [[...]], "im": [[...]]}``."""

from __future__ import annotations

import json

import numpy as np

from .exceptions import DomainError
from .states import DensityMatrix


def state_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "re": np.real(rho.mat).tolist(),
        "im": np.imag(rho.mat).tolist(),
    }


def state_from_dict(d: dict, rounded: bool = False) -> DensityMatrix:
    try:
        dims = [int(v) for v in d["dims"]]
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed state file: {exc}") from None
    if re.shape != im.shape:
        raise DomainError(f"'re' and 'im' shapes differ: {re.shape} vs {im.shape}")
    return DensityMatrix(re + 1j * im, dims, rounded=rounded)


def dump_state(rho: DensityMatrix) -> str:
    # repr-based float output round-trips every double exactly
    return json.dumps(state_to_dict(rho))


def load_state(text: str, rounded: bool = False) -> DensityMatrix:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"state file is not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise DomainError("state file must contain a JSON object")
    return state_from_dict(d, rounded)
