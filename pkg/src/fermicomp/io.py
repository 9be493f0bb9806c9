"""JSON wire formats for states and channels.

State files:    {"modes": L, "matrix": {"dim": 2**L, "data": [[re, im], ...]}}
Channel files:  {"in_modes": L, "out_modes": M, "deterministic": bool,
                 "kraus": [{"rows": 2**M, "cols": 2**L, "data": [...]}, ...]}
Matrix data is row-major; square matrices may use "dim" instead of rows/cols.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import FermionicChannel, new_channel
from .errors import DimensionMismatch
from .states import FermionicState, new_state, validation_report


def matrix_to_obj(matrix: np.ndarray) -> dict:
    m = np.asarray(matrix, dtype=complex)
    obj = {"data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)]}
    if m.shape[0] == m.shape[1]:
        obj["dim"] = int(m.shape[0])
    else:
        obj["rows"], obj["cols"] = int(m.shape[0]), int(m.shape[1])
    return obj


def matrix_from_obj(obj: dict, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if "dim" in obj:
        r = c = int(obj["dim"])
    else:
        r = int(obj.get("rows", rows or 0))
        c = int(obj.get("cols", cols or r))
    data = obj.get("data")
    if data is None or r <= 0 or c <= 0:
        raise DimensionMismatch("matrix object needs 'data' and a dimension")
    flat = np.array([complex(re, im) for re, im in data])
    if flat.size != r * c:
        raise DimensionMismatch(f"matrix data has {flat.size} entries, expected {r * c}")
    return flat.reshape(r, c)


def state_to_obj(state: FermionicState) -> dict:
    return {"modes": state.modes, "matrix": matrix_to_obj(state.matrix)}


def state_from_obj(obj: dict) -> FermionicState:
    modes = int(obj["modes"])
    return new_state(matrix_from_obj(obj["matrix"]), modes)


def state_report_from_obj(obj: dict) -> dict:
    """Loader diagnostics (parity residual, minimum eigenvalue) without validation."""
    modes = int(obj["modes"])
    return validation_report(matrix_from_obj(obj["matrix"]), modes)


def load_state(path) -> FermionicState:
    with open(path) as fh:
        return state_from_obj(json.load(fh))


def save_state(state: FermionicState, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_obj(state), fh)


def channel_to_obj(channel: FermionicChannel) -> dict:
    return {
        "in_modes": channel.in_modes,
        "out_modes": channel.out_modes,
        "deterministic": channel.deterministic,
        "kraus": [matrix_to_obj(k.matrix) for k in channel.kraus],
    }


def channel_from_obj(obj: dict) -> FermionicChannel:
    in_modes = int(obj["in_modes"])
    out_modes = int(obj.get("out_modes", in_modes))
    mats = [
        matrix_from_obj(k, rows=1 << out_modes, cols=1 << in_modes)
        for k in obj["kraus"]
    ]
    return new_channel(mats, in_modes, out_modes, bool(obj.get("deterministic", True)))


def load_channel(path) -> FermionicChannel:
    with open(path) as fh:
        return channel_from_obj(json.load(fh))


def save_channel(channel: FermionicChannel, path) -> None:
    with open(path, "w") as fh:
        json.dump(channel_to_obj(channel), fh)
