"""JSON-friendly encoding of matrices, spaces and triples.

Complex matrices are encoded as nested lists of [re, im] pairs.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .krein import KreinSpace
from .triple import BoundaryTriple


def encode_matrix(m: np.ndarray) -> list:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed matrix data: {exc}") from exc
    if arr.ndim == 3 and arr.shape[2] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise ConfigError("matrix must be a nested list of [re, im] pairs")


def decode_scalar(data) -> complex:
    if isinstance(data, (int, float)):
        return complex(data)
    if isinstance(data, (list, tuple)) and len(data) == 2:
        return complex(float(data[0]), float(data[1]))
    raise ConfigError("scalar must be a number or an [re, im] pair")


def encode_scalar(z: complex) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_space(space: KreinSpace) -> dict:
    out = {"dim": space.dim, "gram": encode_matrix(space.gram)}
    if not np.allclose(space.j, np.eye(space.dim)):
        out["J"] = encode_matrix(space.j)
    return out


def decode_space(data) -> KreinSpace:
    if not isinstance(data, dict) or "dim" not in data:
        raise ConfigError("space must be an object with a 'dim' field")
    gram = decode_matrix(data["gram"]) if "gram" in data else None
    j = decode_matrix(data["J"]) if "J" in data else None
    return KreinSpace(int(data["dim"]), gram=gram, j=j)


def encode_triple(bt: BoundaryTriple) -> dict:
    return {
        "state": encode_space(bt.state),
        "boundary_dim": bt.boundary_dim,
        "boundary_gram": encode_matrix(bt.boundary_gram),
        "t_basis": encode_matrix(bt.t_basis),
        "G0": encode_matrix(bt.g0),
        "G1": encode_matrix(bt.g1),
    }


def decode_triple(data) -> BoundaryTriple:
    try:
        return BoundaryTriple(
            state=decode_space(data["state"]),
            boundary_dim=int(data["boundary_dim"]),
            t_basis=decode_matrix(data["t_basis"]),
            g0=decode_matrix(data["G0"]),
            g1=decode_matrix(data["G1"]),
            boundary_gram=decode_matrix(data["boundary_gram"])
            if "boundary_gram" in data else None,
        )
    except KeyError as exc:
        raise ConfigError(f"triple data missing field {exc}") from exc
