"""Gate alphabet and matrices.

Local index convention: for a gate applied to operands ``(q_0, ..., q_{k-1})``
bit ``k`` of a matrix row/column index is the value of operand ``k``.  So for
``cx a, b`` the control is bit 0 and the target is bit 1.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

import numpy as np


class GateKind(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    CCX = "ccx"


ARITY: dict[GateKind, int] = {
    **{k: 1 for k in (GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
                      GateKind.SDG, GateKind.T, GateKind.TDG,
                      GateKind.RX, GateKind.RY, GateKind.RZ)},
    GateKind.CX: 2,
    GateKind.CZ: 2,
    GateKind.SWAP: 2,
    GateKind.CCX: 3,
}

PARAM_COUNT: dict[GateKind, int] = {k: (1 if k in (GateKind.RX, GateKind.RY, GateKind.RZ) else 0)
                                    for k in GateKind}

_S2 = 1 / math.sqrt(2)
_T = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

_FIXED: dict[GateKind, np.ndarray] = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, _T]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, _T.conjugate()]], dtype=complex),
}


def _permutation(k: int, perm) -> np.ndarray:
    dim = 1 << k
    m = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        m[perm(i), i] = 1
    return m


_FIXED[GateKind.CX] = _permutation(2, lambda i: i ^ 2 if i & 1 else i)
_FIXED[GateKind.SWAP] = _permutation(2, lambda i: ((i & 1) << 1) | ((i >> 1) & 1))
_FIXED[GateKind.CCX] = _permutation(3, lambda i: i ^ 4 if (i & 3) == 3 else i)
_FIXED[GateKind.CZ] = np.diag([1, 1, 1, -1]).astype(complex)

for _m in _FIXED.values():
    _m.setflags(write=False)


@lru_cache(maxsize=4096)
def _rotation(kind: GateKind, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind is GateKind.RX:
        m = np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    elif kind is GateKind.RY:
        m = np.array([[c, -s], [s, c]], dtype=complex)
    else:
        m = np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=complex)
    m.setflags(write=False)
    return m


def gate_matrix(kind: GateKind, params: tuple[float, ...] = ()) -> np.ndarray:
    """Return the (read-only) unitary of ``kind`` in the local index convention."""
    if PARAM_COUNT[kind]:
        return _rotation(kind, float(params[0]))
    return _FIXED[kind]
