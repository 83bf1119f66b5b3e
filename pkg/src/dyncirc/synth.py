"""Rewrite payloads for measurements and resets on tracked superpositions.

A measurement of qubit ``q`` in a tracked group becomes

    rot G from=psi                      # psi -> |0...0>
    pbind q, rest -> $i : branch |l0|^2 lead=I prep=phi0
                          branch |l1|^2 lead=X prep=phi1

and a reset becomes the same with a ``pgate`` whose leads are both ``I``.
Rotations are carried as exact state specifications; ``rotation_matrix``
gives the deterministic unitary used to realize them in simulation.
"""

from __future__ import annotations

import cmath
from collections.abc import Sequence

import numpy as np

from . import sparse_state as ss
from .ir import Direction, Lead, PBind, PGate, PGateBranch, Rotation
from .qcp import DEFAULT_STATE_THRESHOLD
from .sparse_state import SparseState


class RewriteSkipped(Exception):
    """The state is too large to synthesize; keep the original instruction."""


def rotation_to_zero(qubits: Sequence[int], state: SparseState,
                     state_threshold: int = DEFAULT_STATE_THRESHOLD) -> Rotation:
    if state.n_qubits != len(qubits):
        raise ValueError("state width does not match the group")
    if state.size > state_threshold:
        raise RewriteSkipped(f"state size {state.size} exceeds threshold {state_threshold}")
    return Rotation(tuple(qubits), Direction.TO_ZERO, state)


def _split(qubits: Sequence[int], state: SparseState, target: int, state_threshold: int):
    rot = rotation_to_zero(qubits, state, state_threshold)
    pos = list(qubits).index(target)
    dec = ss.decompose(state, pos)
    if dec.phi0 is None or dec.phi1 is None:
        return None
    weights = [0.0, 0.0]
    for b, a in state.amps:
        weights[(b >> pos) & 1] += abs(a) ** 2
    # normalize by the total so float drift in the state does not leak into p
    p0 = weights[0] / (weights[0] + weights[1])
    p1 = 1.0 - p0
    operands = (target, *(q for q in qubits if q != target))
    return rot, operands, dec, p0, p1


def measurement_pgate(qubits: Sequence[int], state: SparseState, target: int, control: int,
                      state_threshold: int = DEFAULT_STATE_THRESHOLD) -> tuple[Rotation, PBind] | None:
    """Rotation plus bound probabilistic gate emulating ``measure target -> c[control]``.

    Returns ``None`` when one outcome has zero amplitude (deterministic case).
    """
    parts = _split(qubits, state, target, state_threshold)
    if parts is None:
        return None
    rot, operands, dec, p0, p1 = parts
    return rot, PBind(operands, (PGateBranch(Lead.I, dec.phi0, p0),
                                 PGateBranch(Lead.X, dec.phi1, p1)), control)


def reset_pgate(qubits: Sequence[int], state: SparseState, target: int,
                state_threshold: int = DEFAULT_STATE_THRESHOLD) -> tuple[Rotation, PGate] | None:
    parts = _split(qubits, state, target, state_threshold)
    if parts is None:
        return None
    rot, operands, dec, p0, p1 = parts
    return rot, PGate(operands, (PGateBranch(Lead.I, dec.phi0, p0),
                                 PGateBranch(Lead.I, dec.phi1, p1)))


def householder_to_zero(psi: np.ndarray) -> np.ndarray:
    """Unitary ``U`` with ``U @ psi == e_0`` exactly (no leftover phase).

    ``U = e^{-i theta} (I - 2 v v^dag / v^dag v)`` with ``v = psi - e^{i theta} e_0``
    and ``theta`` the phase of ``psi[0]`` (zero when ``psi[0] == 0``).
    """
    psi = np.asarray(psi, dtype=complex)
    dim = psi.size
    theta = cmath.phase(psi[0]) if abs(psi[0]) > 0 else 0.0
    phase = cmath.exp(1j * theta)
    v = psi.copy()
    v[0] -= phase
    vv = np.vdot(v, v).real
    refl = np.eye(dim, dtype=complex)
    if vv > 1e-30:
        refl -= (2.0 / vv) * np.outer(v, v.conj())
    return refl / phase


def rotation_matrix(rot: Rotation) -> np.ndarray:
    """Deterministic realization of a rotation in the local index convention."""
    u = householder_to_zero(rot.state.to_dense())
    if rot.direction is Direction.TO_ZERO:
        return u
    return u.conj().T
