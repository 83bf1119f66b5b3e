"""Exact sparse complex statevectors over a small ordered tuple of qubits.

Basis index ``b`` has bit ``k`` equal to the value of the qubit at local
position ``k`` (position 0 is least significant).
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .gates import ARITY, GateKind, gate_matrix

PRUNE_EPS = 1e-12
NORM_TOL = 1e-9


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class SparseState:
    """Normalized sparse amplitude map; ``amps`` is sorted by basis index."""

    n_qubits: int
    amps: tuple[tuple[int, complex], ...]

    @classmethod
    def from_dict(cls, n_qubits: int, amps: Mapping[int, complex], *, normalize: bool = False) -> SparseState:
        kept = {}
        for b, a in amps.items():
            a = complex(a)
            if abs(a) >= PRUNE_EPS:
                if not 0 <= b < (1 << n_qubits):
                    raise StateError(f"basis index {b} out of range for {n_qubits} qubits")
                kept[int(b)] = a
        norm = math.sqrt(sum(abs(a) ** 2 for a in kept.values()))
        if norm == 0.0:
            raise StateError("zero state")
        if normalize:
            if abs(norm - 1.0) > PRUNE_EPS:
                kept = {b: a / norm for b, a in kept.items()}
        elif abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state not normalized (norm {norm!r})")
        return cls(n_qubits, tuple(sorted(kept.items())))

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> SparseState:
        return cls(n_qubits, ((index, 1 + 0j),))

    @classmethod
    def from_dense(cls, vec: Sequence[complex] | np.ndarray, *, normalize: bool = True) -> SparseState:
        vec = np.asarray(vec, dtype=complex)
        n = int(vec.size).bit_length() - 1
        if 1 << n != vec.size:
            raise StateError("dense vector length is not a power of two")
        return cls.from_dict(n, {i: a for i, a in enumerate(vec)}, normalize=normalize)

    @property
    def size(self) -> int:
        return len(self.amps)

    def as_dict(self) -> dict[int, complex]:
        return dict(self.amps)

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(1 << self.n_qubits, dtype=complex)
        for b, a in self.amps:
            vec[b] = a
        return vec

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for _, a in self.amps))


def _finish(n_qubits: int, amps: dict[int, complex]) -> SparseState:
    # renormalize only if drift exceeds PRUNE_EPS
    return SparseState.from_dict(n_qubits, amps, normalize=True)


def apply_matrix(state: SparseState, matrix: np.ndarray, positions: Sequence[int]) -> SparseState:
    """Apply a ``2^k x 2^k`` matrix to ``state`` at the given local positions."""
    k = len(positions)
    if len(set(positions)) != k:
        raise StateError(f"repeated positions {tuple(positions)}")
    for p in positions:
        if not 0 <= p < state.n_qubits:
            raise StateError(f"position {p} out of range for {state.n_qubits} qubits")
    mask = 0
    for p in positions:
        mask |= 1 << p

    # group amplitudes by the bits outside ``positions``
    blocks: dict[int, dict[int, complex]] = defaultdict(dict)
    for b, a in state.amps:
        local = 0
        for i, p in enumerate(positions):
            local |= ((b >> p) & 1) << i
        blocks[b & ~mask][local] = a

    out: dict[int, complex] = {}
    dim = 1 << k
    for rest, sub in blocks.items():
        vec = np.zeros(dim, dtype=complex)
        for local, a in sub.items():
            vec[local] = a
        res = matrix @ vec
        for local in range(dim):
            a = res[local]
            if abs(a) < PRUNE_EPS:
                continue
            b = rest
            for i, p in enumerate(positions):
                b |= ((local >> i) & 1) << p
            out[b] = complex(a)
    return _finish(state.n_qubits, out)


def apply_gate(state: SparseState, kind: GateKind, positions: Sequence[int],
               params: tuple[float, ...] = ()) -> SparseState:
    if len(positions) != ARITY[kind]:
        raise StateError(f"{kind.value} expects {ARITY[kind]} positions, got {len(positions)}")
    return apply_matrix(state, gate_matrix(kind, params), positions)


@dataclass(frozen=True)
class Decomposition:
    """``psi = lambda0 |0>_pos |phi0> + lambda1 |1>_pos |phi1>``."""

    lambda0: complex
    lambda1: complex
    phi0: SparseState | None
    phi1: SparseState | None

    @property
    def probabilities(self) -> tuple[float, float]:
        return abs(self.lambda0) ** 2, abs(self.lambda1) ** 2


def delete_bit(b: int, pos: int) -> int:
    low = b & ((1 << pos) - 1)
    return low | ((b >> (pos + 1)) << pos)


def insert_bit(b: int, pos: int, value: int) -> int:
    low = b & ((1 << pos) - 1)
    return low | (value << pos) | ((b >> pos) << (pos + 1))


def decompose(state: SparseState, pos: int) -> Decomposition:
    """Split ``state`` on the qubit at local position ``pos``.

    Each ``lambda_k`` takes the phase of the lowest-index amplitude in its
    branch, so ``phi_k`` has a real positive first amplitude.
    """
    if not 0 <= pos < state.n_qubits:
        raise StateError(f"position {pos} out of range for {state.n_qubits} qubits")
    branches: tuple[dict[int, complex], dict[int, complex]] = ({}, {})
    for b, a in state.amps:
        branches[(b >> pos) & 1][delete_bit(b, pos)] = a

    lambdas: list[complex] = []
    phis: list[SparseState | None] = []
    for br in branches:
        norm = math.sqrt(sum(abs(a) ** 2 for a in br.values()))
        if norm <= PRUNE_EPS:
            lambdas.append(0j)
            phis.append(None)
            continue
        first = br[min(br)]
        lam = norm * cmath.exp(1j * cmath.phase(first))
        lambdas.append(lam)
        phis.append(SparseState.from_dict(state.n_qubits - 1, {b: a / lam for b, a in br.items()},
                                          normalize=True))
    return Decomposition(lambdas[0], lambdas[1], phis[0], phis[1])


def tensor_insert(phi: SparseState, bit: int, pos: int) -> SparseState:
    """Insert a qubit fixed to ``bit`` at local position ``pos``."""
    if not 0 <= pos <= phi.n_qubits:
        raise StateError(f"insert position {pos} out of range for {phi.n_qubits} qubits")
    return SparseState(phi.n_qubits + 1, tuple((insert_bit(b, pos, bit), a) for b, a in phi.amps))


def combine(terms: Sequence[tuple[complex, SparseState]]) -> SparseState:
    """Normalized linear combination of states over the same qubit count."""
    n = terms[0][1].n_qubits
    acc: dict[int, complex] = defaultdict(complex)
    for w, s in terms:
        for b, a in s.amps:
            acc[b] += w * a
    return _finish(n, acc)


def merge_groups(a: SparseState, qubits_a: Sequence[int],
                 b: SparseState, qubits_b: Sequence[int]) -> tuple[tuple[int, ...], SparseState]:
    """Tensor product of two disjoint groups, ordered by ascending qubit index."""
    if set(qubits_a) & set(qubits_b):
        raise StateError("groups overlap")
    merged = tuple(sorted((*qubits_a, *qubits_b)))
    where = {q: i for i, q in enumerate(merged)}
    pos_a = [where[q] for q in qubits_a]
    pos_b = [where[q] for q in qubits_b]

    def scatter(idx: int, positions: list[int]) -> int:
        out = 0
        for i, p in enumerate(positions):
            out |= ((idx >> i) & 1) << p
        return out

    amps = {}
    for ia, xa in a.amps:
        sa = scatter(ia, pos_a)
        for ib, xb in b.amps:
            amps[sa | scatter(ib, pos_b)] = xa * xb
    return merged, SparseState(len(merged), tuple(sorted(amps.items())))


def deterministic_value(state: SparseState, pos: int, tol: float = NORM_TOL) -> int | None:
    """0 or 1 if the qubit at ``pos`` is in a basis state up to amplitude ``tol``."""
    w = [0.0, 0.0]
    for b, a in state.amps:
        w[(b >> pos) & 1] += abs(a) ** 2
    if math.sqrt(w[1]) <= tol:
        return 0
    if math.sqrt(w[0]) <= tol:
        return 1
    return None


def factor_out(state: SparseState, pos: int) -> SparseState:
    """Drop a deterministic qubit, returning the state of the remaining ones."""
    value = deterministic_value(state, pos)
    if value is None:
        raise StateError(f"qubit at position {pos} is not deterministic")
    amps = {delete_bit(b, pos): a for b, a in state.amps if (b >> pos) & 1 == value}
    return _finish(state.n_qubits - 1, amps)


def fidelity(a: SparseState, b: SparseState) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    da = a.as_dict()
    return abs(sum(da.get(i, 0j).conjugate() * x for i, x in b.amps)) ** 2
