"""Exact path-enumeration semantics for all three circuit dialects.

Paths are kept as rows of a dense amplitude matrix whose squared row norm is
the path probability, so an ensemble's density matrix is ``A^T conj(A)``.
Measurements and resets split each path into (at most) two children,
probabilistic gates split by their branch probabilities, and guards are
evaluated per path on its classical bits and control values.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gates import gate_matrix
from .ir import (
    And,
    Bit,
    Circuit,
    Condition,
    Const,
    Dialect,
    IfElse,
    Measure,
    Not,
    Or,
    PBind,
    PGate,
    Prob,
    Reset,
    Rotation,
    Unitary,
    Xor,
)
from .phase2 import realize_branch
from .synth import rotation_matrix

MAX_QUBITS = 12
DEFAULT_MAX_PATHS = 4096
PRUNE = 1e-12


class OracleError(RuntimeError):
    pass


class OracleCapExceeded(OracleError):
    """Circuit too wide or too branchy for exact enumeration."""


@dataclass(frozen=True)
class PathState:
    state: np.ndarray           # normalized, dense over all qubits
    bits: tuple[int, ...]
    controls: dict[int, int]    # probabilistic control values bound on this path
    probability: float


class Ensemble:
    def __init__(self, n_qubits: int, amps: np.ndarray, bits: np.ndarray, controls: np.ndarray):
        self.n_qubits = n_qubits
        self.amps = amps
        self.bits = bits
        self.controls = controls

    def __len__(self) -> int:
        return self.amps.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.einsum("pi,pi->p", self.amps, self.amps.conj()).real

    @cached_property
    def paths(self) -> list[PathState]:
        out = []
        for row, b, c, p in zip(self.amps, self.bits, self.controls, self.probabilities):
            out.append(PathState(row / np.sqrt(p), tuple(int(x) for x in b),
                                 {i: int(v) for i, v in enumerate(c) if v >= 0}, float(p)))
        return out

    def density(self) -> np.ndarray:
        return self.amps.T @ self.amps.conj()


# ---------------------------------------------------------------------------


def _axis(q: int, n: int) -> int:
    return 1 + (n - 1 - q)


def apply_matrix(amps: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a local-convention matrix on ``qubits`` to every row of ``amps``."""
    k = len(qubits)
    if amps.shape[0] == 0:
        return amps
    tensor = amps.reshape((amps.shape[0],) + (2,) * n)
    m = np.asarray(matrix).reshape((2,) * (2 * k))
    contracted = [_axis(qubits[i], n) for i in reversed(range(k))]
    res = np.tensordot(m, tensor, axes=(list(range(k, 2 * k)), contracted))
    current = contracted + [a for a in range(n + 1) if a not in contracted]
    res = np.transpose(res, np.argsort(current))
    return np.ascontiguousarray(res).reshape(amps.shape)


def _basis_bit(n: int, q: int) -> np.ndarray:
    return ((np.arange(1 << n) >> q) & 1).astype(bool)


def eval_condition(cond: Condition, bits: np.ndarray, controls: np.ndarray) -> np.ndarray:
    """Vectorized guard evaluation, one boolean per path."""
    if isinstance(cond, Bit):
        return bits[:, cond.index].astype(bool)
    if isinstance(cond, Prob):
        vals = controls[:, cond.index]
        if np.any(vals < 0):
            raise OracleError(f"probabilistic control ${cond.index} read before binding")
        return vals.astype(bool)
    if isinstance(cond, Const):
        return np.full(bits.shape[0], cond.value, dtype=bool)
    if isinstance(cond, Not):
        return ~eval_condition(cond.child, bits, controls)
    a = eval_condition(cond.left, bits, controls)
    b = eval_condition(cond.right, bits, controls)
    if isinstance(cond, And):
        return a & b
    if isinstance(cond, Or):
        return a | b
    if isinstance(cond, Xor):
        return a ^ b
    raise TypeError(f"not a condition: {cond!r}")


def _has_prob(cond: Condition) -> bool:
    if isinstance(cond, Prob):
        return True
    if isinstance(cond, Not):
        return _has_prob(cond.child)
    if isinstance(cond, (And, Or, Xor)):
        return _has_prob(cond.left) or _has_prob(cond.right)
    return False


def _apply_unitaries(amps: np.ndarray, body: Iterable, n: int) -> np.ndarray:
    for inst in body:
        if isinstance(inst, Unitary):
            amps = apply_matrix(amps, gate_matrix(inst.kind, inst.params), inst.qubits, n)
        elif isinstance(inst, Rotation):
            amps = apply_matrix(amps, rotation_matrix(inst), inst.qubits, n)
        else:
            raise OracleError(f"non-unitary {type(inst).__name__} in a unitary context")
    return amps


def _split_on(amps: np.ndarray, one: np.ndarray):
    """Per-path branch weights for the qubit selected by basis mask ``one``."""
    total = np.einsum("pi,pi->p", amps, amps.conj()).real
    w1 = np.einsum("pi,pi->p", amps[:, one], amps[:, one].conj()).real
    frac1 = np.divide(w1, total, out=np.zeros_like(w1), where=total > 0)
    return frac1 > PRUNE, (1 - frac1) > PRUNE


def simulate(circuit: Circuit, max_paths: int = DEFAULT_MAX_PATHS) -> Ensemble:
    n, m = circuit.n_qubits, circuit.n_bits
    if n > MAX_QUBITS:
        raise OracleCapExceeded(f"{n} qubits exceed the exact-simulation cap of {MAX_QUBITS}")
    dim = 1 << n
    amps = np.zeros((1, dim), dtype=complex)
    amps[0, 0] = 1
    bits = np.zeros((1, m), dtype=np.int8)
    controls = np.full((1, m), -1, dtype=np.int8)
    probabilistic = circuit.dialect is Dialect.PROBABILISTIC

    def check(count: int) -> None:
        if count > max_paths:
            raise OracleCapExceeded(f"path count {count} exceeds max_paths={max_paths}")

    for idx, inst in enumerate(circuit.instructions):
        if isinstance(inst, (Unitary, Rotation)):
            amps = _apply_unitaries(amps, (inst,), n)

        elif isinstance(inst, (Measure, Reset)):
            one = _basis_bit(n, inst.qubit)
            keep1, keep0 = _split_on(amps, one)
            a0 = amps[keep0].copy()
            a0[:, one] = 0
            a1 = amps[keep1].copy()
            a1[:, ~one] = 0
            b0, b1 = bits[keep0].copy(), bits[keep1].copy()
            if isinstance(inst, Measure):
                b0[:, inst.bit] = 0
                b1[:, inst.bit] = 1
            else:
                # flip the |1> branch back to |0>
                moved = np.zeros_like(a1)
                moved[:, ~one] = a1[:, one]
                a1 = moved
            amps = np.concatenate([a0, a1])
            bits = np.concatenate([b0, b1])
            controls = np.concatenate([controls[keep0], controls[keep1]])
            check(amps.shape[0])

        elif isinstance(inst, IfElse):
            if _has_prob(inst.cond) and not probabilistic:
                raise OracleError(f"instruction {idx}: probabilistic control in "
                                  f"{circuit.dialect.value} dialect")
            mask = eval_condition(inst.cond, bits, controls)
            amps = amps.copy()
            if inst.then_body and mask.any():
                amps[mask] = _apply_unitaries(amps[mask], inst.then_body, n)
            if inst.else_body and (~mask).any():
                amps[~mask] = _apply_unitaries(amps[~mask], inst.else_body, n)

        elif isinstance(inst, (PGate, PBind)):
            if not probabilistic:
                raise OracleError(f"instruction {idx}: probabilistic gate in {circuit.dialect.value} dialect")
            parts_a, parts_b, parts_c = [], [], []
            for k, br in enumerate(inst.branches):
                if br.prob <= PRUNE:
                    continue
                a = _apply_unitaries(amps, realize_branch(inst.qubits, br), n) * np.sqrt(br.prob)
                c = controls.copy()
                if isinstance(inst, PBind):
                    c[:, inst.control] = k
                parts_a.append(a)
                parts_b.append(bits)
                parts_c.append(c)
            amps = np.concatenate(parts_a)
            bits = np.concatenate(parts_b)
            controls = np.concatenate(parts_c)
            check(amps.shape[0])
        else:
            raise OracleError(f"instruction {idx}: cannot simulate {type(inst).__name__}")

    return Ensemble(n, amps, bits, controls)


def ensemble_density(ensemble: Ensemble) -> np.ndarray:
    return ensemble.density()


def circuit_density(circuit: Circuit, max_paths: int = DEFAULT_MAX_PATHS) -> np.ndarray:
    return simulate(circuit, max_paths).density()


def mixture_density(instances: Iterable[tuple[Circuit, float]], max_paths: int = DEFAULT_MAX_PATHS) -> np.ndarray:
    rho = None
    for circ, p in instances:
        part = p * circuit_density(circ, max_paths)
        rho = part if rho is None else rho + part
    if rho is None:
        raise OracleError("empty mixture")
    return rho


def frobenius(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def equivalence_distance(a: Circuit, b: Circuit, max_paths: int = DEFAULT_MAX_PATHS) -> float:
    """Frobenius distance between the ensemble densities of two circuits."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return frobenius(circuit_density(a, max_paths), circuit_density(b, max_paths))
