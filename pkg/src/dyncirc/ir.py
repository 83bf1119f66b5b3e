"""Circuit intermediate representation shared by every pass.

One ``Circuit`` type covers the three dialects: dynamic input circuits,
probabilistic circuits produced by Phase I, and executable instances produced
by Phase II.  All values are immutable.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .gates import ARITY, PARAM_COUNT, GateKind
from .sparse_state import NORM_TOL, SparseState

# ---------------------------------------------------------------------------
# Conditions


@dataclass(frozen=True)
class Bit:
    index: int


@dataclass(frozen=True)
class Prob:
    """A probabilistic control, the compile-time stand-in for bit ``index``."""

    index: int


@dataclass(frozen=True)
class Not:
    child: Condition


@dataclass(frozen=True)
class And:
    left: Condition
    right: Condition


@dataclass(frozen=True)
class Or:
    left: Condition
    right: Condition


@dataclass(frozen=True)
class Xor:
    left: Condition
    right: Condition


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)

Condition = Union[Bit, Prob, Not, And, Or, Xor, Const]
BINARY = (And, Or, Xor)


def walk(cond: Condition) -> Iterator[Condition]:
    stack = [cond]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, BINARY):
            stack.append(node.right)
            stack.append(node.left)


def bit_atoms(cond: Condition) -> set[int]:
    return {n.index for n in walk(cond) if isinstance(n, Bit)}


def prob_atoms(cond: Condition) -> set[int]:
    return {n.index for n in walk(cond) if isinstance(n, Prob)}


def is_const(cond: Condition) -> bool:
    return isinstance(cond, Const)


# Surface guard patterns, before normalization.


@dataclass(frozen=True)
class BitEquals:
    bit: int
    value: int


@dataclass(frozen=True)
class RegisterEquals:
    value: int


SurfaceGuard = Union[BitEquals, RegisterEquals, Bit, Prob, Not, And, Or, Xor, Const]


def normalize_condition(raw: SurfaceGuard, n_bits: int) -> Condition:
    """Translate a surface guard into a boolean expression over bit atoms.

    ``c[i] == 1`` becomes ``c_i``, ``c[i] == 0`` becomes ``!c_i`` and
    ``c == val`` becomes the conjunction over all ``n_bits`` bits of ``val``'s
    binary expansion, folded left from bit 0.  Predicates pass through.
    """
    if isinstance(raw, BitEquals):
        if raw.value not in (0, 1):
            raise ValueError(f"single-bit comparison against {raw.value}")
        if not 0 <= raw.bit < n_bits:
            raise ValueError(f"bit c[{raw.bit}] out of range for {n_bits} bits")
        return Bit(raw.bit) if raw.value == 1 else Not(Bit(raw.bit))
    if isinstance(raw, RegisterEquals):
        if not 0 <= raw.value < (1 << n_bits):
            raise ValueError(f"register value {raw.value} outside [0, 2^{n_bits})")
        out: Condition | None = None
        for i in range(n_bits):
            term: Condition = Bit(i) if (raw.value >> i) & 1 else Not(Bit(i))
            out = term if out is None else And(out, term)
        return TRUE if out is None else out
    return raw


# ---------------------------------------------------------------------------
# Instructions


class Direction(str, Enum):
    TO_ZERO = "to_zero"      # maps ``state`` to |0...0>
    FROM_ZERO = "from_zero"  # maps |0...0> to ``state``


class Lead(str, Enum):
    I = "I"  # noqa: E741
    X = "X"


@dataclass(frozen=True)
class Unitary:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()


@dataclass(frozen=True)
class Measure:
    qubit: int
    bit: int


@dataclass(frozen=True)
class Reset:
    qubit: int


@dataclass(frozen=True)
class IfElse:
    cond: Condition
    then_body: tuple[Unitary, ...]
    else_body: tuple[Unitary, ...] = ()


@dataclass(frozen=True)
class Rotation:
    qubits: tuple[int, ...]
    direction: Direction
    state: SparseState


@dataclass(frozen=True)
class PGateBranch:
    lead: Lead
    prep: SparseState
    prob: float


@dataclass(frozen=True)
class PGate:
    """Two-branch probabilistic gate; ``qubits[0]`` gets the lead operator."""

    qubits: tuple[int, ...]
    branches: tuple[PGateBranch, PGateBranch]


@dataclass(frozen=True)
class PBind:
    """Probabilistic gate bound to control ``control``: branch k sets it to k."""

    qubits: tuple[int, ...]
    branches: tuple[PGateBranch, PGateBranch]
    control: int


Instruction = Union[Unitary, Measure, Reset, IfElse, Rotation, PGate, PBind]


class Dialect(str, Enum):
    DYNAMIC = "dynamic"
    PROBABILISTIC = "probabilistic"
    INSTANCE = "instance"


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    n_bits: int
    instructions: tuple[Instruction, ...] = field(default=())
    dialect: Dialect = Dialect.DYNAMIC

    def __post_init__(self):
        if not isinstance(self.instructions, tuple):
            object.__setattr__(self, "instructions", tuple(self.instructions))

    def with_instructions(self, instructions, dialect: Dialect | None = None) -> Circuit:
        return Circuit(self.n_qubits, self.n_bits, tuple(instructions), dialect or self.dialect)


def touched_qubits(inst: Instruction) -> tuple[int, ...]:
    if isinstance(inst, (Unitary, Rotation, PGate, PBind)):
        return inst.qubits
    if isinstance(inst, (Measure, Reset)):
        return (inst.qubit,)
    out: list[int] = []
    for u in (*inst.then_body, *inst.else_body):
        out.extend(q for q in u.qubits if q not in out)
    return tuple(out)


# ---------------------------------------------------------------------------
# Validation


def _check_unitary(u: Unitary, n: int) -> list[str]:
    problems = []
    if not isinstance(u.kind, GateKind):
        return [f"unknown gate {u.kind!r}"]
    if len(u.qubits) != ARITY[u.kind]:
        problems.append(f"{u.kind.value} takes {ARITY[u.kind]} operands, got {len(u.qubits)}")
    if len(u.params) != PARAM_COUNT[u.kind]:
        problems.append(f"{u.kind.value} takes {PARAM_COUNT[u.kind]} parameters, got {len(u.params)}")
    if any(not math.isfinite(p) for p in u.params):
        problems.append("non-finite gate angle")
    problems.extend(_check_qubits(u.qubits, n))
    return problems


def _check_qubits(qubits: tuple[int, ...], n: int) -> list[str]:
    problems = []
    if len(set(qubits)) != len(qubits):
        problems.append(f"repeated operand in {list(qubits)}")
    problems.extend(f"qubit q[{q}] out of range" for q in qubits if not 0 <= q < n)
    return problems


def _check_branches(inst: PGate | PBind, n: int) -> list[str]:
    problems = _check_qubits(inst.qubits, n)
    if len(inst.qubits) < 1:
        problems.append("probabilistic gate without operands")
    if len(inst.branches) != 2:
        return problems + ["probabilistic gate must have exactly two branches"]
    total = 0.0
    for br in inst.branches:
        if not 0.0 <= br.prob <= 1.0:
            problems.append(f"branch probability {br.prob!r} outside [0, 1]")
        total += br.prob
        if br.prep.n_qubits != len(inst.qubits) - 1:
            problems.append("branch prep width does not match operands")
        if abs(br.prep.norm() - 1.0) > NORM_TOL:
            problems.append("branch prep not normalized")
    if abs(total - 1.0) > NORM_TOL:
        problems.append(f"branch probabilities sum to {total!r}")
    return problems


def validate(circuit: Circuit) -> list[str]:
    """Return every invariant violation as ``"instruction i: message"``; empty means ok."""
    n, m = circuit.n_qubits, circuit.n_bits
    out: list[str] = []
    if n < 1:
        out.append(f"circuit: need at least one qubit, got {n}")
    if m < 0:
        out.append(f"circuit: negative bit count {m}")
    dynamic = circuit.dialect is Dialect.DYNAMIC
    bound: set[int] = set()

    for idx, inst in enumerate(circuit.instructions):
        problems: list[str] = []
        if isinstance(inst, Unitary):
            problems = _check_unitary(inst, n)
        elif isinstance(inst, Measure):
            problems = _check_qubits((inst.qubit,), n)
            if not 0 <= inst.bit < m:
                problems.append(f"bit c[{inst.bit}] out of range")
        elif isinstance(inst, Reset):
            problems = _check_qubits((inst.qubit,), n)
        elif isinstance(inst, IfElse):
            for body in (inst.then_body, inst.else_body):
                for u in body:
                    if not isinstance(u, Unitary):
                        problems.append("branches must contain only unitary gates, found "
                                        f"{type(u).__name__.lower()}")
                    else:
                        problems.extend(_check_unitary(u, n))
            problems.extend(f"bit c[{i}] out of range" for i in sorted(bit_atoms(inst.cond))
                            if not 0 <= i < m)
            probs = prob_atoms(inst.cond)
            if probs and circuit.dialect is not Dialect.PROBABILISTIC:
                problems.append(f"probabilistic control in {circuit.dialect.value} dialect")
            problems.extend(f"unbound probabilistic control ${i}" for i in sorted(probs)
                            if i not in bound)
        elif isinstance(inst, Rotation):
            if dynamic:
                problems.append("probabilistic instruction in dynamic dialect")
            problems.extend(_check_qubits(inst.qubits, n))
            if inst.state.n_qubits != len(inst.qubits):
                problems.append("rotation state width does not match operands")
            if abs(inst.state.norm() - 1.0) > NORM_TOL:
                problems.append("rotation state not normalized")
        elif isinstance(inst, (PGate, PBind)):
            if circuit.dialect is not Dialect.PROBABILISTIC:
                problems.append(f"probabilistic instruction in {circuit.dialect.value} dialect")
            problems.extend(_check_branches(inst, n))
            if isinstance(inst, PBind):
                if not 0 <= inst.control < m:
                    problems.append(f"control ${inst.control} out of range")
                bound.add(inst.control)
        else:
            problems.append(f"unknown instruction {type(inst).__name__}")
        out.extend(f"instruction {idx}: {p}" for p in problems)
    return out


# ---------------------------------------------------------------------------
# Statistics


@dataclass(frozen=True)
class StatsRecord:
    total_ifelse: int = 0
    ifelse_no_classical: int = 0
    total_measure: int = 0
    total_reset: int = 0
    total_pgate: int = 0
    total_pbind: int = 0
    total_rotation: int = 0

    @property
    def ifelse_with_classical(self) -> int:
        return self.total_ifelse - self.ifelse_no_classical


def circuit_stats(circuit: Circuit) -> StatsRecord:
    counts = dict.fromkeys(StatsRecord.__dataclass_fields__, 0)
    for inst in circuit.instructions:
        if isinstance(inst, IfElse):
            counts["total_ifelse"] += 1
            if not bit_atoms(inst.cond):
                counts["ifelse_no_classical"] += 1
        elif isinstance(inst, Measure):
            counts["total_measure"] += 1
        elif isinstance(inst, Reset):
            counts["total_reset"] += 1
        elif isinstance(inst, PGate):
            counts["total_pgate"] += 1
        elif isinstance(inst, PBind):
            counts["total_pbind"] += 1
        elif isinstance(inst, Rotation):
            counts["total_rotation"] += 1
    return StatsRecord(**counts)
