"""Phase II: resolve a probabilistic circuit into executable instances."""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence

import numpy as np

from .gates import GateKind
from .ir import (
    Circuit,
    Dialect,
    IfElse,
    Instruction,
    Lead,
    PBind,
    PGate,
    PGateBranch,
    Rotation,
    Direction,
    Unitary,
    is_const,
)
from .simplify import simplify_instance

MAX_ENUMERATED = 20


class TooManyBranches(ValueError):
    pass


def instance_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th instance of a batch started from ``seed``."""
    return seed + index


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def realize_branch(qubits: Sequence[int], branch: PGateBranch) -> list[Instruction]:
    """Lead operator on ``qubits[0]`` followed by the prep rotation on the rest."""
    out: list[Instruction] = []
    if branch.lead is Lead.X:
        out.append(Unitary(GateKind.X, (qubits[0],)))
    if len(qubits) > 1:
        out.append(Rotation(tuple(qubits[1:]), Direction.FROM_ZERO, branch.prep))
    return out


def _resolve(circuit: Circuit, choose) -> Circuit:
    out: list[Instruction] = []
    assignment: dict[int, int] = {}
    k = 0
    for inst in circuit.instructions:
        if isinstance(inst, (PGate, PBind)):
            pick = choose(k, inst)
            k += 1
            out.extend(realize_branch(inst.qubits, inst.branches[pick]))
            if isinstance(inst, PBind):
                assignment[inst.control] = pick
        elif isinstance(inst, IfElse):
            cond = simplify_instance(inst.cond, assignment)
            if is_const(cond):
                out.extend(inst.then_body if cond.value else inst.else_body)
            else:
                out.append(IfElse(cond, inst.then_body, inst.else_body))
        else:
            out.append(inst)
    return circuit.with_instructions(out, Dialect.INSTANCE)


def instantiate(circuit: Circuit, rng: np.random.Generator | int) -> Circuit:
    """Sample one executable instance; each probabilistic gate draws one uniform."""
    if circuit.dialect is not Dialect.PROBABILISTIC:
        raise ValueError(f"expected a probabilistic circuit, got {circuit.dialect.value}")
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)

    def choose(_k, inst):
        return 0 if rng.random() < inst.branches[0].prob else 1

    return _resolve(circuit, choose)


def probabilistic_count(circuit: Circuit) -> int:
    return sum(isinstance(i, (PGate, PBind)) for i in circuit.instructions)


def enumerate_instances(circuit: Circuit, max_gates: int = MAX_ENUMERATED) -> list[tuple[Circuit, float]]:
    """Every branch assignment with its product probability, zero-probability ones pruned."""
    return list(iter_instances(circuit, max_gates))


def iter_instances(circuit: Circuit, max_gates: int = MAX_ENUMERATED) -> Iterator[tuple[Circuit, float]]:
    if circuit.dialect is not Dialect.PROBABILISTIC:
        raise ValueError(f"expected a probabilistic circuit, got {circuit.dialect.value}")
    gates = [i for i in circuit.instructions if isinstance(i, (PGate, PBind))]
    if len(gates) > max_gates:
        raise TooManyBranches(f"{len(gates)} probabilistic gates exceed the enumeration bound {max_gates}")
    for picks in itertools.product((0, 1), repeat=len(gates)):
        p = 1.0
        for g, b in zip(gates, picks):
            p *= g.branches[b].prob
        if p <= 0.0:
            continue
        yield _resolve(circuit, lambda k, _inst: picks[k]), p
