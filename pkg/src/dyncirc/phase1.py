"""Phase I: rewrite a dynamic circuit into a probabilistic circuit.

One in-order sweep carries an abstract quantum state (QCP) and an abstract
classical state (CCP) and decides, per instruction, whether to drop it,
replace it, or keep it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .ccp import ClassicalState
from .frontend import format_condition
from .gates import GateKind
from .ir import (
    Circuit,
    Dialect,
    IfElse,
    Instruction,
    Measure,
    Reset,
    StatsRecord,
    Unitary,
    bit_atoms,
    circuit_stats,
    is_const,
    touched_qubits,
    validate,
)
from .qcp import DEFAULT_GROUP_THRESHOLD, DEFAULT_STATE_THRESHOLD, QuantumState, QubitStatus
from .simplify import simplify_abstract
from .synth import RewriteSkipped, measurement_pgate, reset_pgate


class InvalidCircuit(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class Outcome(str, Enum):
    KEPT = "Kept"
    DROPPED = "Dropped"
    REPLACED_UNITARY = "ReplacedUnitary"
    REPLACED_PROBABILISTIC = "ReplacedProbabilistic"
    GUARD_SIMPLIFIED = "GuardSimplified"
    GUARD_ELIMINATED = "GuardEliminated"


@dataclass
class InstructionReport:
    index: int
    kind: str
    outcome: Outcome
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"index": self.index, "kind": self.kind, "outcome": self.outcome.value, **self.detail}


@dataclass
class RewriteReport:
    group_threshold: int
    state_threshold: int
    entries: list[InstructionReport]
    input_stats: StatsRecord
    output_stats: StatsRecord

    @property
    def removed_ccop(self) -> int:
        """Input guards rewritten to constants or to probabilistic controls only."""
        return self.input_stats.total_ifelse - self.output_stats.ifelse_with_classical

    @property
    def kept_ccop(self) -> int:
        return self.output_stats.ifelse_with_classical

    @property
    def removed_measure(self) -> int:
        return self.input_stats.total_measure - self.output_stats.total_measure

    @property
    def removed_reset(self) -> int:
        return self.input_stats.total_reset - self.output_stats.total_reset

    def summary(self) -> dict:
        return {
            "total_ccop": self.input_stats.total_ifelse,
            "removed_ccop": self.removed_ccop,
            "kept_ccop": self.kept_ccop,
            "total_measure": self.input_stats.total_measure,
            "kept_measure": self.output_stats.total_measure,
            "removed_measure": self.removed_measure,
            "total_reset": self.input_stats.total_reset,
            "kept_reset": self.output_stats.total_reset,
            "removed_reset": self.removed_reset,
            "pbind": self.output_stats.total_pbind,
            "pgate": self.output_stats.total_pgate,
        }

    def to_json(self) -> dict:
        return {
            "group_threshold": self.group_threshold,
            "state_threshold": self.state_threshold,
            **self.summary(),
            "input_stats": vars(self.input_stats),
            "output_stats": vars(self.output_stats),
            "instructions": [e.to_json() for e in self.entries],
        }


def run_phase1(circuit: Circuit, group_threshold: int = DEFAULT_GROUP_THRESHOLD,
               state_threshold: int = DEFAULT_STATE_THRESHOLD) -> tuple[Circuit, RewriteReport]:
    if circuit.dialect is not Dialect.DYNAMIC:
        raise InvalidCircuit([f"circuit: expected dynamic dialect, got {circuit.dialect.value}"])
    problems = validate(circuit)
    if problems:
        raise InvalidCircuit(problems)

    sq = QuantumState.initial(circuit.n_qubits, group_threshold, state_threshold)
    sc = ClassicalState.initial(circuit.n_bits)
    out: list[Instruction] = []
    entries: list[InstructionReport] = []

    def note(outcome: Outcome, **detail) -> None:
        entries.append(InstructionReport(idx, type(inst).__name__.lower(), outcome, detail))

    for idx, inst in enumerate(circuit.instructions):
        if isinstance(inst, Unitary):
            sq = sq.update_unitary(inst)
            out.append(inst)
            note(Outcome.KEPT)

        elif isinstance(inst, Measure):
            j, i = inst.qubit, inst.bit
            status = sq.status(j)
            if status in (QubitStatus.KET0, QubitStatus.KET1):
                sc = sc.update_measure(i, status)
                note(Outcome.DROPPED, status=status.value)
                continue
            if status is QubitStatus.SUPERPOSITION:
                qubits, state = sq.group_of(j)
                try:
                    rewrite = measurement_pgate(qubits, state, j, i, state_threshold)
                except RewriteSkipped:
                    rewrite = None
                if rewrite is not None:
                    out.extend(rewrite)
                    sc = sc.update_measure(i, status)
                    sq = sq.set_top(qubits)
                    note(Outcome.REPLACED_PROBABILISTIC, status=status.value,
                         probabilities=[b.prob for b in rewrite[1].branches])
                    continue
                # synthesis refused: behave as if nothing were known
                sq = sq.set_top((j,))
                status = QubitStatus.TOP
            out.append(inst)
            sc = sc.update_measure(i, QubitStatus.TOP)
            note(Outcome.KEPT, status=status.value)

        elif isinstance(inst, Reset):
            j = inst.qubit
            status = sq.status(j)
            if status is QubitStatus.KET0:
                note(Outcome.DROPPED, status=status.value)
            elif status is QubitStatus.KET1:
                out.append(Unitary(GateKind.X, (j,)))
                note(Outcome.REPLACED_UNITARY, status=status.value)
            else:
                rewrite = None
                if status is QubitStatus.SUPERPOSITION:
                    qubits, state = sq.group_of(j)
                    try:
                        rewrite = reset_pgate(qubits, state, j, state_threshold)
                    except RewriteSkipped:
                        rewrite = None
                    sq = sq.set_top(qubits)
                if rewrite is not None:
                    out.extend(rewrite)
                    note(Outcome.REPLACED_PROBABILISTIC, status=status.value,
                         probabilities=[b.prob for b in rewrite[1].branches])
                else:
                    out.append(inst)
                    note(Outcome.KEPT, status=status.value)
            sq = sq.reinit(j)

        elif isinstance(inst, IfElse):
            cond = simplify_abstract(inst.cond, sc)
            if is_const(cond):
                body = inst.then_body if cond.value else inst.else_body
                out.extend(body)
                sq = sq.update_many(body)
                note(Outcome.GUARD_ELIMINATED, branch_taken="then" if cond.value else "else",
                     before=format_condition(inst.cond))
            else:
                out.append(IfElse(cond, inst.then_body, inst.else_body))
                sq = sq.set_top(touched_qubits(inst))
                note(Outcome.GUARD_SIMPLIFIED, before=format_condition(inst.cond),
                     after=format_condition(cond), classical_free=not bit_atoms(cond))
        else:  # pragma: no cover - validate rejects everything else
            raise InvalidCircuit([f"instruction {idx}: unexpected {type(inst).__name__}"])

    result = circuit.with_instructions(out, Dialect.PROBABILISTIC)
    report = RewriteReport(group_threshold, state_threshold, entries,
                           circuit_stats(circuit), circuit_stats(result))
    return result, report

