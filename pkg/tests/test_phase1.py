from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncirc.benchgen import GeneratorConfig, generate
from dyncirc.frontend import parse_dynamic, parse_probabilistic, print_circuit
from dyncirc.ccp import Token
from dyncirc.ir import Dialect, IfElse, Measure, PBind, Reset, Rotation, Unitary, bit_atoms, prob_atoms, validate
from dyncirc.oracle import equivalence_distance
from dyncirc.phase1 import InvalidCircuit, Outcome, run_phase1

DATA = Path(__file__).parent / "data"


def dyn(body: str, n: int = 2, m: int = 1):
    return parse_dynamic(f"qreg q[{n}]\ncreg c[{m}]\n{body}\n")


def outcomes(report):
    return [e.outcome for e in report.entries]


def test_ghz_golden():
    out, report = run_phase1(parse_dynamic((DATA / "ghz.dc").read_text()))
    assert print_circuit(out) == (DATA / "ghz.pdc").read_text()
    assert out.dialect is Dialect.PROBABILISTIC
    assert report.removed_ccop == 1 and report.kept_ccop == 1
    assert report.removed_measure == 1 and report.output_stats.total_pbind == 1


def test_known_measurement_eliminates_guard():
    out, report = run_phase1(dyn("x q[0]\nmeasure q[0] -> c[0]\nif (c[0]) { x q[1] }"))
    assert print_circuit(out).splitlines()[2:] == ["x q[0]", "x q[1]"]
    assert outcomes(report) == [Outcome.KEPT, Outcome.DROPPED, Outcome.GUARD_ELIMINATED]


def test_else_branch_taken_for_false_guard():
    out, _ = run_phase1(dyn("measure q[0] -> c[0]\nif (c[0]) { x q[1] } else { h q[1] }"))
    assert [type(i) for i in out.instructions] == [Unitary]
    assert out.instructions[0].kind.value == "h"


def test_unitary_only_is_unchanged():
    d = generate(5, 10, 3, GeneratorConfig().silent())
    out, report = run_phase1(d)
    assert out.instructions == d.instructions
    assert set(outcomes(report)) == {Outcome.KEPT}


def test_reset_cases():
    out, report = run_phase1(dyn("reset q[0]\nx q[1]\nreset q[1]"))
    assert [type(i) for i in out.instructions] == [Unitary, Unitary]
    assert outcomes(report) == [Outcome.DROPPED, Outcome.KEPT, Outcome.REPLACED_UNITARY]


def test_reset_of_superposition_becomes_pgate():
    out, report = run_phase1(dyn("h q[0]\nreset q[0]\nx q[0]\nmeasure q[0] -> c[0]"))
    kinds = [type(i).__name__ for i in out.instructions]
    assert kinds == ["Unitary", "Rotation", "PGate", "Unitary"]
    assert report.entries[-1].outcome is Outcome.DROPPED
    assert report.entries[-1].detail["status"] == "KET1"


def test_unknown_guard_tops_touched_qubits():
    src = "h q[0]\nh q[1]\ncx q[1], q[2]\nmeasure q[0] -> c[0]\nreset q[0]\nif (c[0]) { x q[1] }\nmeasure q[2] -> c[0]"
    out, report = run_phase1(dyn(src, n=3))
    assert isinstance(out.instructions[-1], Measure)
    assert report.entries[-1].detail["status"] == "TOP"
    assert report.entries[-2].outcome is Outcome.GUARD_SIMPLIFIED
    assert report.entries[-2].detail["classical_free"] is True


def test_bit_overwritten_by_later_known_measurement():
    # c[0] first holds a random outcome, then a deterministic one
    src = "h q[0]\nmeasure q[0] -> c[0]\nreset q[0]\nmeasure q[0] -> c[0]\nif (c[0]) { x q[1] }"
    d = dyn(src)
    out, report = run_phase1(d)
    assert isinstance(out.instructions[1], Rotation) and isinstance(out.instructions[2], PBind)
    assert not any(isinstance(i, IfElse) for i in out.instructions)
    assert report.entries[-1].outcome is Outcome.GUARD_ELIMINATED
    assert equivalence_distance(d, out) <= 1e-9


def test_threshold_forces_keep():
    out, report = run_phase1(dyn("h q[0]\ncx q[0], q[1]\nmeasure q[1] -> c[0]"), state_threshold=1)
    assert isinstance(out.instructions[-1], Measure)
    assert report.entries[-1].detail["status"] == "TOP"


def test_rejects_wrong_dialect_and_invalid_input():
    pc = parse_probabilistic("qreg q[1]\ncreg c[1]\nx q[0]\n")
    with pytest.raises(InvalidCircuit):
        run_phase1(pc)
    bad = dyn("x q[0]").with_instructions((Reset(5),))
    with pytest.raises(InvalidCircuit) as exc:
        run_phase1(bad)
    assert exc.value.violations


def test_report_json_shape():
    _, report = run_phase1(parse_dynamic((DATA / "ghz.dc").read_text()))
    js = report.to_json()
    assert len(js["instructions"]) == 15
    assert {"removed_ccop", "kept_ccop", "group_threshold", "state_threshold"} <= js.keys()


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 12), st.integers(0, 10_000))
def test_rewrite_is_valid_deterministic_and_equivalent(width, depth, seed):
    d = generate(width, depth, seed)
    out, report = run_phase1(d)
    assert validate(out) == []
    again, _ = run_phase1(d)
    assert print_circuit(again) == print_circuit(out)
    s_in, s_out = report.input_stats, report.output_stats
    assert s_out.total_measure <= s_in.total_measure
    assert s_out.total_reset <= s_in.total_reset
    assert s_out.total_ifelse <= s_in.total_ifelse
    assert 0 <= report.removed_ccop <= s_in.total_ifelse
    assert equivalence_distance(d, out, max_paths=1 << 14) <= 1e-9


_TOKEN_OF = {"KET0": Token.ZERO, "KET1": Token.ONE, "SUPERPOSITION": Token.PROB, "TOP": Token.TOP}


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 30), st.integers(0, 10_000))
def test_guard_metric_and_control_binding(width, depth, seed):
    d = generate(width, depth, seed)
    out, report = run_phase1(d)
    # guards whose atoms were all known or PROB at their program point must be counted as removed
    tokens = [Token.ZERO] * d.n_bits
    resolvable = 0
    for entry in report.entries:
        inst = d.instructions[entry.index]
        if isinstance(inst, Measure):
            tokens[inst.bit] = _TOKEN_OF[entry.detail["status"]]
        elif isinstance(inst, IfElse):
            resolvable += all(tokens[i] is not Token.TOP for i in bit_atoms(inst.cond))
    assert report.removed_ccop >= resolvable
    bound: set[int] = set()
    for inst in out.instructions:
        if isinstance(inst, PBind):
            bound.add(inst.control)
        elif isinstance(inst, IfElse):
            assert prob_atoms(inst.cond) <= bound
