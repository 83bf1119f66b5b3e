from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference
from dyncirc.benchgen import generate
from dyncirc.frontend import parse_dynamic, parse_probabilistic
from dyncirc.ir import Dialect, IfElse, Not, Reset
from dyncirc.oracle import OracleCapExceeded, OracleError, circuit_density, equivalence_distance, simulate
from dyncirc.phase1 import run_phase1

R = 1 / math.sqrt(2)


def dyn(body: str, n: int = 2, m: int = 1):
    return parse_dynamic(f"qreg q[{n}]\ncreg c[{m}]\n{body}\n")


def test_measure_plus_gives_two_paths():
    ens = simulate(dyn("h q[0]\nmeasure q[0] -> c[0]", n=1))
    assert len(ens) == 2
    assert sorted(ens.probabilities.tolist()) == pytest.approx([0.5, 0.5])
    assert sorted(p.bits for p in ens.paths) == [(0,), (1,)]
    assert np.allclose(ens.density(), np.diag([0.5, 0.5]))


def test_unitary_circuit_is_one_pure_path():
    ens = simulate(dyn("h q[0]\ncx q[0], q[1]"))
    assert len(ens) == 1
    rho = ens.density()
    bell = np.array([R, 0, 0, R])
    assert np.allclose(rho, np.outer(bell, bell))
    assert np.linalg.matrix_rank(rho, tol=1e-9) == 1


def test_ghz_style_correlation():
    ens = simulate(dyn("h q[0]\ncx q[0], q[1]\nmeasure q[0] -> c[0]\nmeasure q[1] -> c[1]", m=2))
    assert sorted(p.bits for p in ens.paths) == [(0, 0), (1, 1)]


def test_reset_of_plus_lands_in_zero():
    rho = circuit_density(dyn("h q[0]\nreset q[0]", n=1))
    assert np.allclose(rho, np.diag([1, 0]))


def test_guard_reads_path_bits():
    rho = circuit_density(dyn("h q[0]\nmeasure q[0] -> c[0]\nif (c[0]) { x q[0] }\nif (!c[0]) { x q[1] }"))
    # both paths end with q0=0; q1 flipped only on the c=0 path
    assert np.allclose(np.diag(rho).real, [0.5, 0, 0.5, 0])


def test_probabilistic_controls():
    pc = parse_probabilistic("qreg q[1]\ncreg c[1]\n"
                             "pbind q[0] -> $0 : branch 0.25 lead=I prep={0: (1,0)} branch 0.75 lead=X prep={0: (1,0)}\n"
                             "if ($0) { x q[0] }\n")
    ens = simulate(pc)
    assert ens.probabilities.tolist() == pytest.approx([0.25, 0.75])
    assert np.allclose(ens.density(), np.diag([1, 0]))


def test_distance_to_self_is_zero():
    d = generate(4, 15, 2)
    assert equivalence_distance(d, d) == 0.0


def test_flipped_guard_is_detected():
    d = dyn("h q[0]\nmeasure q[0] -> c[0]\nif (c[0]) { x q[1] }")
    g = d.instructions[-1]
    flipped = d.with_instructions((*d.instructions[:-1], IfElse(Not(g.cond), g.then_body, g.else_body)))
    assert equivalence_distance(d, flipped) > 0.1


def test_caps():
    wide = parse_dynamic("qreg q[13]\ncreg c[1]\nx q[0]\n")
    with pytest.raises(OracleCapExceeded):
        simulate(wide)
    many = dyn("".join(f"h q[{i}]\nmeasure q[{i}] -> c[{i}]\n" for i in range(4)), n=4, m=4)
    with pytest.raises(OracleCapExceeded):
        simulate(many, max_paths=8)
    assert len(simulate(many, max_paths=16)) == 16


def test_dialect_checks():
    pc = parse_probabilistic("qreg q[1]\ncreg c[1]\n"
                             "pgate q[0] : branch 0.5 lead=I prep={0: (1,0)} branch 0.5 lead=X prep={0: (1,0)}\n")
    simulate(pc)
    with pytest.raises(OracleError):
        simulate(pc.with_instructions(pc.instructions, dialect=Dialect.DYNAMIC))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 10), st.integers(0, 10_000), st.booleans())
def test_agrees_with_reference_simulator(width, depth, seed, rewrite):
    d = generate(max(width, 2), depth, seed)
    if rewrite:
        d, _ = run_phase1(d)
    ens = simulate(d, max_paths=1 << 14)
    probs = ens.probabilities
    assert math.isclose(probs.sum(), 1.0, abs_tol=1e-9)
    rho = ens.density()
    assert np.isclose(np.trace(rho).real, 1.0)
    assert np.linalg.norm(rho - reference.density(d)) <= 1e-9
    for p in ens.paths:
        assert np.isclose(np.linalg.norm(p.state), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 8), st.integers(0, 10_000), st.data())
def test_reset_postcondition(width, depth, seed, data):
    d = generate(width, depth, seed)
    q = data.draw(st.integers(0, width - 1))
    ens = simulate(d.with_instructions((*d.instructions, Reset(q))), max_paths=1 << 14)
    for p in ens.paths:
        assert sum(abs(a) ** 2 for b, a in enumerate(p.state) if (b >> q) & 1) <= 1e-12
