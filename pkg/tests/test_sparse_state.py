from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncirc import sparse_state as ss
from dyncirc.gates import GateKind, gate_matrix
from dyncirc.sparse_state import SparseState, StateError
from reference import full_operator
from strategies import random_state, sparse_states

R = 1 / math.sqrt(2)


def close(a: SparseState, b: SparseState, tol: float = 1e-12) -> bool:
    return a.n_qubits == b.n_qubits and np.allclose(a.to_dense(), b.to_dense(), atol=tol)


def test_h_on_zero():
    out = ss.apply_gate(SparseState.basis(1), GateKind.H, (0,))
    assert close(out, SparseState.from_dict(1, {0: R, 1: R}))


def test_x_on_zero():
    assert ss.apply_gate(SparseState.basis(1), GateKind.X, (0,)).as_dict() == {1: 1}


def test_cx_makes_bell_pair():
    plus = SparseState.from_dict(2, {0: R, 1: R})
    out = ss.apply_gate(plus, GateKind.CX, (0, 1))
    # dense 4x4 oracle
    expect = gate_matrix(GateKind.CX) @ plus.to_dense()
    assert np.allclose(out.to_dense(), expect)
    assert set(out.as_dict()) == {0, 3}


@settings(max_examples=200, deadline=None)
@given(sparse_states(min_qubits=2, max_qubits=5), st.data())
def test_apply_gate_matches_full_operator(state, data):
    kind = data.draw(st.sampled_from([GateKind.H, GateKind.RY, GateKind.CX, GateKind.SWAP, GateKind.CCX, GateKind.T]))
    arity = {GateKind.CX: 2, GateKind.SWAP: 2, GateKind.CCX: 3}.get(kind, 1)
    if arity > state.n_qubits:
        return
    pos = tuple(data.draw(st.permutations(range(state.n_qubits)))[:arity])
    params = (0.81,) if kind is GateKind.RY else ()
    out = ss.apply_gate(state, kind, pos, params)
    expect = full_operator(gate_matrix(kind, params), pos, state.n_qubits) @ state.to_dense()
    assert np.allclose(out.to_dense(), expect, atol=1e-12)
    assert abs(out.norm() - 1) <= 1e-9


def test_unnormalized_input_rejected():
    with pytest.raises(StateError):
        SparseState.from_dict(1, {0: 1, 1: 1})
    with pytest.raises(StateError):
        SparseState.from_dict(1, {0: 0})
    with pytest.raises(StateError):
        SparseState.from_dict(1, {2: 1})


def test_pruning_keeps_amplitudes_at_threshold():
    s = SparseState.from_dict(2, {0: 1.0, 1: 1e-12, 2: 1e-13}, normalize=True)
    assert set(s.as_dict()) == {0, 1}


def test_decompose_basis_state():
    d = ss.decompose(SparseState.basis(1), 0)
    assert d.lambda0 == 1 and d.lambda1 == 0 and d.phi1 is None
    assert d.phi0 == SparseState.basis(0)


def test_decompose_three_way_superposition():
    t = 1 / math.sqrt(3)
    d = ss.decompose(SparseState.from_dict(2, {0: t, 1: t, 2: t}), 0)
    p0, p1 = d.probabilities
    assert p0 == pytest.approx(2 / 3, abs=1e-15) and p1 == pytest.approx(1 / 3, abs=1e-15)
    assert close(d.phi0, SparseState.from_dict(1, {0: R, 1: R}))
    assert close(d.phi1, SparseState.basis(1))


def test_decompose_phase_convention():
    s = SparseState.from_dict(1, {0: 0.6j, 1: -0.8})
    d = ss.decompose(s, 0)
    assert d.lambda0 == pytest.approx(0.6j) and d.lambda1 == pytest.approx(-0.8)
    assert d.phi0.amps[0][1] == pytest.approx(1)


@settings(max_examples=1000, deadline=None)
@given(sparse_states(max_qubits=8, max_size=256), st.data())
def test_decompose_then_insert_reconstructs(state, data):
    pos = data.draw(st.integers(0, state.n_qubits - 1))
    d = ss.decompose(state, pos)
    terms = [(lam, ss.tensor_insert(phi, k, pos))
             for k, (lam, phi) in enumerate(((d.lambda0, d.phi0), (d.lambda1, d.phi1))) if phi is not None]
    back = ss.combine(terms)
    err = np.max(np.abs(back.to_dense() - state.to_dense()))
    assert err <= 1e-12
    assert sum(d.probabilities) == pytest.approx(1, abs=1e-12)


def test_insert_bit_examples():
    assert ss.tensor_insert(SparseState.basis(0), 1, 0).as_dict() == {1: 1}
    assert ss.tensor_insert(SparseState.basis(2, 3), 0, 2).as_dict() == {3: 1}
    assert ss.tensor_insert(SparseState.basis(2, 3), 0, 2).n_qubits == 3


def test_merge_examples():
    q, s = ss.merge_groups(SparseState.basis(1, 0), (0,), SparseState.basis(1, 1), (1,))
    assert q == (0, 1) and s.as_dict() == {2: 1}
    plus = SparseState.from_dict(1, {0: R, 1: R})
    _, s = ss.merge_groups(plus, (3,), plus, (1,))
    assert s.size == 4 and np.allclose(s.to_dense(), 0.5)


@settings(max_examples=200, deadline=None)
@given(sparse_states(max_qubits=3, max_size=8), sparse_states(max_qubits=3, max_size=8), st.data())
def test_merge_is_tensor_product(a, b, data):
    qs = data.draw(st.permutations(range(a.n_qubits + b.n_qubits)))
    qa, qb = tuple(qs[:a.n_qubits]), tuple(qs[a.n_qubits:])
    merged, s = ss.merge_groups(a, qa, b, qb)
    assert s.size == a.size * b.size
    # kron puts b on the low positions; then permute into ascending qubit order
    joint = np.kron(a.to_dense(), b.to_dense())
    order = (*qb, *qa)
    expect = np.zeros_like(joint)
    for idx, amp in enumerate(joint):
        target = sum(((idx >> k) & 1) << merged.index(q) for k, q in enumerate(order))
        expect[target] = amp
    assert np.allclose(s.to_dense(), expect)


def test_deterministic_value_and_factor_out():
    _, s = ss.merge_groups(SparseState.basis(1, 1), (0,), SparseState.from_dict(1, {0: R, 1: R}), (1,))
    assert ss.deterministic_value(s, 0) == 1
    assert ss.deterministic_value(s, 1) is None
    assert close(ss.factor_out(s, 0), SparseState.from_dict(1, {0: R, 1: R}))
    with pytest.raises(StateError):
        ss.factor_out(s, 1)


def test_fidelity_ignores_global_phase():
    rng = np.random.default_rng(3)
    s = random_state(3, 5, rng)
    t = SparseState(3, tuple((b, 1j * a) for b, a in s.amps))
    assert ss.fidelity(s, t) == pytest.approx(1)


@settings(max_examples=200, deadline=None)
@given(sparse_states(max_qubits=6))
def test_size_never_exceeds_dimension(state):
    assert state.size <= 1 << state.n_qubits
    assert abs(state.norm() - 1) <= 1e-9
