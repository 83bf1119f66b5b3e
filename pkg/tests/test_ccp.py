from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncirc.benchgen import generate
from dyncirc.ccp import ClassicalState, Token, initial_classical
from dyncirc.oracle import simulate
from dyncirc.phase1 import run_phase1
from dyncirc.qcp import QubitStatus


def test_initial_states():
    assert len(initial_classical(0)) == 0
    assert initial_classical(5).tokens == (Token.ZERO,) * 5


@pytest.mark.parametrize("status, token", [
    (QubitStatus.KET0, Token.ZERO),
    (QubitStatus.KET1, Token.ONE),
    (QubitStatus.TOP, Token.TOP),
    (QubitStatus.SUPERPOSITION, Token.PROB),
])
def test_measurement_cases(status, token):
    s = initial_classical(3).update_measure(1, status)
    assert s[1] is token
    assert s[0] is Token.ZERO and s[2] is Token.ZERO


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(list(Token)), min_size=1, max_size=8), st.data())
def test_frame_rule(tokens, data):
    s = ClassicalState(tuple(tokens))
    i = data.draw(st.integers(0, len(tokens) - 1))
    status = data.draw(st.sampled_from(list(QubitStatus)))
    t = s.update_measure(i, status)
    assert [k for k in range(len(tokens)) if s[k] is not t[k]] in ([], [i])
    assert all(s[k] is t[k] for k in range(len(tokens)) if k != i)


def test_out_of_range_bit():
    with pytest.raises(IndexError):
        initial_classical(2).update_measure(2, QubitStatus.KET0)


_TOKEN_OF = {"KET0": Token.ZERO, "KET1": Token.ONE, "SUPERPOSITION": Token.PROB, "TOP": Token.TOP}


def test_known_bits_agree_with_every_path():
    # Replay the token stream from the rewrite report and, at each measurement,
    # check every bit still known to be 0/1 against all oracle paths.
    checked = 0
    for seed in range(30):
        d = generate(4, 12, seed)
        _, report = run_phase1(d)
        tokens = [Token.ZERO] * d.n_bits
        for entry in report.entries:
            if entry.kind != "measure":
                continue
            tokens[d.instructions[entry.index].bit] = _TOKEN_OF[entry.detail["status"]]
            ens = simulate(d.with_instructions(d.instructions[:entry.index + 1]), max_paths=1 << 14)
            for i, tok in enumerate(tokens):
                if tok in (Token.ZERO, Token.ONE):
                    expect = 0 if tok is Token.ZERO else 1
                    assert all(p.bits[i] == expect for p in ens.paths), (seed, entry.index, i)
                    checked += 1
    assert checked > 50
