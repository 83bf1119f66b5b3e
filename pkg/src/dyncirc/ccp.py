"""Classical constant propagation over the bit register."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .qcp import QubitStatus


class Token(str, Enum):
    ZERO = "ZERO"
    ONE = "ONE"
    PROB = "PROB"  # random bit carried by the probabilistic control of the same index
    TOP = "TOP"


@dataclass(frozen=True)
class ClassicalState:
    tokens: tuple[Token, ...]

    @classmethod
    def initial(cls, n_bits: int) -> ClassicalState:
        return cls((Token.ZERO,) * n_bits)

    def __getitem__(self, i: int) -> Token:
        return self.tokens[i]

    def __len__(self) -> int:
        return len(self.tokens)

    def update_measure(self, bit: int, status: QubitStatus) -> ClassicalState:
        """Token for ``bit`` after measuring a qubit whose abstract status is ``status``."""
        if not 0 <= bit < len(self.tokens):
            raise IndexError(f"bit c[{bit}] out of range")
        if status is QubitStatus.KET0:
            tok = Token.ZERO
        elif status is QubitStatus.KET1:
            tok = Token.ONE
        elif status is QubitStatus.TOP:
            tok = Token.TOP
        else:
            tok = Token.PROB
        return ClassicalState(self.tokens[:bit] + (tok,) + self.tokens[bit + 1:])


def initial_classical(n_bits: int) -> ClassicalState:
    return ClassicalState.initial(n_bits)
