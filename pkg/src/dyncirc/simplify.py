"""Guard simplification against compile-time knowledge.

Folding is local: only constant propagation and the short-circuit identities
are applied, so e.g. ``c[0] ^ c[0]`` is left alone.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from .ccp import ClassicalState, Token
from .ir import BINARY, FALSE, TRUE, And, Bit, Condition, Const, Not, Or, Prob, Xor


class UnboundControl(KeyError):
    pass


def fold_not(e: Condition) -> Condition:
    if isinstance(e, Const):
        return FALSE if e.value else TRUE
    return Not(e)


def fold_and(a: Condition, b: Condition) -> Condition:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return And(a, b)


def fold_or(a: Condition, b: Condition) -> Condition:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    return Or(a, b)


def fold_xor(a: Condition, b: Condition) -> Condition:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value != b.value)
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    if a == TRUE:
        return fold_not(b)
    if b == TRUE:
        return fold_not(a)
    return Xor(a, b)


_FOLD = {And: fold_and, Or: fold_or, Xor: fold_xor}


def _rebuild(cond: Condition, atom) -> Condition:
    if isinstance(cond, (Bit, Prob)):
        return atom(cond)
    if isinstance(cond, Const):
        return cond
    if isinstance(cond, Not):
        return fold_not(_rebuild(cond.child, atom))
    if isinstance(cond, BINARY):
        return _FOLD[type(cond)](_rebuild(cond.left, atom), _rebuild(cond.right, atom))
    raise TypeError(f"not a condition: {cond!r}")


def simplify_abstract(cond: Condition, sigma_c: ClassicalState) -> Condition:
    """Fold a dynamic-dialect guard using the abstract bit tokens.

    ZERO/ONE bits become constants, PROB bits become the probabilistic
    control of the same index and TOP bits stay as runtime bit reads.
    """

    def atom(node):
        if isinstance(node, Prob):
            raise ValueError("probabilistic control in a guard given to simplify_abstract")
        tok = sigma_c[node.index]
        if tok is Token.ZERO:
            return FALSE
        if tok is Token.ONE:
            return TRUE
        if tok is Token.PROB:
            return Prob(node.index)
        return node

    return _rebuild(cond, atom)


def simplify_instance(cond: Condition, assignment: Mapping[int, int]) -> Condition:
    """Substitute sampled control values (0/1) and fold; bit reads are kept."""

    def atom(node):
        if isinstance(node, Bit):
            return node
        try:
            value = assignment[node.index]
        except KeyError:
            raise UnboundControl(f"probabilistic control ${node.index} read before binding") from None
        return TRUE if value else FALSE

    return _rebuild(cond, atom)


def eval_concrete(cond: Condition, bits: Sequence[int],
                  controls: Mapping[int, int] | None = None) -> bool:
    if isinstance(cond, Bit):
        if not 0 <= cond.index < len(bits):
            raise ValueError(f"bit c[{cond.index}] not available")
        return bool(bits[cond.index])
    if isinstance(cond, Prob):
        if controls is None or cond.index not in controls:
            raise UnboundControl(f"probabilistic control ${cond.index} has no value")
        return bool(controls[cond.index])
    if isinstance(cond, Const):
        return cond.value
    if isinstance(cond, Not):
        return not eval_concrete(cond.child, bits, controls)
    a = eval_concrete(cond.left, bits, controls)
    b = eval_concrete(cond.right, bits, controls)
    if isinstance(cond, And):
        return a and b
    if isinstance(cond, Or):
        return a or b
    return a != b
