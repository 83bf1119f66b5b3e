"""Exhaustive guard enumeration for the soundness checks.

Conditions are built bottom-up from atoms with Not/And/Or/Xor.  Folding is
local: the result at a node depends on its children only through their
simplified forms, and the fold rules only ask whether a child is a
constant.  Two conditions therefore combine identically whenever they agree
on (concrete truth table, truth table of the simplified form, constant value
of the simplified form), so keeping one representative per such class covers
every condition of the given atom count.  Each representative's simplified
form is produced by the real ``simplify`` call on the full tree, and truth
tables come from an evaluator that shares no code with the package.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from itertools import product

from dyncirc.ir import And, Bit, Condition, Const, Not, Or, Prob, Xor


@dataclass(frozen=True)
class Rows:
    """Concretizations as parallel 0/1 columns, one bit per row of an int mask."""

    count: int
    bit_masks: dict[int, int]      # bit index -> mask of rows where it is 1
    prob_masks: dict[int, int]     # control index -> mask of rows where it is 1

    @property
    def full(self) -> int:
        return (1 << self.count) - 1


def mask_eval(cond: Condition, rows: Rows) -> int:
    if isinstance(cond, Const):
        return rows.full if cond.value else 0
    if isinstance(cond, Bit):
        return rows.bit_masks[cond.index]
    if isinstance(cond, Prob):
        return rows.prob_masks[cond.index]
    if isinstance(cond, Not):
        return rows.full & ~mask_eval(cond.child, rows)
    a, b = mask_eval(cond.left, rows), mask_eval(cond.right, rows)
    if isinstance(cond, And):
        return a & b
    if isinstance(cond, Or):
        return a | b
    return a ^ b


@dataclass
class Report:
    classes: int = 0
    combinations: int = 0
    counterexamples: list = None

    def __post_init__(self):
        if self.counterexamples is None:
            self.counterexamples = []


def enumerate_classes(atoms: Sequence[Condition], rows: Rows, simplify: Callable[[Condition], Condition],
                      max_atoms: int, report: Report) -> None:
    """Close ``atoms`` under the grammar up to ``max_atoms`` leaves, checking soundness."""
    seen: set = set()
    by_size: dict[int, list[Condition]] = {k: [] for k in range(1, max_atoms + 1)}

    def key(cond: Condition):
        simp = simplify(cond)
        const = simp.value if isinstance(simp, Const) else None
        return mask_eval(cond, rows), mask_eval(simp, rows), const, simp

    def admit(cond: Condition, size: int) -> bool:
        report.combinations += 1
        orig, simp_tt, const, simp = key(cond)
        if orig != simp_tt:
            report.counterexamples.append((cond, simp))
        k = (orig, simp_tt, const)
        if k in seen:
            return False
        seen.add(k)
        by_size[size].append(cond)
        report.classes += 1
        return True

    def close_not(size: int, start: int) -> None:
        i = start
        while i < len(by_size[size]):
            admit(Not(by_size[size][i]), size)
            i += 1

    for a in atoms:
        admit(a, 1)
    close_not(1, 0)
    for size in range(2, max_atoms + 1):
        for left_size in range(1, size):
            for a, b in product(by_size[left_size], by_size[size - left_size]):
                for op in (And, Or, Xor):
                    admit(op(a, b), size)
        close_not(size, 0)
