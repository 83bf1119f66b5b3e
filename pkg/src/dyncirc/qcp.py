"""Quantum constant propagation: bounded tracking of entanglement groups.

The register is partitioned into groups.  A group is either tracked with an
exact ``SparseState`` or is ``None`` (top, nothing known).  Top groups are
always singletons.  A group stops being tracked when it would exceed
``group_threshold`` qubits or ``state_threshold`` nonzero amplitudes.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

from . import sparse_state as ss
from .gates import gate_matrix
from .ir import Unitary
from .sparse_state import SparseState

DEFAULT_GROUP_THRESHOLD = 8
DEFAULT_STATE_THRESHOLD = 64


class QubitStatus(str, Enum):
    KET0 = "KET0"
    KET1 = "KET1"
    SUPERPOSITION = "SUPERPOSITION"
    TOP = "TOP"


@dataclass(frozen=True)
class Group:
    qubits: tuple[int, ...]  # ascending
    state: SparseState | None

    @property
    def is_top(self) -> bool:
        return self.state is None


_ZERO = SparseState.basis(1)


class QuantumState:
    """Abstract quantum state; every update returns a new object."""

    __slots__ = ("n_qubits", "group_threshold", "state_threshold", "_owner", "_groups")

    def __init__(self, n_qubits: int, group_threshold: int, state_threshold: int,
                 owner: list[int], groups: dict[int, Group]):
        self.n_qubits = n_qubits
        self.group_threshold = group_threshold
        self.state_threshold = state_threshold
        self._owner = owner      # qubit -> group key (smallest qubit of its group)
        self._groups = groups

    @classmethod
    def initial(cls, n_qubits: int, group_threshold: int = DEFAULT_GROUP_THRESHOLD,
                state_threshold: int = DEFAULT_STATE_THRESHOLD) -> QuantumState:
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        if group_threshold < 1 or state_threshold < 1:
            raise ValueError("thresholds must be positive")
        return cls(n_qubits, group_threshold, state_threshold, list(range(n_qubits)),
                   {q: Group((q,), _ZERO) for q in range(n_qubits)})

    def _copy(self) -> QuantumState:
        return QuantumState(self.n_qubits, self.group_threshold, self.state_threshold,
                            list(self._owner), dict(self._groups))

    def _set(self, group: Group) -> None:
        key = group.qubits[0]
        for q in group.qubits:
            old = self._owner[q]
            if old in self._groups and old != key:
                del self._groups[old]
            self._owner[q] = key
        self._groups[key] = group

    def _make_top(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            self._groups.pop(self._owner[q], None)
        for q in qubits:
            self._owner[q] = q
            self._groups[q] = Group((q,), None)

    # -- queries -----------------------------------------------------------

    def group(self, q: int) -> Group:
        return self._groups[self._owner[q]]

    def group_of(self, q: int) -> tuple[tuple[int, ...], SparseState | None]:
        g = self.group(q)
        return g.qubits, g.state

    def groups(self) -> list[Group]:
        return [self._groups[k] for k in sorted(self._groups)]

    def status(self, q: int) -> QubitStatus:
        g = self.group(q)
        if g.state is None:
            return QubitStatus.TOP
        value = ss.deterministic_value(g.state, g.qubits.index(q))
        if value == 0:
            return QubitStatus.KET0
        if value == 1:
            return QubitStatus.KET1
        return QubitStatus.SUPERPOSITION

    def is_top(self, q: int) -> bool:
        return self.group(q).state is None

    # -- updates -----------------------------------------------------------

    def update_unitary(self, inst: Unitary) -> QuantumState:
        out = self._copy()
        keys = []
        for q in inst.qubits:
            k = self._owner[q]
            if k not in keys:
                keys.append(k)
        groups = [self._groups[k] for k in keys]
        members = [q for g in groups for q in g.qubits]

        if any(g.is_top for g in groups) or len(members) > self.group_threshold:
            out._make_top(members)
            return out
        qubits, state = groups[0].qubits, groups[0].state
        for g in groups[1:]:
            if state.size * g.state.size > self.state_threshold:
                out._make_top(members)
                return out
            qubits, state = ss.merge_groups(state, qubits, g.state, g.qubits)
        positions = [qubits.index(q) for q in inst.qubits]
        state = ss.apply_matrix(state, gate_matrix(inst.kind, inst.params), positions)
        if state.size > self.state_threshold:
            out._make_top(members)
            return out
        out._set(Group(qubits, state))
        return out

    def update_many(self, body: Iterable[Unitary]) -> QuantumState:
        out = self
        for u in body:
            out = out.update_unitary(u)
        return out

    def set_top(self, qubits: Iterable[int]) -> QuantumState:
        """Forget everything about the whole groups containing ``qubits``."""
        out = self._copy()
        members = []
        for q in qubits:
            for m in self.group(q).qubits:
                if m not in members:
                    members.append(m)
        out._make_top(members)
        return out

    def reinit(self, q: int) -> QuantumState:
        """Detach ``q`` into a fresh |0> singleton.

        The rest of its group keeps its state only if ``q`` factored out
        deterministically; otherwise the rest is forgotten.
        """
        out = self._copy()
        g = self.group(q)
        rest = tuple(m for m in g.qubits if m != q)
        if rest:
            pos = g.qubits.index(q)
            if g.state is not None and ss.deterministic_value(g.state, pos) is not None:
                out._groups.pop(self._owner[q])
                out._set(Group(rest, ss.factor_out(g.state, pos)))
            else:
                out._make_top(g.qubits)
        out._owner[q] = q
        out._groups[q] = Group((q,), _ZERO)
        return out

    def describe(self) -> list[dict]:
        return [{"qubits": list(g.qubits), "tracked": g.state is not None,
                 "size": g.state.size if g.state is not None else None}
                for g in self.groups()]
