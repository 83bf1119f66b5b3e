"""Text formats for circuits.

``.dc`` files hold dynamic circuits; ``.pdc`` files additionally allow
``rot``, ``pgate``, ``pbind`` and ``$k`` control atoms.  Executable instances
use the ``.pdc`` syntax without ``pgate``/``pbind``/``$k``.

Example::

    qreg q[2]
    creg c[1]
    h q[0]
    measure q[0] -> c[0]
    if (c[0] ^ !c[0]) { x q[1] } else { z q[1] }

Guard operators bind ``!`` tightest, then ``&``, ``^`` and ``|``; all binary
operators are left-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .gates import ARITY, PARAM_COUNT, GateKind
from .ir import (
    FALSE,
    TRUE,
    And,
    Bit,
    BitEquals,
    Circuit,
    Condition,
    Const,
    Dialect,
    Direction,
    IfElse,
    Instruction,
    Lead,
    Measure,
    Not,
    Or,
    PBind,
    PGate,
    PGateBranch,
    Prob,
    RegisterEquals,
    Reset,
    Rotation,
    Unitary,
    Xor,
    normalize_condition,
)
from .sparse_state import SparseState, StateError


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, NL, EOF or the punctuation itself
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<punct>->|==|[\[\](){},;:=!&^|$])
  | (?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf|nan)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        if kind == "nl":
            tokens.append(Token("NL", "\n", span))
            line, line_start = line + 1, m.end()
        elif kind == "punct":
            tokens.append(Token(m.group(), m.group(), span))
        elif kind == "num":
            tokens.append(Token("NUM", m.group(), span))
        elif kind == "name":
            tokens.append(Token("NAME", m.group(), span))
        pos = m.end()
    tokens.append(Token("EOF", "", SourceSpan(line, pos - line_start + 1, pos)))
    return tokens


_PROBABILISTIC_KEYWORDS = {"rot", "pgate", "pbind"}


class _Parser:
    def __init__(self, text: str, dialect: Dialect):
        self.toks = tokenize(text)
        self.i = 0
        self.dialect = dialect
        self.n_qubits = 0
        self.n_bits = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        return ParseError(message, (tok or self.tok).span)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text if t.kind != "EOF" else "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        return self.advance()

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            return self.advance()
        return None

    def skip_newlines(self) -> None:
        while self.tok.kind == "NL":
            self.advance()

    def integer(self) -> int:
        t = self.expect("NUM")
        if not re.fullmatch(r"\d+", t.text):
            raise self.error(f"expected a non-negative integer, got {t.text!r}", t)
        return int(t.text)

    def number(self) -> float:
        t = self.expect("NUM")
        return float(t.text)

    def indexed(self, name: str, limit: int, what: str) -> int:
        start = self.expect("NAME", name)
        self.expect("[")
        idx = self.integer()
        self.expect("]")
        if idx >= limit:
            raise self.error(f"{what} {name}[{idx}] out of range (size {limit})", start)
        return idx

    def qubit(self) -> int:
        return self.indexed("q", self.n_qubits, "qubit")

    def operands(self) -> tuple[int, ...]:
        ops = [self.qubit()]
        while self.accept(","):
            ops.append(self.qubit())
        if len(set(ops)) != len(ops):
            raise self.error(f"repeated operand in {ops}")
        return tuple(ops)

    # -- file structure ----------------------------------------------------

    def parse(self) -> Circuit:
        self.skip_newlines()
        self.expect("NAME", "qreg")
        self.expect("NAME", "q")
        self.expect("[")
        self.n_qubits = self.integer()
        self.expect("]")
        self.end_statement()
        self.expect("NAME", "creg")
        self.expect("NAME", "c")
        self.expect("[")
        self.n_bits = self.integer()
        self.expect("]")
        self.end_statement()
        if self.n_qubits < 1:
            raise self.error("need at least one qubit", self.toks[0])

        insts: list[Instruction] = []
        while True:
            while self.accept("NL") or self.accept(";"):
                pass
            if self.tok.kind == "EOF":
                break
            insts.append(self.instruction())
            self.end_statement()
        return Circuit(self.n_qubits, self.n_bits, tuple(insts), self.dialect)

    def end_statement(self) -> None:
        if self.tok.kind in ("NL", ";", "EOF"):
            if self.tok.kind != "EOF":
                self.advance()
            return
        raise self.error(f"expected end of statement, got {self.tok.text!r}")

    def instruction(self) -> Instruction:
        t = self.tok
        if t.kind != "NAME":
            raise self.error(f"expected an instruction, got {t.text!r}")
        word = t.text
        if word in _PROBABILISTIC_KEYWORDS and self.dialect is Dialect.DYNAMIC:
            raise self.error(f"'{word}' is not allowed in the dynamic dialect")
        if word in ("pgate", "pbind") and self.dialect is Dialect.INSTANCE:
            raise self.error(f"'{word}' is not allowed in an executable instance")
        if word == "measure":
            self.advance()
            q = self.qubit()
            self.expect("->")
            c = self.indexed("c", self.n_bits, "bit")
            return Measure(q, c)
        if word == "reset":
            self.advance()
            return Reset(self.qubit())
        if word == "if":
            return self.ifelse()
        if word == "rot":
            return self.rotation()
        if word == "pgate":
            self.advance()
            qs = self.operands()
            self.expect(":")
            return PGate(qs, self.branches(qs))
        if word == "pbind":
            self.advance()
            qs = self.operands()
            self.expect("->")
            dollar = self.expect("$")
            ctl = self.integer()
            if ctl >= self.n_bits:
                raise self.error(f"control ${ctl} out of range (size {self.n_bits})", dollar)
            self.expect(":")
            return PBind(qs, self.branches(qs), ctl)
        return self.gate()

    def gate(self) -> Unitary:
        t = self.expect("NAME")
        try:
            kind = GateKind(t.text)
        except ValueError:
            raise self.error(f"unknown gate or instruction {t.text!r}", t) from None
        params: tuple[float, ...] = ()
        if self.accept("("):
            params = (self.number(),)
            self.expect(")")
        if len(params) != PARAM_COUNT[kind]:
            raise self.error(f"{kind.value} takes {PARAM_COUNT[kind]} parameter(s)", t)
        qs = self.operands()
        if len(qs) != ARITY[kind]:
            raise self.error(f"{kind.value} takes {ARITY[kind]} operand(s), got {len(qs)}", t)
        return Unitary(kind, qs, params)

    def block(self) -> tuple[Unitary, ...]:
        self.expect("{")
        body: list[Unitary] = []
        while True:
            while self.accept("NL") or self.accept(";"):
                pass
            if self.accept("}"):
                return tuple(body)
            if self.tok.kind == "NAME" and self.tok.text in ("measure", "reset", "if", *_PROBABILISTIC_KEYWORDS):
                raise self.error(f"'{self.tok.text}' inside a branch; branches hold unitary gates only")
            body.append(self.gate())
            if self.tok.kind not in ("NL", ";", "}"):
                raise self.error(f"expected ';' or '}}', got {self.tok.text!r}")

    def ifelse(self) -> IfElse:
        self.expect("NAME", "if")
        self.expect("(")
        cond = self.guard()
        self.expect(")")
        then_body = self.block()
        else_body: tuple[Unitary, ...] = ()
        if self.accept("NAME", "else"):
            else_body = self.block()
        return IfElse(cond, then_body, else_body)

    # -- guards ------------------------------------------------------------

    def guard(self) -> Condition:
        start = self.tok
        toks = self.toks[self.i:self.i + 6]
        kinds = [t.text for t in toks]
        try:
            if kinds[:2] == ["c", "=="]:
                self.advance()
                self.advance()
                return normalize_condition(RegisterEquals(self.integer()), self.n_bits)
            if kinds[:2] == ["c", "["] and len(kinds) >= 5 and kinds[4] == "==":
                bit = self.indexed("c", self.n_bits, "bit")
                self.expect("==")
                vt = self.tok
                value = self.integer()
                if value not in (0, 1):
                    raise self.error("single-bit comparison must be against 0 or 1", vt)
                return normalize_condition(BitEquals(bit, value), self.n_bits)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise self.error(str(exc), start) from None
        return self.cond_or()

    def cond_or(self) -> Condition:
        node = self.cond_xor()
        while self.accept("|"):
            node = Or(node, self.cond_xor())
        return node

    def cond_xor(self) -> Condition:
        node = self.cond_and()
        while self.accept("^"):
            node = Xor(node, self.cond_and())
        return node

    def cond_and(self) -> Condition:
        node = self.cond_not()
        while self.accept("&"):
            node = And(node, self.cond_not())
        return node

    def cond_not(self) -> Condition:
        if self.accept("!"):
            return Not(self.cond_not())
        return self.cond_atom()

    def cond_atom(self) -> Condition:
        if self.accept("("):
            node = self.cond_or()
            self.expect(")")
            return node
        t = self.tok
        if self.accept("$"):
            if self.dialect is not Dialect.PROBABILISTIC:
                raise self.error(f"probabilistic control in the {self.dialect.value} dialect", t)
            idx = self.integer()
            if idx >= self.n_bits:
                raise self.error(f"control ${idx} out of range (size {self.n_bits})", t)
            return Prob(idx)
        if t.kind == "NAME" and t.text == "c":
            return Bit(self.indexed("c", self.n_bits, "bit"))
        if self.accept("NAME", "true"):
            return TRUE
        if self.accept("NAME", "false"):
            return FALSE
        raise self.error(f"expected a guard atom, got {t.text!r}")

    # -- probabilistic constructs -----------------------------------------

    def state(self, width: int) -> SparseState:
        start = self.expect("{")
        amps: dict[int, complex] = {}
        while True:
            self.skip_newlines()
            idx_tok = self.tok
            idx = self.integer()
            if idx in amps:
                raise self.error(f"duplicate basis index {idx}", idx_tok)
            self.expect(":")
            self.expect("(")
            re_ = self.number()
            self.expect(",")
            im = self.number()
            self.expect(")")
            amps[idx] = complex(re_, im)
            self.skip_newlines()
            if self.accept("}"):
                break
            self.expect(",")
        try:
            return SparseState.from_dict(width, amps)
        except StateError as exc:
            raise self.error(str(exc), start) from None

    def rotation(self) -> Rotation:
        self.expect("NAME", "rot")
        qs = self.operands()
        key = self.expect("NAME")
        if key.text == "from":
            direction = Direction.TO_ZERO
        elif key.text == "to":
            direction = Direction.FROM_ZERO
        else:
            raise self.error("expected 'from=' or 'to='", key)
        self.expect("=")
        return Rotation(qs, direction, self.state(len(qs)))

    def branches(self, qs: tuple[int, ...]) -> tuple[PGateBranch, PGateBranch]:
        out = []
        for _ in range(2):
            self.skip_newlines()
            self.expect("NAME", "branch")
            p = self.number()
            self.expect("NAME", "lead")
            self.expect("=")
            lt = self.expect("NAME")
            if lt.text not in ("I", "X"):
                raise self.error("lead must be I or X", lt)
            self.expect("NAME", "prep")
            self.expect("=")
            out.append(PGateBranch(Lead(lt.text), self.state(len(qs) - 1), p))
        return out[0], out[1]


def parse_circuit(text: str, dialect: Dialect) -> Circuit:
    """Parse ``text`` in the given dialect; raises ``ParseError`` on bad input."""
    return _Parser(text, dialect).parse()


def parse_dynamic(text: str) -> Circuit:
    return parse_circuit(text, Dialect.DYNAMIC)


def parse_probabilistic(text: str) -> Circuit:
    return parse_circuit(text, Dialect.PROBABILISTIC)


def parse_instance(text: str) -> Circuit:
    return parse_circuit(text, Dialect.INSTANCE)


# ---------------------------------------------------------------------------
# Printing


def format_float(x: float) -> str:
    return "%.17g" % x


def format_complex(z: complex) -> str:
    return f"({format_float(z.real)},{format_float(z.imag)})"


def format_state(state: SparseState) -> str:
    return "{" + ", ".join(f"{b}: {format_complex(a)}" for b, a in state.amps) + "}"


_PREC = {Or: 1, Xor: 2, And: 3, Not: 4}
_SYMBOL = {Or: "|", Xor: "^", And: "&"}


def format_condition(cond: Condition) -> str:
    if isinstance(cond, Bit):
        return f"c[{cond.index}]"
    if isinstance(cond, Prob):
        return f"${cond.index}"
    if isinstance(cond, Const):
        return "true" if cond.value else "false"
    prec = _PREC[type(cond)]
    if isinstance(cond, Not):
        inner = format_condition(cond.child)
        if _PREC.get(type(cond.child), 5) < prec:
            inner = f"({inner})"
        return f"!{inner}"
    left = format_condition(cond.left)
    right = format_condition(cond.right)
    if _PREC.get(type(cond.left), 5) < prec:
        left = f"({left})"
    if _PREC.get(type(cond.right), 5) <= prec:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(cond)]} {right}"


def _operands(qs: tuple[int, ...]) -> str:
    return ", ".join(f"q[{q}]" for q in qs)


def format_gate(u: Unitary) -> str:
    head = u.kind.value
    if u.params:
        head += "(" + ", ".join(format_float(p) for p in u.params) + ")"
    return f"{head} {_operands(u.qubits)}"


def _block(body: tuple[Unitary, ...]) -> str:
    if not body:
        return "{ }"
    return "{ " + "; ".join(format_gate(u) for u in body) + " }"


def _branch(br: PGateBranch) -> str:
    return f"branch {format_float(br.prob)} lead={br.lead.value} prep={format_state(br.prep)}"


def format_instruction(inst: Instruction) -> str:
    if isinstance(inst, Unitary):
        return format_gate(inst)
    if isinstance(inst, Measure):
        return f"measure q[{inst.qubit}] -> c[{inst.bit}]"
    if isinstance(inst, Reset):
        return f"reset q[{inst.qubit}]"
    if isinstance(inst, IfElse):
        text = f"if ({format_condition(inst.cond)}) {_block(inst.then_body)}"
        if inst.else_body:
            text += f" else {_block(inst.else_body)}"
        return text
    if isinstance(inst, Rotation):
        key = "from" if inst.direction is Direction.TO_ZERO else "to"
        return f"rot {_operands(inst.qubits)} {key}={format_state(inst.state)}"
    if isinstance(inst, PGate):
        return f"pgate {_operands(inst.qubits)} : " + " ".join(_branch(b) for b in inst.branches)
    if isinstance(inst, PBind):
        return (f"pbind {_operands(inst.qubits)} -> ${inst.control} : "
                + " ".join(_branch(b) for b in inst.branches))
    raise TypeError(f"cannot print {type(inst).__name__}")


def print_circuit(circuit: Circuit) -> str:
    lines = [f"qreg q[{circuit.n_qubits}]", f"creg c[{circuit.n_bits}]"]
    lines.extend(format_instruction(inst) for inst in circuit.instructions)
    return "\n".join(lines) + "\n"
