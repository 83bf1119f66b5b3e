"""Seeded random dynamic circuits and the removal-metric sweep.

Each layer is a random unitary layer followed by injected dynamic
instructions: mid-circuit measurements (optionally followed by a reset of the
measured qubit) and classically controlled operations whose guards use one
of the three surface patterns over bits written earlier.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .gates import ARITY, PARAM_COUNT, GateKind
from .ir import (
    And,
    Bit,
    BitEquals,
    Circuit,
    Condition,
    Dialect,
    IfElse,
    Instruction,
    Measure,
    Not,
    Or,
    RegisterEquals,
    Reset,
    Unitary,
    Xor,
    normalize_condition,
)
from .phase1 import run_phase1
from .qcp import DEFAULT_GROUP_THRESHOLD, DEFAULT_STATE_THRESHOLD

SCHEMA_VERSION = 1

_BY_ARITY = {k: [g for g in GateKind if ARITY[g] == k] for k in (1, 2, 3)}


@dataclass(frozen=True)
class GeneratorConfig:
    """Injection rates and layer shape; every field can be set from a key=value file."""

    layer_gates: int | None = 1      # gates per layer; None fills every qubit slot
    gate_fill: float = 1.0           # chance a filled slot receives a gate
    arity_weights: tuple[float, float, float] = (0.5, 0.35, 0.15)
    measure_rate: float = 0.08       # per qubit per layer
    reset_after_measure: float = 0.5
    ccop_rate: float = 0.06          # per qubit per layer
    else_rate: float = 0.3
    fresh_bit_rate: float = 0.5      # measurement targets an unwritten bit when one exists
    initial_bit_rate: float = 0.05   # guard atom may read a never-written (zero) bit
    max_branch_gates: int = 2
    n_bits: int | None = None        # defaults to the width

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> GeneratorConfig:
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown generator setting {key!r}")
            if key == "arity_weights":
                parts = tuple(float(x) for x in raw.replace(",", " ").split())
                if len(parts) != 3:
                    raise ValueError("arity_weights needs three numbers")
                kwargs[key] = parts
            elif key in ("max_branch_gates", "n_bits", "layer_gates"):
                kwargs[key] = None if raw.strip().lower() in ("", "none") else int(raw)
            else:
                kwargs[key] = float(raw)
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> GeneratorConfig:
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(repr(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def silent(self) -> GeneratorConfig:
        """Same layer shape with every dynamic injection switched off."""
        return GeneratorConfig(**{**asdict(self), "measure_rate": 0.0, "ccop_rate": 0.0,
                                  "reset_after_measure": 0.0})


def _random_gate(rng: np.random.Generator, qubits: Sequence[int]) -> Unitary:
    kind = _BY_ARITY[len(qubits)][rng.integers(len(_BY_ARITY[len(qubits)]))]
    params = tuple(float(rng.uniform(0, 2 * math.pi)) for _ in range(PARAM_COUNT[kind]))
    return Unitary(kind, tuple(int(q) for q in qubits), params)


def _unitary_layer(rng: np.random.Generator, width: int, cfg: GeneratorConfig) -> list[Unitary]:
    weights = np.asarray(cfg.arity_weights, dtype=float)
    if cfg.layer_gates is not None:
        out = []
        for _ in range(cfg.layer_gates):
            w = weights[:min(3, width)]
            arity = int(rng.choice(len(w), p=w / w.sum())) + 1
            out.append(_random_gate(rng, rng.choice(width, size=arity, replace=False)))
        return out
    order = rng.permutation(width)
    out = []
    i = 0
    while i < width:
        left = width - i
        w = weights[:min(3, left)]
        arity = int(rng.choice(len(w), p=w / w.sum())) + 1
        chunk = order[i:i + arity]
        i += arity
        if rng.random() < cfg.gate_fill:
            out.append(_random_gate(rng, chunk))
    return out


def _random_predicate(rng: np.random.Generator, atoms: Sequence[int], size: int) -> Condition:
    if size == 1:
        node: Condition = Bit(int(atoms[rng.integers(len(atoms))]))
        return Not(node) if rng.random() < 0.3 else node
    left = int(rng.integers(1, size))
    a = _random_predicate(rng, atoms, left)
    b = _random_predicate(rng, atoms, size - left)
    op = (And, Or, Xor)[rng.integers(3)]
    node = op(a, b)
    return Not(node) if rng.random() < 0.1 else node


def _guard(rng: np.random.Generator, written: list[int], n_bits: int, cfg: GeneratorConfig) -> Condition:
    def pick_bit() -> int:
        unwritten = [b for b in range(n_bits) if b not in written]
        if unwritten and rng.random() < cfg.initial_bit_rate:
            return int(unwritten[rng.integers(len(unwritten))])
        return int(written[rng.integers(len(written))])

    pattern = rng.integers(3)
    if pattern == 0:
        raw = BitEquals(pick_bit(), int(rng.integers(2)))
    elif pattern == 1:
        value = 0
        for b in written:
            value |= int(rng.integers(2)) << b
        raw = RegisterEquals(value)
    else:
        size = int(rng.integers(1, 4))
        raw = _random_predicate(rng, [pick_bit() for _ in range(size)], size)
    return normalize_condition(raw, n_bits)


def _branch(rng: np.random.Generator, width: int, cfg: GeneratorConfig) -> tuple[Unitary, ...]:
    count = int(rng.integers(1, cfg.max_branch_gates + 1))
    body = []
    for _ in range(count):
        arity = 2 if width >= 2 and rng.random() < 0.3 else 1
        body.append(_random_gate(rng, rng.choice(width, size=arity, replace=False)))
    return tuple(body)


def generate(width: int, depth: int, seed: int, config: GeneratorConfig | None = None) -> Circuit:
    """Random dynamic circuit; a pure function of its arguments."""
    if width < 2:
        raise ValueError("width must be at least 2")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cfg = config or GeneratorConfig()
    n_bits = cfg.n_bits if cfg.n_bits is not None else width
    rng = np.random.Generator(np.random.PCG64(seed))
    insts: list[Instruction] = []
    written: list[int] = []

    for _ in range(depth):
        insts.extend(_unitary_layer(rng, width, cfg))
        for q in range(width):
            if n_bits and rng.random() < cfg.measure_rate:
                unwritten = [b for b in range(n_bits) if b not in written]
                if unwritten and (not written or rng.random() < cfg.fresh_bit_rate):
                    bit = unwritten[0]
                else:
                    bit = int(written[rng.integers(len(written))])
                insts.append(Measure(q, bit))
                if bit not in written:
                    written.append(bit)
                if rng.random() < cfg.reset_after_measure:
                    insts.append(Reset(q))
        if written:
            for _ in range(int(rng.binomial(width, cfg.ccop_rate))):
                cond = _guard(rng, written, n_bits, cfg)
                then_body = _branch(rng, width, cfg)
                else_body = _branch(rng, width, cfg) if rng.random() < cfg.else_rate else ()
                insts.append(IfElse(cond, then_body, else_body))
    return Circuit(width, n_bits, tuple(insts), Dialect.DYNAMIC)


# ---------------------------------------------------------------------------
# Sweep

ROW_FIELDS = ("width", "depth", "seed", "total_ccop", "removed_ccop", "kept_ccop",
              "total_measure", "kept_measure", "removed_measure",
              "total_reset", "kept_reset", "removed_reset", "pbind", "pgate")
POINT_FIELDS = ("width", "depth", "seeds", "mean_total_ccop", "mean_removed_ccop",
                "mean_kept_ccop", "removal_fraction", "mean_removed_measure", "mean_removed_reset")


@dataclass(frozen=True)
class RunSpec:
    width: int
    depth: int
    seed: int
    config: GeneratorConfig
    group_threshold: int
    state_threshold: int


def run_one(spec: RunSpec) -> dict:
    circuit = generate(spec.width, spec.depth, spec.seed, spec.config)
    _, report = run_phase1(circuit, spec.group_threshold, spec.state_threshold)
    return {"width": spec.width, "depth": spec.depth, "seed": spec.seed, **report.summary()}


def sweep(widths: Iterable[int], depths: Iterable[int], seeds_per_point: int, *,
          base_seed: int = 0, config: GeneratorConfig | None = None,
          group_threshold: int = DEFAULT_GROUP_THRESHOLD,
          state_threshold: int = DEFAULT_STATE_THRESHOLD, jobs: int = 1) -> list[dict]:
    """Phase I metrics for every (width, depth, seed); rows in canonical order.

    Seed ``base_seed + k`` is used for the ``k``-th circuit of every point.
    """
    cfg = config or GeneratorConfig()
    specs = [RunSpec(w, d, base_seed + k, cfg, group_threshold, state_threshold)
             for w in widths for d in depths for k in range(seeds_per_point)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_one, specs, chunksize=4))
    else:
        rows = [run_one(s) for s in specs]
    return rows


def aggregate(rows: Sequence[dict]) -> list[dict]:
    """Per-point means; the removal fraction is mean removed over mean total."""
    points: dict[tuple[int, int], list[dict]] = {}
    for r in rows:
        points.setdefault((r["width"], r["depth"]), []).append(r)
    out = []
    for (w, d), rs in points.items():
        k = len(rs)
        total = sum(r["total_ccop"] for r in rs) / k
        removed = sum(r["removed_ccop"] for r in rs) / k
        out.append({
            "width": w, "depth": d, "seeds": k,
            "mean_total_ccop": total,
            "mean_removed_ccop": removed,
            "mean_kept_ccop": sum(r["kept_ccop"] for r in rs) / k,
            "removal_fraction": removed / total if total else 0.0,
            "mean_removed_measure": sum(r["removed_measure"] for r in rs) / k,
            "mean_removed_reset": sum(r["removed_reset"] for r in rs) / k,
        })
    return out


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def to_json(rows: Sequence[dict], points: Sequence[dict], meta: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **meta, "points": list(points),
                       "runs": list(rows)}, indent=2, sort_keys=True) + "\n"
