"""Command-line entry point: optimize, instantiate, verify, gen, sweep.

Exit codes: 0 success, 1 usage, 2 parse/validate failure, 3 verification
failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .benchgen import POINT_FIELDS, ROW_FIELDS, SCHEMA_VERSION, GeneratorConfig, aggregate, generate, sweep, to_csv
from .frontend import ParseError, parse_dynamic, parse_probabilistic, print_circuit
from .oracle import DEFAULT_MAX_PATHS, MAX_QUBITS, OracleCapExceeded, circuit_density, frobenius, mixture_density
from .phase1 import InvalidCircuit, run_phase1
from .phase2 import MAX_ENUMERATED, TooManyBranches, enumerate_instances, instance_seed, instantiate
from .qcp import DEFAULT_GROUP_THRESHOLD, DEFAULT_STATE_THRESHOLD

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_CAP = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which we reserve for bad input
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | Path, text: str) -> None:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True)
    p.write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _config(path: str | None) -> GeneratorConfig:
    if path is None:
        return GeneratorConfig()
    try:
        return GeneratorConfig.from_text(_read(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------


def cmd_optimize(args) -> int:
    circuit = parse_dynamic(_read(args.input))
    result, report = run_phase1(circuit, args.group_threshold, args.state_threshold)
    text = print_circuit(result)
    payload = {"schema_version": SCHEMA_VERSION, "input": args.input, **report.to_json()}
    if args.out:
        _write(args.out, text)
    if args.report:
        _write(args.report, _dump(payload))
    if args.json:
        sys.stdout.write(_dump(payload))
    elif not args.out:
        sys.stdout.write(text)
    else:
        s = report.summary()
        print(f"classically controlled ops: {s['total_ccop']} total, {s['removed_ccop']} removed; "
              f"measurements removed: {s['removed_measure']}/{s['total_measure']}; "
              f"resets removed: {s['removed_reset']}/{s['total_reset']}")
    return EXIT_OK


def cmd_instantiate(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    circuit = parse_probabilistic(_read(args.input))
    stem = Path(args.input).stem
    out_dir = Path(args.out_dir)
    written = []
    for k in range(args.count):
        seed = instance_seed(args.seed, k)
        inst = instantiate(circuit, seed)
        path = out_dir / f"{stem}_s{args.seed}_i{k}.pdc"
        _write(path, print_circuit(inst))
        written.append({"index": k, "seed": seed, "path": str(path)})
    if args.json:
        sys.stdout.write(_dump({"schema_version": SCHEMA_VERSION, "input": args.input,
                                "seed": args.seed, "count": args.count, "instances": written}))
    else:
        for w in written:
            print(w["path"])
    return EXIT_OK


def cmd_verify(args) -> int:
    circuit = parse_dynamic(_read(args.input))
    result = {"schema_version": SCHEMA_VERSION, "input": args.input, "tol": args.tol,
              "group_threshold": args.group_threshold, "state_threshold": args.state_threshold}

    def finish(code: int, **extra) -> int:
        result.update(extra, exit_code=code)
        if args.json:
            sys.stdout.write(_dump(result))
        elif code == EXIT_CAP:
            print(f"unverifiable at exact scale: {extra['reason']}")
        else:
            verdict = "equivalent" if code == EXIT_OK else "NOT equivalent"
            print(f"{verdict}: distance {extra['distance']:.3e} (tol {args.tol:g}, "
                  f"{extra['instances']} instances)")
        return code

    if circuit.n_qubits > MAX_QUBITS:
        return finish(EXIT_CAP, status="unverifiable",
                      reason=f"{circuit.n_qubits} qubits exceed the exact-simulation cap of {MAX_QUBITS}")
    optimized, _ = run_phase1(circuit, args.group_threshold, args.state_threshold)
    try:
        instances = enumerate_instances(optimized, args.max_branches)
        rho_d = circuit_density(circuit, args.max_paths)
        rho_mix = mixture_density(instances, args.max_paths)
        rho_p = circuit_density(optimized, args.max_paths)
    except (OracleCapExceeded, TooManyBranches) as exc:
        return finish(EXIT_CAP, status="unverifiable", reason=str(exc))
    distance = frobenius(rho_d, rho_mix)
    direct = frobenius(rho_d, rho_p)
    ok = distance <= args.tol and direct <= args.tol
    return finish(EXIT_OK if ok else EXIT_VERIFY, status="equivalent" if ok else "mismatch",
                  distance=distance, probabilistic_distance=direct, instances=len(instances))


def cmd_gen(args) -> int:
    circuit = generate(args.width, args.depth, args.seed, _config(args.config))
    text = print_circuit(circuit)
    if args.out:
        _write(args.out, text)
    if args.json:
        sys.stdout.write(_dump({"schema_version": SCHEMA_VERSION, "width": args.width, "depth": args.depth,
                                "seed": args.seed, "instructions": len(circuit.instructions),
                                "path": args.out, **({} if args.out else {"circuit": text})}))
    elif not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args.config)
    rows = sweep(args.widths, args.depths, args.seeds, base_seed=args.base_seed, config=cfg,
                 group_threshold=args.group_threshold, state_threshold=args.state_threshold,
                 jobs=args.jobs)
    points = aggregate(rows)
    if args.runs:
        _write(args.runs, to_csv(rows, ROW_FIELDS))
    if args.json:
        text = _dump({"schema_version": SCHEMA_VERSION, "group_threshold": args.group_threshold,
                      "state_threshold": args.state_threshold, "base_seed": args.base_seed,
                      "seeds_per_point": args.seeds, "config": cfg.to_text().splitlines(),
                      "points": points, "runs": rows})
    else:
        text = to_csv(points, POINT_FIELDS)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyncirc", description="Compile-time removal of classical feedforward "
                                                "from dynamic quantum circuits.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def thresholds(p):
        p.add_argument("--group-threshold", type=int, default=DEFAULT_GROUP_THRESHOLD,
                       help="largest tracked entanglement group (default %(default)s)")
        p.add_argument("--state-threshold", type=int, default=DEFAULT_STATE_THRESHOLD,
                       help="largest tracked sparse-state size (default %(default)s)")

    def json_flag(p):
        p.add_argument("--json", action="store_true", help="machine-readable output on stdout")

    p = sub.add_parser("optimize", help="rewrite a dynamic circuit into a probabilistic circuit")
    p.add_argument("input")
    p.add_argument("--out", "-o", help="output .pdc file (default: stdout)")
    p.add_argument("--report", help="write the rewrite report as JSON")
    thresholds(p)
    json_flag(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("instantiate", help="sample executable instances of a probabilistic circuit")
    p.add_argument("input")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    json_flag(p)
    p.set_defaults(func=cmd_instantiate)

    p = sub.add_parser("verify", help="check that the rewrite preserves the output ensemble")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-paths", type=int, default=DEFAULT_MAX_PATHS)
    p.add_argument("--max-branches", type=int, default=MAX_ENUMERATED,
                   help="largest number of probabilistic gates to enumerate")
    thresholds(p)
    json_flag(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random dynamic circuit")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", help="key=value generator settings")
    p.add_argument("--out", "-o")
    json_flag(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sweep", help="Phase I removal metrics over a width/depth grid")
    p.add_argument("--widths", type=_int_list, required=True)
    p.add_argument("--depths", type=_int_list, required=True)
    p.add_argument("--seeds", type=int, default=10, help="circuits per point (default %(default)s)")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--config", help="key=value generator settings")
    p.add_argument("--out", "-o", help="per-point means (default: stdout)")
    p.add_argument("--runs", help="also write one CSV row per circuit")
    p.add_argument("--jobs", type=int, default=1)
    thresholds(p)
    json_flag(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "group_threshold", 1) < 1 or getattr(args, "state_threshold", 1) < 1:
            raise UsageError("thresholds must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"dyncirc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidCircuit as exc:
        for v in exc.violations:
            print(f"{args.input}: {v}", file=sys.stderr)
        return EXIT_INPUT
    except (OracleCapExceeded, TooManyBranches) as exc:
        print(f"dyncirc: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        # generator pre-conditions and dialect mismatches
        print(f"dyncirc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
