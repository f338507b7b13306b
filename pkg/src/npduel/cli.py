"""Command-line driver: ``npduel sat {brute,sample,grover,es}`` and ``npduel tsp {cerny,brute}``.

Every run prints exactly one record (JSON by default).  Exit codes:
0 success (unsatisfiable or unsolved results included), 2 input error,
3 resource cap exceeded, 4 internal cross-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from typing import Callable, Optional

import numpy as np

from npduel import __version__
from npduel.cerny_tsp import (
    ENUMERATION_CAP,
    ORACLE_CAP,
    TspInstance,
    brute_force_tsp,
    run_cerny_machine,
    tour_length,
)
from npduel.cnf import EXHAUSTIVE_BOUND, CnfFormula, count_solutions, evaluate, parse_dimacs, solutions
from npduel.errors import CapExceeded, CrossCheckError, InputError
from npduel.es_sat import EsConfig, run_es
from npduel.quantum_sat import (
    apply_uf,
    bitstring,
    flag_probability,
    grover_search,
    prepare_ohya_masuda,
    sample_solutions,
)

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_CROSSCHECK = 0, 2, 3, 4
DEFAULT_SEED = 0
SEED_ENV = "NPDUEL_SEED"
SOLUTION_LISTING_LIMIT = 1024
_RECOMBINATION = {"default": "discrete_object_intermediate_sigma", "none": "none"}


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_cnf(path: str) -> CnfFormula:
    return parse_dimacs(_read(path))


def _bound(args) -> int:
    return EXHAUSTIVE_BOUND if args.cap is None else args.cap


def cmd_sat_brute(args) -> dict:
    f = _load_cnf(args.input)
    bound = _bound(args)
    r = count_solutions(f, bound)
    listed = []
    for a in solutions(f, bound)[:SOLUTION_LISTING_LIMIT]:
        if not evaluate(f, a):
            raise CrossCheckError(f"listed solution {bitstring(a)} does not satisfy the formula")
        listed.append(bitstring(a))
    return {
        "n": f.num_vars,
        "clauses": f.num_clauses,
        "r": r,
        "satisfiable": r > 0,
        "solutions": listed,
        "solutions_truncated": r > len(listed),
    }


def cmd_sat_sample(args) -> dict:
    f = _load_cnf(args.input)
    r = count_solutions(f, _bound(args))
    reg = apply_uf(prepare_ohya_masuda(f))
    p_flag = flag_probability(reg)
    theoretical = r / 2**f.num_vars
    if abs(p_flag - theoretical) > 1e-9:
        raise CrossCheckError(f"flag probability {p_flag} != r/2^n = {theoretical}")
    hits, found = sample_solutions(reg, args.shots, args.rng)
    for a in found:
        if not evaluate(f, a):
            raise CrossCheckError(f"sampled {bitstring(a)} does not satisfy the formula")
    return {
        "n": f.num_vars,
        "r": r,
        "theoretical_rate": theoretical,
        "flag_probability": p_flag,
        "shots": args.shots,
        "flag_one_count": hits,
        "empirical_rate": hits / args.shots,
        "histogram": {bitstring(a): c for a, c in sorted(found.items(), key=lambda kv: bitstring(kv[0]))},
    }


def cmd_sat_grover(args) -> dict:
    f = _load_cnf(args.input)
    result = grover_search(f, args.rng, args.shots)
    out = result.to_dict()
    if "outcome_histogram" in out:
        out["histogram"] = out.pop("outcome_histogram")
    return out


def cmd_sat_es(args) -> dict:
    f = _load_cnf(args.input)
    cfg = EsConfig(
        max_generations=args.max_generations,
        recombination=_RECOMBINATION[args.recombination],
    )
    result = run_es(f, cfg, args.rng)
    if result.solved and not evaluate(f, result.assignment):
        raise CrossCheckError("ES reported an assignment that does not satisfy the formula")
    out = result.to_dict()
    out["seed"] = args.seed
    out["assignment_bits"] = None if result.assignment is None else bitstring(result.assignment)
    return out


def _load_tsp(path: str) -> TspInstance:
    return TspInstance.from_json(_read(path))


def cmd_tsp_cerny(args) -> dict:
    t = _load_tsp(args.input)
    report = run_cerny_machine(t, ENUMERATION_CAP if args.cap is None else args.cap)
    out = report.to_dict()
    if math.factorial(t.m - 1) <= ORACLE_CAP:
        oracle = brute_force_tsp(t)
        agrees = oracle.min_length == report.min_fired
        out["oracle"] = {"checked": True, "min_length": oracle.min_length, "agrees": agrees}
        if not agrees:
            raise CrossCheckError(
                f"machine min_fired={report.min_fired} but brute force gives {oracle.min_length}"
            )
    else:
        out["oracle"] = {"checked": False}
    return out


def cmd_tsp_brute(args) -> dict:
    t = _load_tsp(args.input)
    result = brute_force_tsp(t, ORACLE_CAP if args.cap is None else args.cap)
    if tour_length(t, result.tour[1:]) != result.min_length:
        raise CrossCheckError("optimal tour length does not recompute")
    return {
        "m": t.m,
        "min_length": result.min_length,
        "tour": list(result.tour) + [1],
        "tours": sum(result.lengths.values()),
        "histogram": {str(k): v for k, v in sorted(result.lengths.items())},
    }


COMMANDS: dict[tuple[str, str], Callable] = {
    ("sat", "brute"): cmd_sat_brute,
    ("sat", "sample"): cmd_sat_sample,
    ("sat", "grover"): cmd_sat_grover,
    ("sat", "es"): cmd_sat_es,
    ("tsp", "cerny"): cmd_tsp_cerny,
    ("tsp", "brute"): cmd_tsp_brute,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="DIMACS CNF file (sat) or TSP JSON file (tsp)")
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"RNG seed (u64); falls back to ${SEED_ENV}, then {DEFAULT_SEED}")
    common.add_argument("--shots", type=_positive, default=10_000)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--max-generations", type=_non_negative, default=1000)
    common.add_argument("--recombination", choices=tuple(_RECOMBINATION), default="default")
    common.add_argument("--cap", type=_positive, default=None,
                        help="sat: exhaustive variable bound; tsp cerny: trajectory cap; "
                             "tsp brute: permutation cap")

    parser = argparse.ArgumentParser(prog="npduel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)
    for group in ("sat", "tsp"):
        sub = groups.add_parser(group).add_subparsers(dest="command", required=True)
        for g, name in COMMANDS:
            if g == group:
                sub.add_parser(name, parents=[common])
    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return _seed(env)
        except argparse.ArgumentTypeError as exc:
            raise InputError(f"${SEED_ENV}: {exc}") from None
    return DEFAULT_SEED


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    elif isinstance(value, list):
        rows.append((prefix, " ".join(str(v) for v in value)))
    else:
        rows.append((prefix, value))


def _text_value(value) -> str:
    # keep multi-line strings (the echoed formula) on one line
    return json.dumps(value) if isinstance(value, str) and "\n" in value else str(value)


def render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, sort_keys=True) + "\n"
    result = dict(record["result"])
    histogram = result.pop("histogram", None)
    rows: list = []
    _flatten("", {k: v for k, v in record.items() if k != "result"}, rows)
    _flatten("", result, rows)
    if fmt == "text":
        lines = [f"{k}: {_text_value(v)}" for k, v in rows]
        if histogram:
            lines.append("histogram:")
            lines += [f"  {k}  {v}" for k, v in histogram.items()]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "value"])
    writer.writerows(rows)
    if histogram:
        writer.writerow([])
        writer.writerow(["key", "count"])
        writer.writerows(histogram.items())
    return buf.getvalue()


def run(argv: Optional[list[str]] = None) -> tuple[int, Optional[dict]]:
    """Parse, execute, and return ``(exit_code, record)`` without printing the record."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INPUT), None
    try:
        args.seed = _resolve_seed(args)
        args.rng = np.random.default_rng(args.seed)
        config = {
            "input": args.input,
            "seed": args.seed,
            "shots": args.shots,
            "format": args.format,
            "max_generations": args.max_generations,
            "recombination": args.recombination,
            "cap": args.cap,
        }
        start = time.perf_counter()
        result = COMMANDS[(args.group, args.command)](args)
        duration = time.perf_counter() - start
    except CapExceeded as exc:
        print(f"npduel: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP, None
    except InputError as exc:
        print(f"npduel: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except CrossCheckError as exc:
        print(f"npduel: cross-check failed: {exc}", file=sys.stderr)
        return EXIT_CROSSCHECK, None
    record = {
        "tool": "npduel",
        "version": __version__,
        "command": f"{args.group} {args.command}",
        "config": config,
        "duration_s": duration,
        "result": result,
    }
    return EXIT_OK, record


def main(argv: Optional[list[str]] = None) -> int:
    code, record = run(argv)
    if record is not None:
        sys.stdout.write(render(record, record["config"]["format"]))
    return code


if __name__ == "__main__":
    sys.exit(main())
