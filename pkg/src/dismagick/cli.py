"""Command-line interface: ``random-bench``, ``heisenberg`` and ``m2``.

Every CSV starts with the schema line ``# dismagick-csv v1``.  Floats are
written with ``repr`` so they round-trip exactly.  Timing columns stay empty
unless ``--record-timing`` is given, which keeps repeated runs byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import DismagickError
from .io import load_state
from .mps import MPS, entropy_profile, from_statevector
from .sre import exact_m2, sampled_m2
from .statevector import (Statevector, entanglement_entropy, ghz, prepare_benchmark_state,
                          t_product, zero_state)
from .sweep import SweepConfig, run_sweeps, strategies_for

CSV_SCHEMA = "# dismagick-csv v1"
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

BENCH_COLUMNS = ["realization", "seed", "strategy", "sweep", "m2", "m2_stderr", "ee", "wall_ms"]
AGGREGATE_COLUMNS = ["strategy", "sweep", "count", "m2_mean", "m2_std", "ee_mean", "ee_std"]
HEISENBERG_COLUMNS = ["sweep", "m2", "m2_stderr", "ee", "mean_ee", "energy", "relative_error",
                      "mpo_bond", "gates", "wall_ms"]


class NumericalFailure(Exception):
    def __init__(self, seed, cause):
        super().__init__(f"{type(cause).__name__}: {cause}")
        self.seed = seed


_NUMERICAL_ERRORS = (np.linalg.LinAlgError, FloatingPointError, ArithmeticError, DismagickError)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, columns, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(CSV_SCHEMA + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path) -> list[dict]:
    """Rows of a dismagick CSV as dicts of strings (schema line skipped)."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_SCHEMA:
            raise ValueError(f"{path}: missing schema line {CSV_SCHEMA!r}")
        return list(csv.DictReader(fh))


def parse_sweeps(text: str) -> tuple[int, int]:
    """``"6+4"`` -> ``(6, 4)``."""
    try:
        a, b = text.split("+")
        p1, p2 = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P1+P2, got {text!r}") from None
    if p1 < 0 or p2 < 0:
        raise argparse.ArgumentTypeError("sweep counts must be >= 0")
    return p1, p2


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


# -- random-bench ---------------------------------------------------------

def realization_seeds(master: int, count: int) -> list[int]:
    children = np.random.SeedSequence(master).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def run_realization(r: int, seed: int, n: int, depth: int, layers: int,
                    p1: int, p2: int, timing: bool) -> list[tuple]:
    try:
        prep, *strategy_seeds = np.random.SeedSequence(seed).spawn(4)
        psi = prepare_benchmark_state(n, depth, layers, np.random.default_rng(prep))
        rows = []
        for strategy, s in zip(strategies_for(p1, p2), strategy_seeds):
            res = run_sweeps(psi, strategy, SweepConfig(), np.random.default_rng(s))
            for rec in res.records:
                if not (math.isfinite(rec.m2) and math.isfinite(rec.ee)):
                    raise FloatingPointError("non-finite trajectory value")
                wall = rec.wall_time * 1e3 if timing else None
                rows.append((r, seed, strategy.name, rec.sweep, rec.m2, rec.m2_stderr, rec.ee,
                             wall))
        return rows
    except _NUMERICAL_ERRORS as exc:
        raise NumericalFailure(seed, exc) from exc


def aggregate(rows) -> list[tuple]:
    """Mean and sample standard deviation of m2 and ee per (strategy, sweep)."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row[2], row[3]), []).append((float(row[4]), float(row[6])))
    order = {name: i for i, name in enumerate(["clifford_only", "sequential", "joint"])}
    out = []
    for (name, sweep), vals in sorted(groups.items(),
                                      key=lambda kv: (order.get(kv[0][0], 99), kv[0][0],
                                                      int(kv[0][1]))):
        arr = np.array(vals)
        ddof = 1 if len(arr) > 1 else 0
        out.append((name, int(sweep), len(arr), float(arr[:, 0].mean()),
                    float(arr[:, 0].std(ddof=ddof)), float(arr[:, 1].mean()),
                    float(arr[:, 1].std(ddof=ddof))))
    return out


def cmd_random_bench(args) -> int:
    p1, p2 = args.sweeps
    seeds = realization_seeds(args.seed, args.realizations)
    jobs = [(r, s, args.n, args.clifford_depth, args.haar_layers, p1, p2, args.record_timing)
            for r, s in enumerate(seeds)]
    rows: list = []
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                for chunk in pool.map(run_realization, *zip(*jobs)):
                    rows.extend(chunk)
        else:
            for job in jobs:
                rows.extend(run_realization(*job))
    except NumericalFailure as exc:
        print(f"error: numerical failure with seed {exc.seed}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = Path(args.out)
    _write_csv(out / "random_bench_realizations.csv", BENCH_COLUMNS, rows)
    agg = aggregate(rows)
    _write_csv(out / "random_bench_aggregate.csv", AGGREGATE_COLUMNS, agg)
    last = {}
    for row in agg:
        last[row[0]] = row
    for name, row in last.items():
        print(f"{name:14s} sweep {row[1]:3d}  m2 {row[3]:.4f} +- {row[4]:.4f}  "
              f"ee {row[5]:.4f} +- {row[6]:.4f}")
    print(f"wrote {out / 'random_bench_realizations.csv'} and "
          f"{out / 'random_bench_aggregate.csv'}")
    return 0


# -- heisenberg -----------------------------------------------------------

def cmd_heisenberg(args) -> int:
    from .dmrg import heisenberg_pipeline

    def progress(rec):
        print(f"sweep {rec.sweep:3d}  m2 {rec.m2:.4f}  ee {rec.ee:.4f}  "
              f"energy {rec.energy:.10f}  rel.err {rec.relative_error:.3e}", flush=True)

    try:
        res = heisenberg_pipeline(args.L, args.D, args.sweeps, args.candidates, args.shots,
                                  args.seed, args.dmrg_sweeps, max_mpo_bond=args.max_mpo_bond,
                                  check=None if not args.no_check else False,
                                  progress=progress)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: numerical failure with seed {args.seed}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    rows = [(r.sweep, r.m2, r.m2_stderr, r.ee, r.mean_ee, r.energy, r.relative_error,
             r.mpo_bond, r.gates, r.wall_time * 1e3 if args.record_timing else None)
            for r in res.records]
    out = Path(args.out)
    _write_csv(out / "heisenberg.csv", HEISENBERG_COLUMNS, rows)
    summary = {"L": args.L, "D": args.D, "reference_energy": res.reference,
               "capped_compressions": res.capped_compressions}
    if res.coherence is not None:
        c = res.coherence
        summary.update(coherence_passed=c.passed, spectrum_error=c.spectrum_error,
                       operator_error=c.operator_error, energy_error=c.energy_error)
    (out / "heisenberg_summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True)
                                                 + "\n")
    print(json.dumps(summary, sort_keys=True))
    if res.coherence is not None and not res.coherence.passed:
        print("error: dense cross-validation failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


# -- m2 -------------------------------------------------------------------

_FIXTURES = {"ghz": ghz, "t-product": t_product, "zero": zero_state}


def cmd_m2(args) -> int:
    if args.state is not None:
        try:
            state = load_state(args.state)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot read state file {args.state}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        state = _FIXTURES[args.fixture](args.n)
    if isinstance(state, Statevector) and args.shots is not None:
        state = from_statevector(state)
    if isinstance(state, MPS):
        est = sampled_m2(state, args.shots or 10_000, args.seed)
        prof = entropy_profile(state)
        out = {"m2": est.value, "std_error": est.std_error, "shots": est.shots,
               "method": "pauli_sampled"}
        n = state.L
    else:
        n = state.n
        prof = [entanglement_entropy(state, c) for c in range(1, n)]
        out = {"m2": exact_m2(state), "std_error": 0.0, "shots": 0, "method": "exact"}
    out["ee"] = prof[n // 2 - 1] if n > 1 else 0.0
    out["n"] = n
    print(json.dumps(out, sort_keys=True))
    return 0


# -- parser ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dismagick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    rb = sub.add_parser("random-bench", help="three sweep strategies on random n-qubit states")
    rb.add_argument("--n", type=_positive, default=6)
    rb.add_argument("--realizations", type=_positive, default=100)
    rb.add_argument("--clifford-depth", type=_nonneg, default=6)
    rb.add_argument("--haar-layers", type=_nonneg, default=3)
    rb.add_argument("--sweeps", type=parse_sweeps, default=(6, 4), help="P1+P2, e.g. 6+4")
    rb.add_argument("--seed", type=int, default=0)
    rb.add_argument("--jobs", type=_positive, default=1)
    rb.add_argument("--out", default="runs/random-bench")
    rb.add_argument("--record-timing", action="store_true")
    rb.set_defaults(func=cmd_random_bench)

    hb = sub.add_parser("heisenberg", help="joint sweeps on the Heisenberg chain ground state")
    hb.add_argument("--L", type=_positive, default=20)
    hb.add_argument("--D", type=_positive, default=4)
    hb.add_argument("--sweeps", type=_nonneg, default=5)
    hb.add_argument("--candidates", type=_nonneg, default=200)
    hb.add_argument("--shots", type=_positive, default=10_000)
    hb.add_argument("--seed", type=int, default=0)
    hb.add_argument("--dmrg-sweeps", type=_positive, default=10)
    hb.add_argument("--max-mpo-bond", type=_positive, default=64)
    hb.add_argument("--no-check", action="store_true", help="skip dense cross-validation")
    hb.add_argument("--out", default="runs/heisenberg")
    hb.add_argument("--record-timing", action="store_true")
    hb.set_defaults(func=cmd_heisenberg)

    m2 = sub.add_parser("m2", help="M2 and half-chain entanglement of a state")
    src = m2.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixture", choices=sorted(_FIXTURES))
    src.add_argument("--state", help="file written by dismagick.io.save_state")
    m2.add_argument("--n", type=_positive, default=6)
    m2.add_argument("--shots", type=_positive, default=None)
    m2.add_argument("--seed", type=int, default=0)
    m2.set_defaults(func=cmd_m2)

    for p in (rb, hb, m2):
        p.add_argument("--config", help="JSON file supplying defaults for any flag")
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config``; explicit flags still win."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            parser.error(f"unknown config key {key!r}")
        action = known[dest]
        if action.type is not None and not isinstance(value, bool):
            try:
                value = action.type(str(value) if dest != "sweeps" else value)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                parser.error(f"config key {key!r}: {exc}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
