"""Command-line harness: single runs, horizon/seed sweeps, report merging.

Exit codes: 0 success, 2 configuration error, 3 bandit contract violation.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..errors import BanditContractViolation, ConfigError
from .experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    default_output_dir,
    run_experiment,
)
from .slope import fit_slope


def parse_horizons(text: str):
    """Accept '2^10..2^16' (powers of two) or a comma list '1024,4096'."""
    rng = re.fullmatch(r"2\^(\d+)\.\.2\^(\d+)", text.strip())
    if rng:
        lo, hi = int(rng.group(1)), int(rng.group(2))
        if lo > hi:
            raise ConfigError(f"empty horizon range {text!r}")
        return [2**e for e in range(lo, hi + 1)]
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse horizons {text!r}")


def _run_one(config: ExperimentConfig):
    report = run_experiment(config)
    return config.T, config.seed, report.gamma_regret, report.explored_rounds


def cmd_run(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    if args.out:
        config = replace(config, out=args.out)
    elif not config.out:
        out = default_output_dir() / _run_name(config)
        config = replace(config, out=str(out))
    report = run_experiment(config)
    print(
        f"{config.app} {config.feedback} T={config.T} seed={config.seed} "
        f"gamma-regret={report.gamma_regret:.6f} "
        f"explored={report.explored_rounds} benchmark={report.benchmark_label} "
        f"csv={config.out}"
    )
    return 0


def _run_name(config: ExperimentConfig) -> str:
    return f"{config.app}_{config.feedback}_T{config.T}_seed{config.seed}.csv"


def cmd_sweep(args) -> int:
    base = ExperimentConfig.from_file(args.config)
    horizons = parse_horizons(args.horizons)
    out_dir = Path(args.out_dir) if args.out_dir else default_output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = []
    for T in horizons:
        for s in range(args.seeds):
            cfg = replace(base, T=T, seed=base.seed + s)
            cfg = replace(cfg, out=str(out_dir / _run_name(cfg)))
            configs.append(cfg)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_run_one, configs))
    else:
        results = [_run_one(c) for c in configs]
    for T, seed, regret, explored in results:
        print(f"T={T} seed={seed} gamma-regret={regret:.6f} explored={explored}")
    return 0


def cmd_report(args) -> int:
    rows = []
    for path in sorted(Path(args.in_dir).glob("*.csv")):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != CSV_COLUMNS:
                continue
            last = None
            explored = 0
            for rec in reader:
                last = rec
                explored += int(rec["explored_subproblem"]) >= 0
            if last is not None:
                rows.append(
                    {
                        "T": int(last["t"]),
                        "seed": int(last["seed"]),
                        "regret": float(last["cum_gamma_regret"]),
                        "explored": explored,
                    }
                )
    if not rows:
        raise ConfigError(f"no run CSVs found under {args.in_dir}")
    by_T: dict = {}
    for r in rows:
        by_T.setdefault(r["T"], []).append(r)
    horizons = sorted(by_T)
    means = {T: float(np.mean([r["regret"] for r in by_T[T]])) for T in horizons}
    slope = None
    if len(horizons) >= 4:
        slope = fit_slope([(T, means[T]) for T in horizons])
    out_rows = []
    for T in horizons:
        regs = np.array([r["regret"] for r in by_T[T]], dtype=float)
        stderr = float(regs.std(ddof=1) / math.sqrt(regs.size)) if regs.size > 1 else 0.0
        out_rows.append(
            {
                "T": T,
                "n_seeds": regs.size,
                "mean_regret": means[T],
                "stderr_regret": stderr,
                "mean_explored": float(np.mean([r["explored"] for r in by_T[T]])),
                "slope": "" if slope is None else repr(slope),
            }
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(out_rows[0]))
        writer.writeheader()
        writer.writerows(out_rows)
    for r in out_rows:
        print(
            f"T={r['T']} mean regret={r['mean_regret']:.6f} "
            f"+/- {r['stderr_regret']:.6f} ({r['n_seeds']} seeds)"
        )
    if slope is not None:
        print(f"log-log slope: {slope:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greedyonline",
        description="No-regret online learning from offline iterative greedy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="round CSV path")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep horizons x seeds")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--horizons", required=True, help="e.g. 2^10..2^16")
    p_sweep.add_argument("--seeds", type=int, default=10)
    p_sweep.add_argument("--out-dir", default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("report", help="merge per-run CSVs")
    p_rep.add_argument("--in", dest="in_dir", required=True)
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BanditContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
