"""Command-line harness: ``oashrink [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .ga import GaConfig
from .oa import OaFormatError, read_array
from .oracle import OracleRefused
from .runner import ExperimentSpec, emit_report, run_batch, table1_specs

log = logging.getLogger("oashrink")

_CROSSOVER_NAMES = {"map-of-ones": "map_of_ones", "counter": "counter_based"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oashrink",
        description="Search for rows whose removal turns a binary orthogonal array into a smaller one of the same strength.",
    )
    inst = p.add_argument_group("instance")
    inst.add_argument("-t", "--strength", type=int, default=4)
    inst.add_argument("--lambda", dest="start_index", type=int, default=2, help="index of the starting array")
    inst.add_argument("--lambda-prime", dest="target_index", type=int, default=1, help="index of the array to reach")
    inst.add_argument("--instance-seed", type=int, default=0)
    inst.add_argument("--instance-file", help="load the starting array from a text file instead of generating it")
    inst.add_argument("--fresh-instance-per-run", action="store_true")

    ga = p.add_argument_group("genetic algorithm")
    ga.add_argument("--runs", type=int, default=30)
    ga.add_argument("--pop-size", type=int, default=500)
    ga.add_argument("--tournament", type=int, default=3)
    ga.add_argument("--mutation-prob", type=float, default=0.2)
    ga.add_argument("--budget", type=int, default=100_000, help="fitness evaluations per run")
    ga.add_argument("--crossover", choices=sorted(_CROSSOVER_NAMES), default="map-of-ones")
    ga.add_argument("--exponent", type=float, default=2.0, help="Minkowski exponent")
    ga.add_argument("--aggregation", choices=["global", "per_block"], default="global")
    ga.add_argument("--replace-only-if-better", action="store_true")
    ga.add_argument("--no-early-stop", action="store_true")
    ga.add_argument("--seed", type=int, default=0)

    run = p.add_argument_group("run")
    run.add_argument("--mode", choices=["ga", "oracle", "both"], default="ga")
    run.add_argument("--table1", action="store_true", help="run the six t=4 cells with lambda in 2..4")
    run.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel worker processes")
    run.add_argument("--out", help="report path (default: stdout summary only)")
    run.add_argument("--format", choices=["json", "csv"], default="json")
    run.add_argument("-v", "--verbose", action="store_true")
    return p


def _ga_config(args) -> GaConfig:
    return GaConfig(
        population_size=args.pop_size,
        tournament_size=args.tournament,
        mutation_probability=args.mutation_prob,
        evaluation_budget=args.budget,
        crossover_variant=_CROSSOVER_NAMES[args.crossover],
        seed=args.seed,
        minkowski_exponent=args.exponent,
        aggregation=args.aggregation,
        replace_only_if_better=args.replace_only_if_better,
        early_stop=not args.no_early_stop,
    )


def _specs(args) -> list[ExperimentSpec]:
    ga = _ga_config(args)
    if args.table1:
        return table1_specs(runs=args.runs, seed=args.seed, instance_seed=args.instance_seed, ga=ga, mode=args.mode)
    strength, start = args.strength, args.start_index
    if args.instance_file:
        header = read_array(args.instance_file).params
        if header.index is None:
            raise ValueError(f"{args.instance_file}: N={header.n_rows} is not a multiple of s^t")
        strength, start = header.strength, header.index
    return [
        ExperimentSpec(
            strength=strength, start_index=start, target_index=args.target_index, runs=args.runs, ga=ga,
            instance_seed=args.instance_seed, mode=args.mode,
            fresh_instance_per_run=args.fresh_instance_per_run, instance_file=args.instance_file,
        )
    ]


def _print_summary(summary, out) -> None:
    s = summary.spec
    line = f"t={s.strength} lambda={s.start_index} lambda'={s.target_index}"
    if summary.per_run:
        line += (
            f"  optimal {summary.success_count}/{len(summary.per_run)}"
            f"  median best {summary.median_best_fitness:.4g}"
            f"  verified {sum(summary.verified)}/{len(summary.verified)}"
        )
    if summary.oracle is not None:
        o = summary.oracle
        line += f"  oracle: {o.masks_enumerated} masks, min {o.min_fitness:.4g}, {o.optimal_count} optima"
    elif summary.oracle_error:
        line += f"  oracle skipped ({summary.oracle_error})"
    line += f"  [{summary.wall_time:.1f}s]"
    print(line, file=out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        specs = _specs(args)
        summaries = []
        for spec in specs:
            summary = run_batch(spec, jobs=max(1, args.jobs))
            _print_summary(summary, sys.stdout)
            summaries.append(summary)
        if args.out:
            emit_report(summaries, args.out, args.format)
    except (ValueError, OSError, OaFormatError, OracleRefused) as exc:
        print(f"oashrink: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
