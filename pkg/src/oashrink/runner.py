"""Experiment batches: instance generation, repeated GA runs, oracle cross-checks and reports."""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .ga import GaConfig, RunReport, run_ga
from .oa import OrthogonalArray, is_orthogonal_array, parity_check_array, read_array, replicate_and_shuffle
from .oracle import OracleRefused, OracleReport, exhaustive_search, verify_ga_result

__all__ = [
    "SCHEMA_VERSION",
    "MODES",
    "ExperimentSpec",
    "BatchSummary",
    "derive_seed",
    "lower_median",
    "build_instance",
    "run_batch",
    "table1_specs",
    "emit_report",
    "load_report",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MODES = ("ga", "oracle", "both")
_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """64-bit seed for run ``index``: splitmix64(splitmix64(seed) + index).

    Depends only on the pair, so adding runs never changes earlier ones.
    """
    return _splitmix64((_splitmix64(seed & _MASK64) + index) & _MASK64)


def lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


@dataclass(frozen=True)
class ExperimentSpec:
    strength: int = 4
    start_index: int = 2
    target_index: int = 1
    runs: int = 30
    ga: GaConfig = GaConfig()
    instance_seed: int = 0
    mode: str = "ga"
    fresh_instance_per_run: bool = False
    instance_file: Optional[str] = None

    def __post_init__(self):
        if self.strength < 1:
            raise ValueError("strength must be >= 1")
        if not 1 <= self.target_index < self.start_index:
            raise ValueError(
                f"need 1 <= lambda' < lambda, got lambda={self.start_index}, lambda'={self.target_index}"
            )
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.instance_file is not None and self.fresh_instance_per_run:
            raise ValueError("a fresh instance per run cannot be combined with an instance file")

    def to_dict(self) -> dict:
        return {
            "strength": self.strength,
            "start_index": self.start_index,
            "target_index": self.target_index,
            "runs": self.runs,
            "ga": self.ga.to_dict(),
            "instance_seed": self.instance_seed,
            "mode": self.mode,
            "fresh_instance_per_run": self.fresh_instance_per_run,
            "instance_file": self.instance_file,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        data["ga"] = GaConfig.from_dict(data["ga"])
        return cls(**data)


@dataclass
class BatchSummary:
    spec: ExperimentSpec
    success_count: int
    median_best_fitness: Optional[float]
    best_fitness_distribution: list[float]
    per_run: list[RunReport]
    verified: list[bool]
    oracle: Optional[OracleReport] = None
    oracle_error: Optional[str] = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def all_verified(self) -> bool:
        return all(self.verified)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "success_count": self.success_count,
            "runs": len(self.per_run),
            "median_best_fitness": self.median_best_fitness,
            "best_fitness_distribution": self.best_fitness_distribution,
            "per_run": [r.to_dict() for r in self.per_run],
            "verified": self.verified,
            "oracle": None if self.oracle is None else self.oracle.to_dict(),
            "oracle_error": self.oracle_error,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BatchSummary":
        return cls(
            spec=ExperimentSpec.from_dict(data["spec"]),
            success_count=int(data["success_count"]),
            median_best_fitness=None if data["median_best_fitness"] is None else float(data["median_best_fitness"]),
            best_fitness_distribution=[float(x) for x in data["best_fitness_distribution"]],
            per_run=[RunReport.from_dict(r) for r in data["per_run"]],
            verified=[bool(v) for v in data["verified"]],
            oracle=None if data.get("oracle") is None else OracleReport.from_dict(data["oracle"]),
            oracle_error=data.get("oracle_error"),
            wall_time=float(data.get("wall_time", 0.0)),
        )


def build_instance(spec: ExperimentSpec, run_index: int | None = None) -> OrthogonalArray:
    """The benchmark array of a batch: parity-check blocks, replicated and shuffled.

    With ``run_index`` and ``fresh_instance_per_run`` the shuffle seed is
    derived from the instance seed and the run index.
    """
    if spec.instance_file is not None:
        arr = read_array(spec.instance_file)
        if not is_orthogonal_array(arr):
            raise ValueError(f"{spec.instance_file}: array is not an orthogonal array of strength {arr.params.strength}")
        if (arr.params.strength, arr.params.index) != (spec.strength, spec.start_index):
            raise ValueError(
                f"{spec.instance_file}: file has t={arr.params.strength}, lambda={arr.params.index}; "
                f"spec expects t={spec.strength}, lambda={spec.start_index}"
            )
        return arr
    seed = spec.instance_seed
    if spec.fresh_instance_per_run and run_index is not None:
        seed = derive_seed(spec.instance_seed, run_index)
    return replicate_and_shuffle(parity_check_array(spec.strength), spec.start_index, seed)


def _run_one(args) -> RunReport:
    arr, target_index, config = args
    return run_ga(arr, target_index, config)


def run_batch(spec: ExperimentSpec, jobs: int = 1) -> BatchSummary:
    """Run ``spec.runs`` independent GA runs and aggregate them.

    Run i uses seed ``derive_seed(spec.ga.seed, i)``. In ``oracle``/``both``
    mode the instance is also enumerated exhaustively when small enough;
    a refusal is fatal only in ``oracle`` mode.
    """
    started = time.perf_counter()
    base = build_instance(spec)
    target = spec.target_index
    ga = spec.ga

    oracle, oracle_error = None, None
    if spec.mode in ("oracle", "both"):
        try:
            oracle = exhaustive_search(base, target, ga.minkowski_exponent, ga.aggregation)
        except OracleRefused as exc:
            if spec.mode == "oracle":
                raise
            oracle_error = str(exc)
            log.warning("oracle skipped: %s", exc)

    reports: list[RunReport] = []
    instances: list[OrthogonalArray] = []
    if spec.mode in ("ga", "both"):
        instances = [
            build_instance(spec, i) if spec.fresh_instance_per_run else base for i in range(spec.runs)
        ]
        tasks = [(inst, target, replace(ga, seed=derive_seed(ga.seed, i))) for i, inst in enumerate(instances)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                reports = list(pool.map(_run_one, tasks))
        else:
            reports = [_run_one(t) for t in tasks]

    verified = [
        verify_ga_result(inst, target, r, ga.minkowski_exponent, ga.aggregation) for inst, r in zip(instances, reports)
    ]
    values = [r.best_fitness for r in reports]
    summary = BatchSummary(
        spec=spec,
        success_count=sum(1 for r in reports if r.success),
        median_best_fitness=lower_median(values) if values else None,
        best_fitness_distribution=values,
        per_run=reports,
        verified=verified,
        oracle=oracle,
        oracle_error=oracle_error,
        wall_time=time.perf_counter() - started,
    )
    log.info(
        "t=%d lambda=%d->%d: %d/%d optimal, median %s",
        spec.strength, spec.start_index, target, summary.success_count, len(reports), summary.median_best_fitness,
    )
    return summary


def table1_specs(runs: int = 30, seed: int = 0, instance_seed: int = 0, ga: GaConfig | None = None, mode: str = "ga") -> list[ExperimentSpec]:
    """The six strength-4 cells with lambda in {2, 3, 4} and lambda' < lambda."""
    ga = ga or GaConfig()
    return [
        ExperimentSpec(
            strength=4, start_index=lam, target_index=lam_p, runs=runs,
            ga=replace(ga, seed=seed), instance_seed=instance_seed, mode=mode,
        )
        for lam in (2, 3, 4)
        for lam_p in range(1, lam)
    ]


def _report_document(summaries: Sequence[BatchSummary]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "median_convention": "lower",
        "batches": [s.to_dict() for s in summaries],
    }


_CSV_FIELDS = ["strength", "start_index", "target_index", "run", "seed", "best_fitness", "success", "evaluations_used"]


def emit_report(summaries: Sequence[BatchSummary], path, fmt: str = "json") -> Path:
    """Write batches as JSON (full detail) or CSV (one row per run plus one summary row per batch)."""
    path = Path(path)
    try:
        if fmt == "json":
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(_report_document(summaries), fh, indent=2)
                fh.write("\n")
        elif fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(_CSV_FIELDS)
                for s in summaries:
                    cell = [s.spec.strength, s.spec.start_index, s.spec.target_index]
                    for i, r in enumerate(s.per_run):
                        writer.writerow(cell + [i, r.seed, repr(r.best_fitness), int(r.success), r.evaluations_used])
                    total = sum(r.evaluations_used for r in s.per_run)
                    writer.writerow(cell + ["summary", "", "" if s.median_best_fitness is None else repr(s.median_best_fitness), s.success_count, total])
        else:
            raise ValueError(f"unknown report format {fmt!r}, expected json or csv")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def load_report(path) -> list[BatchSummary]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported schema version {doc.get('schema_version')!r}")
    return [BatchSummary.from_dict(b) for b in doc["batches"]]
