"""Derive smaller binary orthogonal arrays from bigger ones by row removal."""

from .fitness import FitnessEvaluator, deviation_vector, minkowski_fitness
from .ga import GaConfig, Population, RunReport, run_ga, steady_state_step
from .masks import RemovalMask
from .oa import (
    OaFormatError,
    OaParams,
    OrthogonalArray,
    TupleCountTable,
    is_orthogonal_array,
    parity_check_array,
    parse,
    remove_rows,
    replicate_and_shuffle,
    serialize,
    tuple_counts,
)
from .operators import counter_based_crossover, map_of_ones_crossover, random_balanced_mask, swap_mutation
from .oracle import OracleRefused, OracleReport, exhaustive_search, verify_ga_result
from .runner import BatchSummary, ExperimentSpec, build_instance, emit_report, load_report, run_batch

__version__ = "0.1.0"
