"""Experiment planning, execution, and reporting."""

from .matrix import (
    ELEMENT_COMBOS,
    SUBSET_RELATION_TYPES,
    SUBSETS,
    TASK_ELEMENTS,
    TASK_WHOLE_SENTENCE,
    TASKS,
    ExperimentCell,
    ModelSpec,
    PlanError,
    cell_seed,
    plan_matrix,
)
from .report import emit_report, sanitize_name, write_curve_files, write_results_csv, write_summary
from .run import ResultRow, RunError, discourse_aware_layer, run_cell, run_matrix, subset_instances
from .synthetic import synthetic_corpus, synthetic_dump, whitespace_alignment

__all__ = [
    "ELEMENT_COMBOS",
    "SUBSET_RELATION_TYPES",
    "SUBSETS",
    "TASK_ELEMENTS",
    "TASK_WHOLE_SENTENCE",
    "TASKS",
    "ExperimentCell",
    "ModelSpec",
    "PlanError",
    "ResultRow",
    "RunError",
    "cell_seed",
    "discourse_aware_layer",
    "emit_report",
    "plan_matrix",
    "run_cell",
    "run_matrix",
    "sanitize_name",
    "subset_instances",
    "synthetic_corpus",
    "synthetic_dump",
    "whitespace_alignment",
    "write_curve_files",
    "write_results_csv",
    "write_summary",
]
