"""Experiment-matrix planning.

Two probing tasks make up the matrix:

    whole-sentence task: the complete corpus (all five relation types),
        whole-sentence features, every layer; models with a classifier
        token get both the classifier-token and mean-pooled variants.
    element task: the Explicit subset with whole/connective/argument
        features, plus the Implicit and AltLex subsets with whole-sentence
        features, every layer.

Per-cell seeds derive from the master seed and the cell identity via a
stable hash, so cells can run in any order or in parallel and still
reproduce bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..store.features import FeatureVariant
from ..util import stable_seed

TASK_WHOLE_SENTENCE = "whole-sentence"
TASK_ELEMENTS = "elements"
TASKS = (TASK_WHOLE_SENTENCE, TASK_ELEMENTS)

SUBSETS = ("ALL", "EXP", "IMP", "ALT")

#: Relation types each subset keeps.
SUBSET_RELATION_TYPES = {
    "ALL": ("Explicit", "Implicit", "AltLex", "EntRel", "NoRel"),
    "EXP": ("Explicit",),
    "IMP": ("Implicit",),
    "ALT": ("AltLex",),
}

#: (subset, variant) combinations of the element task, in report order.
ELEMENT_COMBOS = (
    ("EXP", FeatureVariant.WHOLE_MEAN),
    ("EXP", FeatureVariant.CON),
    ("EXP", FeatureVariant.ARG),
    ("IMP", FeatureVariant.WHOLE_MEAN),
    ("ALT", FeatureVariant.WHOLE_MEAN),
)


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    layer_count: int
    has_cls: bool


@dataclass(frozen=True)
class ExperimentCell:
    model_id: str
    layer: int
    variant: FeatureVariant
    subset: str
    seed: int

    def validate(self) -> None:
        if self.subset not in SUBSETS:
            raise PlanError(f"unknown subset {self.subset!r}")
        if self.variant in (FeatureVariant.CON, FeatureVariant.ARG) and self.subset != "EXP":
            raise PlanError(f"variant {self.variant} requires subset EXP, got {self.subset}")
        if self.layer < 1:
            raise PlanError(f"layer must be 1-based, got {self.layer}")

    def key(self) -> tuple:
        return (self.model_id, self.layer, self.variant.value, self.subset)


def cell_seed(master_seed: int, model_id: str, layer: int, variant: FeatureVariant, subset: str) -> int:
    return stable_seed("cell", master_seed, model_id, layer, variant.value, subset)


def plan_matrix(
    models: Sequence[ModelSpec],
    tasks: Iterable[str] = TASKS,
    master_seed: int = 0,
) -> list[ExperimentCell]:
    """Enumerate all cells for the selected tasks, in deterministic order."""
    tasks = tuple(tasks)
    for task in tasks:
        if task not in TASKS:
            raise PlanError(f"unknown task {task!r}; expected one of {TASKS}")

    cells = []

    def add(model: ModelSpec, subset: str, variant: FeatureVariant) -> None:
        for layer in range(1, model.layer_count + 1):
            cell = ExperimentCell(
                model_id=model.model_id,
                layer=layer,
                variant=variant,
                subset=subset,
                seed=cell_seed(master_seed, model.model_id, layer, variant, subset),
            )
            cell.validate()
            cells.append(cell)

    for model in models:
        if TASK_WHOLE_SENTENCE in tasks:
            if model.has_cls:
                add(model, "ALL", FeatureVariant.WHOLE_CLS)
            add(model, "ALL", FeatureVariant.WHOLE_MEAN)
        if TASK_ELEMENTS in tasks:
            for subset, variant in ELEMENT_COMBOS:
                add(model, subset, variant)
    return cells
