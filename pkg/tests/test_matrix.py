"""Experiment planning: cell enumeration against an independent count."""

import pytest

from dprobe.runner.matrix import (
    ELEMENT_COMBOS,
    SUBSET_RELATION_TYPES,
    TASK_ELEMENTS,
    TASK_WHOLE_SENTENCE,
    ExperimentCell,
    ModelSpec,
    PlanError,
    cell_seed,
    plan_matrix,
)
from dprobe.store.features import FeatureVariant

MODELS = [
    ModelSpec(model_id="enc", layer_count=12, has_cls=True),
    ModelSpec(model_id="dec", layer_count=12, has_cls=False),
]


def expected_cells() -> set[tuple]:
    """Independent enumeration of the full matrix."""
    expected = set()
    for model in MODELS:
        variants = ["whole_mean"] + (["whole_cls"] if model.has_cls else [])
        for variant in variants:
            for layer in range(1, model.layer_count + 1):
                expected.add((model.model_id, layer, variant, "ALL"))
        for subset, variant in [
            ("EXP", "whole_mean"),
            ("EXP", "con"),
            ("EXP", "arg"),
            ("IMP", "whole_mean"),
            ("ALT", "whole_mean"),
        ]:
            for layer in range(1, model.layer_count + 1):
                expected.add((model.model_id, layer, variant, subset))
    return expected


def test_full_plan_matches_independent_enumeration():
    cells = plan_matrix(MODELS, master_seed=0)
    got = {(c.model_id, c.layer, str(c.variant), c.subset) for c in cells}
    assert got == expected_cells()
    assert len(cells) == len(got)
    # 12 layers x (2 + 5) variants + 12 x (1 + 5): 84 + 72.
    assert len(cells) == 156


def test_whole_sentence_task_only():
    cells = plan_matrix(MODELS, tasks=(TASK_WHOLE_SENTENCE,))
    assert len(cells) == 12 * 2 + 12 * 1
    assert {c.subset for c in cells} == {"ALL"}


def test_elements_task_only():
    cells = plan_matrix(MODELS, tasks=(TASK_ELEMENTS,))
    assert len(cells) == 12 * 5 * 2
    assert {c.subset for c in cells} == {"EXP", "IMP", "ALT"}
    con_cells = [c for c in cells if c.variant is FeatureVariant.CON]
    assert all(c.subset == "EXP" for c in con_cells)


def test_plan_is_deterministic_and_ordered():
    a = plan_matrix(MODELS, master_seed=3)
    b = plan_matrix(MODELS, master_seed=3)
    assert a == b


def test_unknown_task_rejected():
    with pytest.raises(PlanError):
        plan_matrix(MODELS, tasks=("sideways",))


def test_cell_seeds_are_distinct_and_stable():
    cells = plan_matrix(MODELS, master_seed=0)
    seeds = [c.seed for c in cells]
    assert len(set(seeds)) == len(seeds)
    # Stable: recomputing from the cell coordinates gives the same seed.
    for cell in cells:
        assert cell.seed == cell_seed(0, cell.model_id, cell.layer, cell.variant, cell.subset)


def test_master_seed_changes_cell_seeds():
    a = plan_matrix(MODELS, master_seed=0)
    b = plan_matrix(MODELS, master_seed=1)
    assert all(ca.seed != cb.seed for ca, cb in zip(a, b))


def test_cell_validation_rejects_con_outside_exp():
    cell = ExperimentCell(
        model_id="m", layer=1, variant=FeatureVariant.CON, subset="ALL", seed=0
    )
    with pytest.raises(PlanError):
        cell.validate()


def test_cell_validation_rejects_bad_layer_and_subset():
    with pytest.raises(PlanError):
        ExperimentCell(
            model_id="m", layer=0, variant=FeatureVariant.WHOLE_MEAN, subset="ALL", seed=0
        ).validate()
    with pytest.raises(PlanError):
        ExperimentCell(
            model_id="m", layer=1, variant=FeatureVariant.WHOLE_MEAN, subset="SOME", seed=0
        ).validate()


def test_subset_relation_types_cover_documented_sets():
    assert SUBSET_RELATION_TYPES["ALL"] == ("Explicit", "Implicit", "AltLex", "EntRel", "NoRel")
    assert SUBSET_RELATION_TYPES["EXP"] == ("Explicit",)
    assert SUBSET_RELATION_TYPES["IMP"] == ("Implicit",)
    assert SUBSET_RELATION_TYPES["ALT"] == ("AltLex",)
    assert len(ELEMENT_COMBOS) == 5
