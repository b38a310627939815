"""Cell execution and best-layer identification."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from ..pdtb.instances import DiscourseInstance
from ..probe.network import ProbeConfig, ProbeError
from ..probe.training import DataSplits, TrainReport, train
from ..store.features import FeatureError, feature_vector
from ..store.format import Alignment, DumpManifest
from ..util import short_digest
from .matrix import SUBSET_RELATION_TYPES, ExperimentCell


class RunError(ValueError):
    pass


@dataclass(frozen=True)
class ResultRow:
    cell: ExperimentCell
    dev_accuracy: float | None
    test_accuracy: float | None
    train_count: int
    valid_count: int
    test_count: int
    config_digest: str
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def config_digest(config: ProbeConfig) -> str:
    payload = {k: getattr(config, k) for k in ProbeConfig.__dataclass_fields__}
    return short_digest(json.dumps(payload, sort_keys=True))


def subset_instances(instances: Iterable[DiscourseInstance], subset: str) -> list[DiscourseInstance]:
    keep = set(SUBSET_RELATION_TYPES[subset])
    return [inst for inst in instances if inst.relation_type in keep]


def run_cell(
    cell: ExperimentCell,
    instances: Sequence[DiscourseInstance],
    manifest: DumpManifest,
    matrices: dict[str, np.ndarray],
    alignments: dict[str, Alignment],
    probe_config: ProbeConfig,
) -> ResultRow:
    """Build this cell's features, train a probe, report accuracies.

    Per-instance feature failures abort the whole cell with the failing
    instance ids; so do empty subsets or splits and a layer missing from
    the dump.
    """
    cell.validate()
    if cell.layer > manifest.layer_count:
        raise RunError(
            f"cell {cell.key()}: layer {cell.layer} missing from dump of {manifest.layer_count} layers"
        )
    selected = subset_instances(instances, cell.subset)
    if not selected:
        raise RunError(f"cell {cell.key()}: subset {cell.subset} is empty")

    features: dict[str, list[np.ndarray]] = {"train": [], "valid": [], "test": []}
    labels: dict[str, list[int]] = {"train": [], "valid": [], "test": []}
    failures: list[str] = []
    for inst in selected:
        if inst.split not in features:
            raise RunError(f"cell {cell.key()}: instance {inst.id!r} has no split assigned")
        if inst.id not in matrices:
            failures.append(f"{inst.id}: not in dump")
            continue
        try:
            vec = feature_vector(
                inst, manifest, matrices[inst.id], alignments[inst.id], cell.layer, cell.variant
            )
        except FeatureError as exc:
            failures.append(str(exc))
            continue
        features[inst.split].append(vec)
        labels[inst.split].append(inst.label_index)
    if failures:
        shown = "; ".join(failures[:5])
        more = f" (+{len(failures) - 5} more)" if len(failures) > 5 else ""
        raise RunError(f"cell {cell.key()}: {len(failures)} instances failed: {shown}{more}")
    for split_name, vecs in features.items():
        if not vecs:
            raise RunError(f"cell {cell.key()}: subset {cell.subset} has no {split_name} instances")

    data = DataSplits(
        train_x=np.stack(features["train"]).astype(np.float64),
        train_y=np.asarray(labels["train"], dtype=np.intp),
        valid_x=np.stack(features["valid"]).astype(np.float64),
        valid_y=np.asarray(labels["valid"], dtype=np.intp),
        test_x=np.stack(features["test"]).astype(np.float64),
        test_y=np.asarray(labels["test"], dtype=np.intp),
    )
    max_label = int(max(max(ys) for ys in labels.values() if ys))
    if max_label >= probe_config.class_count:
        raise RunError(
            f"cell {cell.key()}: label index {max_label} outside {probe_config.class_count} classes"
        )
    config = replace(probe_config, input_dim=manifest.hidden_dim, seed=cell.seed)
    _, report = train(data, config)
    return ResultRow(
        cell=cell,
        dev_accuracy=report.best_dev_accuracy,
        test_accuracy=report.test_accuracy,
        train_count=len(data.train_y),
        valid_count=len(data.valid_y),
        test_count=len(data.test_y),
        config_digest=config_digest(config),
    )


def run_matrix(
    cells: Sequence[ExperimentCell],
    instances: Sequence[DiscourseInstance],
    dumps: dict[str, tuple[DumpManifest, dict[str, np.ndarray], dict[str, Alignment]]],
    probe_config: ProbeConfig,
    workers: int = 1,
) -> list[ResultRow]:
    """Run all cells; failures become error rows instead of aborting the matrix.

    Cells are independent (per-cell seeds), so any worker count yields the
    same rows in the same order.
    """

    def one(cell: ExperimentCell) -> ResultRow:
        try:
            if cell.model_id not in dumps:
                raise RunError(f"cell {cell.key()}: no dump for model {cell.model_id!r}")
            manifest, matrices, alignments = dumps[cell.model_id]
            return run_cell(cell, instances, manifest, matrices, alignments, probe_config)
        except (RunError, ProbeError) as exc:
            return ResultRow(
                cell=cell,
                dev_accuracy=None,
                test_accuracy=None,
                train_count=0,
                valid_count=0,
                test_count=0,
                config_digest="",
                error=str(exc),
            )

    if workers <= 1:
        return [one(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, cells))


def discourse_aware_layer(rows: Sequence[ResultRow]) -> int:
    """Best layer of one (model, variant, subset) group: test-accuracy argmax.

    Requires complete 1..L coverage with exactly one successful row per
    layer; ties resolve to the lowest layer.
    """
    if not rows:
        raise RunError("no rows given")
    groups = {(r.cell.model_id, r.cell.variant, r.cell.subset) for r in rows}
    if len(groups) != 1:
        raise RunError(f"rows mix {len(groups)} different (model, variant, subset) groups")
    failed = [r.cell.layer for r in rows if r.failed or r.test_accuracy is None]
    if failed:
        raise RunError(f"layers {sorted(failed)} have no accuracy (failed cells)")
    layers = sorted(r.cell.layer for r in rows)
    expected = list(range(1, len(rows) + 1))
    if layers != expected:
        raise RunError(f"incomplete layer coverage: got {layers}, expected {expected}")

    best_layer, best_accuracy = None, -1.0
    for row in sorted(rows, key=lambda r: r.cell.layer):
        if row.test_accuracy > best_accuracy:
            best_layer, best_accuracy = row.cell.layer, row.test_accuracy
    return best_layer
