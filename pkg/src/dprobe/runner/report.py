"""Deterministic result files for a finished experiment matrix."""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Sequence

from .run import ResultRow, discourse_aware_layer

RESULT_COLUMNS = (
    "model_id",
    "layer",
    "variant",
    "subset",
    "seed",
    "train_count",
    "valid_count",
    "test_count",
    "dev_accuracy",
    "test_accuracy",
    "config_digest",
    "error",
)


def _fmt_accuracy(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def sanitize_name(text: str) -> str:
    """Collapse anything outside [A-Za-z0-9._-] so names are path-safe."""
    cleaned = re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_")
    return cleaned or "unnamed"


def write_results_csv(rows: Sequence[ResultRow], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.cell.model_id,
                    row.cell.layer,
                    str(row.cell.variant),
                    row.cell.subset,
                    row.cell.seed,
                    row.train_count,
                    row.valid_count,
                    row.test_count,
                    _fmt_accuracy(row.dev_accuracy),
                    _fmt_accuracy(row.test_accuracy),
                    row.config_digest,
                    row.error or "",
                ]
            )


def group_rows(rows: Sequence[ResultRow]) -> dict[tuple[str, str, str], list[ResultRow]]:
    groups: dict[tuple[str, str, str], list[ResultRow]] = {}
    for row in rows:
        key = (row.cell.model_id, str(row.cell.variant), row.cell.subset)
        groups.setdefault(key, []).append(row)
    for members in groups.values():
        members.sort(key=lambda r: r.cell.layer)
    return groups


def write_curve_files(rows: Sequence[ResultRow], directory: Path) -> list[Path]:
    paths = []
    for (model_id, variant, subset), members in sorted(group_rows(rows).items()):
        name = f"curve_{sanitize_name(model_id)}_{sanitize_name(variant)}_{sanitize_name(subset)}.csv"
        path = directory / name
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["layer", "dev_accuracy", "test_accuracy"])
            for row in members:
                writer.writerow(
                    [row.cell.layer, _fmt_accuracy(row.dev_accuracy), _fmt_accuracy(row.test_accuracy)]
                )
        paths.append(path)
    return paths


def write_summary(rows: Sequence[ResultRow], path: Path) -> None:
    """One line per curve: its best layer and that layer's test accuracy.

    Groups holding several runs per layer (repeated seeds) are averaged
    before taking the argmax.
    """
    lines = []
    failed = sum(1 for r in rows if r.failed)
    lines.append(f"cells: {len(rows)} total, {failed} failed")
    for (model_id, variant, subset), members in sorted(group_rows(rows).items()):
        layers = sorted({r.cell.layer for r in members})
        repeated = len(members) > len(layers)
        if repeated:
            per_layer = {
                layer: [r.test_accuracy for r in members if r.cell.layer == layer]
                for layer in layers
            }
            bad = [layer for layer, accs in per_layer.items() if any(a is None for a in accs)]
            if bad or layers != list(range(1, len(layers) + 1)):
                lines.append(
                    f"{model_id} {variant} {subset}: discourse-aware layer undetermined "
                    f"(failed or missing layers)"
                )
                continue
            means = {layer: sum(accs) / len(accs) for layer, accs in per_layer.items()}
            best = min(layers, key=lambda layer: (-means[layer], layer))
            runs = len(per_layer[best])
            lines.append(
                f"{model_id} {variant} {subset}: discourse-aware layer {best} "
                f"(mean test accuracy {means[best]:.4f} over {runs} runs)"
            )
            continue
        try:
            best = discourse_aware_layer(members)
        except Exception as exc:
            lines.append(f"{model_id} {variant} {subset}: discourse-aware layer undetermined ({exc})")
            continue
        accuracy = next(r.test_accuracy for r in members if r.cell.layer == best)
        lines.append(
            f"{model_id} {variant} {subset}: discourse-aware layer {best} (test accuracy {accuracy:.4f})"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_report(rows: Sequence[ResultRow], directory: Path) -> dict[str, list[Path]]:
    """Write results.csv, one curve file per group, and summary.txt.

    Output bytes depend only on the rows, so a re-run over identical rows
    reproduces every file exactly.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    results_path = directory / "results.csv"
    write_results_csv(rows, results_path)
    curve_paths = write_curve_files(rows, directory)
    summary_path = directory / "summary.txt"
    write_summary(rows, summary_path)
    return {"results": [results_path], "curves": curve_paths, "summary": [summary_path]}
