"""Frozen-checkpoint extraction: hand-off manifest in, dump file out."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adapters import (
    AdapterError,
    instance_matrix,
    layer_states,
    load_checkpoint,
    pad_batch,
    tokenize_instance,
)
from .descriptor import FAMILY_DECODER, POOLING_LAST, POOLING_MEAN, ModelDescriptor
from .dumpio import SENTINEL, read_handoff_manifest, write_dump_file


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class ExtractionRecord:
    instance_id: str
    token_count: int
    truncated: bool


def weights_digest(model) -> str:
    """Order-stable hash of every parameter and buffer tensor."""
    digest = hashlib.sha256()
    state = model.state_dict()
    for name in sorted(state):
        digest.update(name.encode("utf-8"))
        digest.update(np.ascontiguousarray(state[name].cpu().numpy()).tobytes())
    return digest.hexdigest()


def extract(
    manifest_path: str | Path,
    descriptor: ModelDescriptor,
    out_path: str | Path,
    batch_size: int = 8,
    pooling: str = POOLING_MEAN,
) -> list[ExtractionRecord]:
    """Embed every manifest instance at every layer and write the dump.

    A sidecar <out>.extraction.json records, per instance, the stored token
    count and whether the input was truncated to the descriptor's maximum
    length. The checkpoint is verified unchanged (weight hash) afterwards.
    """
    descriptor.validate()
    if pooling not in (POOLING_MEAN, POOLING_LAST):
        raise ExtractionError(f"unknown pooling {pooling!r}")
    if pooling == POOLING_LAST and descriptor.family != FAMILY_DECODER:
        raise ExtractionError(
            f"pooling {POOLING_LAST!r} only applies to {FAMILY_DECODER} checkpoints"
        )
    if batch_size < 1:
        raise ExtractionError(f"batch_size must be >= 1, got {batch_size}")

    model_info, instance_entries = read_handoff_manifest(manifest_path)
    if (model_info["layer_count"], model_info["hidden_dim"]) != (
        descriptor.layer_count,
        descriptor.hidden_dim,
    ):
        raise ExtractionError(
            f"hand-off manifest expects {model_info['layer_count']} layers x "
            f"{model_info['hidden_dim']}, descriptor says "
            f"{descriptor.layer_count} x {descriptor.hidden_dim}"
        )

    model, tokenizer = load_checkpoint(descriptor)
    digest_before = weights_digest(model)

    tokenized = [
        tokenize_instance(tokenizer, entry["id"], entry["text"], descriptor.max_length)
        for entry in sorted(instance_entries, key=lambda e: e["id"])
    ]

    pad_id = tokenizer.pad_token_id if tokenizer.pad_token_id is not None else 0
    synthesize_row = pooling == POOLING_LAST
    matrices: dict[str, np.ndarray] = {}
    alignments: dict[str, tuple] = {}
    for start in range(0, len(tokenized), batch_size):
        batch = tokenized[start : start + batch_size]
        ids, mask = pad_batch(batch, pad_id)
        states = layer_states(descriptor, model, ids, mask)
        for row, item in enumerate(batch):
            matrix = instance_matrix(states, row, len(item.input_ids))
            alignment = item.alignment
            if synthesize_row:
                # Sentence-vector convention for models without a classifier
                # token: replicate the last content token's states as a
                # sentinel-aligned leading row, addressable as a fixed position.
                content = [k for k, span in enumerate(alignment) if span != SENTINEL]
                last = content[-1]
                matrix = np.concatenate([matrix[:, last : last + 1, :], matrix], axis=1)
                alignment = (SENTINEL,) + alignment
            matrices[item.instance_id] = matrix
            alignments[item.instance_id] = alignment

    if descriptor.has_cls or synthesize_row:
        cls_position = 0
    else:
        cls_position = None

    write_dump_file(
        model_id=model_info["model_id"],
        layer_roles=descriptor.layer_roles(),
        cls_position=cls_position,
        matrices=matrices,
        alignments=alignments,
        path=out_path,
    )

    digest_after = weights_digest(model)
    if digest_after != digest_before:
        raise ExtractionError("checkpoint weights changed during extraction")

    records = [
        ExtractionRecord(
            instance_id=item.instance_id,
            token_count=matrices[item.instance_id].shape[1],
            truncated=item.truncated,
        )
        for item in tokenized
    ]
    sidecar = {
        "checkpoint": descriptor.checkpoint,
        "weights_sha256": digest_after,
        "pooling": pooling,
        "batch_size": batch_size,
        "max_length": descriptor.max_length,
        "truncated_count": sum(r.truncated for r in records),
        "instances": [
            {
                "id": r.instance_id,
                "token_count": r.token_count,
                "truncated": r.truncated,
            }
            for r in records
        ],
    }
    Path(f"{out_path}.extraction.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return records
