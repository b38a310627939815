"""Self-contained dump writing and hand-off manifest reading.

This module implements the documented interchange formats directly rather
than importing the probing package, so either side can be swapped out as
long as the bytes match. The dump layout (magic, length-prefixed sorted-key
JSON manifest, contiguous float32 blocks sorted by instance id) must stay
bit-identical with the reference golden fixture.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"DPRB0001"
SENTINEL = (-1, -1)

Alignment = tuple[tuple[int, int], ...]


class DumpWriteError(ValueError):
    pass


class ManifestError(ValueError):
    pass


def write_dump_file(
    model_id: str,
    layer_roles: tuple[str, ...],
    cls_position: int | None,
    matrices: dict[str, np.ndarray],
    alignments: dict[str, Alignment],
    path: str | Path,
) -> None:
    """Write one dump: every matrix is (layer_count, token_count, hidden_dim)."""
    if not matrices:
        raise DumpWriteError("no instances to write")
    if set(matrices) != set(alignments):
        raise DumpWriteError("matrices and alignments cover different instance sets")
    layer_count = len(layer_roles)

    hidden_dims = {m.shape[2] for m in matrices.values()}
    if len(hidden_dims) != 1:
        raise DumpWriteError(f"inconsistent hidden dims {sorted(hidden_dims)}")
    (hidden_dim,) = hidden_dims

    entries = []
    blocks = []
    offset = 0
    for instance_id in sorted(matrices):
        matrix = np.ascontiguousarray(matrices[instance_id], dtype="<f4")
        if matrix.ndim != 3 or matrix.shape[0] != layer_count:
            raise DumpWriteError(
                f"instance {instance_id!r}: shape {matrix.shape} does not hold "
                f"{layer_count} layer matrices"
            )
        if not np.isfinite(matrix).all():
            raise DumpWriteError(f"instance {instance_id!r}: non-finite values")
        token_count = matrix.shape[1]
        alignment = alignments[instance_id]
        if len(alignment) != token_count:
            raise DumpWriteError(
                f"instance {instance_id!r}: {token_count} token rows but "
                f"{len(alignment)} alignment entries"
            )
        entries.append(
            {
                "alignment": [list(span) for span in alignment],
                "id": instance_id,
                "offset": offset,
                "token_count": token_count,
            }
        )
        blocks.append(matrix.tobytes())
        offset += len(blocks[-1])

    payload = {
        "cls_position": cls_position,
        "hidden_dim": hidden_dim,
        "instances": entries,
        "layer_count": layer_count,
        "layer_roles": list(layer_roles),
        "model_id": model_id,
    }
    manifest = json.dumps(
        payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")

    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<Q", len(manifest)))
        handle.write(manifest)
        for block in blocks:
            handle.write(block)


def read_dump_index(path: str | Path) -> dict:
    """Read just the manifest of a dump and check the data-section size.

    Returns the manifest payload dict; alignment entries come back as lists.
    """
    raw = Path(path).read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise DumpWriteError(f"bad magic in {path}")
    (manifest_len,) = struct.unpack_from("<Q", raw, len(MAGIC))
    base = len(MAGIC) + 8 + manifest_len
    payload = json.loads(raw[len(MAGIC) + 8 : base].decode("utf-8"))
    expected = sum(
        payload["layer_count"] * e["token_count"] * payload["hidden_dim"] * 4
        for e in payload["instances"]
    )
    if len(raw) - base != expected:
        raise DumpWriteError(
            f"data section holds {len(raw) - base} bytes, manifest implies {expected}"
        )
    return payload


def read_handoff_manifest(path: str | Path) -> tuple[dict, list[dict]]:
    """Read the hand-off manifest listing the model and instances to embed."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != "DPRB0001":
        raise ManifestError(f"{path} is not a DPRB0001 hand-off manifest")
    model = payload.get("model")
    instances = payload.get("instances")
    if not isinstance(model, dict) or not isinstance(instances, list):
        raise ManifestError(f"{path} lacks model/instances sections")
    for key in ("model_id", "layer_count", "hidden_dim"):
        if key not in model:
            raise ManifestError(f"manifest model section lacks {key!r}")
    seen = set()
    for entry in instances:
        if "id" not in entry or "text" not in entry:
            raise ManifestError("manifest instance lacks id/text")
        if entry["id"] in seen:
            raise ManifestError(f"duplicate instance id {entry['id']!r}")
        seen.add(entry["id"])
    return model, instances


def read_instance_file(path: str | Path) -> list[dict]:
    """Read the instance file format: one JSON object per line."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records
