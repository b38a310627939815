"""Binary layer-embedding dump format.

Layout (all integers little-endian):

    bytes 0..8    magic "DPRB0001" (4-byte tag + 4-byte format version)
    bytes 8..16   uint64 manifest byte length N
    bytes 16..16+N  manifest: UTF-8 JSON, sorted keys
    bytes 16+N..  data section: one block per instance at the
                  manifest-recorded offset (relative to the data section),
                  holding layer_count contiguous matrices of
                  token_count x hidden_dim float32 values, row-major

The manifest records model metadata, per-layer roles, the optional
classifier-token position, and per instance its data offset, token count,
and token-to-character alignment. ``docs/dump_format.md`` and the golden
fixture under ``tests/fixtures`` pin the layout bit-exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"DPRB0001"
HEADER_SIZE = 16

LAYER_ROLES = ("encoder", "decoder", "n/a")

Alignment = tuple[tuple[int, int], ...]
SENTINEL = (-1, -1)


class DumpFormatError(ValueError):
    """Corrupt, truncated, or inconsistent dump; carries the failure offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class InstanceEntry:
    instance_id: str
    offset: int
    token_count: int


@dataclass(frozen=True)
class DumpManifest:
    model_id: str
    layer_count: int
    hidden_dim: int
    layer_roles: tuple[str, ...]
    cls_position: int | None = None
    instances: tuple[InstanceEntry, ...] = field(default_factory=tuple)

    def validate(self) -> None:
        if self.layer_count <= 0 or self.hidden_dim <= 0:
            raise DumpFormatError("layer_count and hidden_dim must be positive")
        if len(self.layer_roles) != self.layer_count:
            raise DumpFormatError(
                f"{len(self.layer_roles)} layer roles for {self.layer_count} layers"
            )
        for role in self.layer_roles:
            if role not in LAYER_ROLES:
                raise DumpFormatError(f"unknown layer role {role!r}")
        if "encoder" in self.layer_roles and "decoder" in self.layer_roles:
            # Encoder-decoder convention: layers 1..E encoder, E+1..L decoder.
            boundary = self.layer_roles.index("decoder")
            expected = ("encoder",) * boundary + ("decoder",) * (self.layer_count - boundary)
            if self.layer_roles != expected:
                raise DumpFormatError("encoder layers must precede decoder layers")
        if self.cls_position is not None and self.cls_position < 0:
            raise DumpFormatError(f"negative cls_position {self.cls_position}")

    def layer_role(self, layer: int) -> str:
        """Role of a 1-based layer index."""
        if not 1 <= layer <= self.layer_count:
            raise DumpFormatError(f"layer {layer} outside 1..{self.layer_count}")
        return self.layer_roles[layer - 1]


def _validate_alignment(instance_id: str, alignment: Alignment, token_count: int) -> None:
    if len(alignment) != token_count:
        raise DumpFormatError(
            f"instance {instance_id!r}: {token_count} token rows but {len(alignment)} alignment entries"
        )
    last_start = -1
    for start, end in alignment:
        if (start, end) == SENTINEL:
            continue
        if start < 0 or start >= end:
            raise DumpFormatError(f"instance {instance_id!r}: bad token interval ({start}, {end})")
        if start < last_start:
            raise DumpFormatError(f"instance {instance_id!r}: token intervals not ordered by start")
        last_start = start


def write_dump(
    manifest: DumpManifest,
    matrices: dict[str, np.ndarray],
    alignments: dict[str, Alignment],
    path: str | Path,
) -> None:
    """Write a dump file; the instance index is (re)computed from the matrices.

    Each matrix must have shape (layer_count, token_count, hidden_dim) and
    finite values; instances are laid out sorted by id.
    """
    manifest.validate()
    if set(matrices) != set(alignments):
        raise DumpFormatError("matrices and alignments cover different instance sets")

    entries = []
    blocks = []
    offset = 0
    for instance_id in sorted(matrices):
        matrix = np.ascontiguousarray(matrices[instance_id], dtype="<f4")
        if matrix.ndim != 3 or matrix.shape[0] != manifest.layer_count or matrix.shape[2] != manifest.hidden_dim:
            raise DumpFormatError(
                f"instance {instance_id!r}: matrix shape {matrix.shape} does not match "
                f"(layers={manifest.layer_count}, hidden={manifest.hidden_dim})"
            )
        if not np.isfinite(matrix).all():
            raise DumpFormatError(f"instance {instance_id!r}: non-finite values")
        token_count = matrix.shape[1]
        _validate_alignment(instance_id, alignments[instance_id], token_count)
        entries.append((instance_id, offset, token_count))
        blocks.append(matrix.tobytes())
        offset += len(blocks[-1])

    payload = {
        "model_id": manifest.model_id,
        "layer_count": manifest.layer_count,
        "hidden_dim": manifest.hidden_dim,
        "layer_roles": list(manifest.layer_roles),
        "cls_position": manifest.cls_position,
        "instances": [
            {
                "id": instance_id,
                "offset": off,
                "token_count": tc,
                "alignment": [list(iv) for iv in alignments[instance_id]],
            }
            for instance_id, off, tc in entries
        ],
    }
    manifest_bytes = json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8")

    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(manifest_bytes)))
        f.write(manifest_bytes)
        for block in blocks:
            f.write(block)


def read_dump(path: str | Path) -> tuple[DumpManifest, dict[str, np.ndarray], dict[str, Alignment]]:
    """Read and fully validate a dump file.

    Any truncation, bad magic, or manifest/data inconsistency raises
    DumpFormatError naming the failure offset.
    """
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC):
        raise DumpFormatError(f"file of {len(raw)} bytes is shorter than the magic", offset=len(raw))
    if raw[: len(MAGIC)] != MAGIC:
        raise DumpFormatError(f"bad magic {raw[:len(MAGIC)]!r}", offset=0)
    if len(raw) < HEADER_SIZE:
        raise DumpFormatError("truncated before manifest length field", offset=len(raw))
    (manifest_len,) = struct.unpack_from("<Q", raw, len(MAGIC))
    data_base = HEADER_SIZE + manifest_len
    if len(raw) < data_base:
        raise DumpFormatError(
            f"manifest of {manifest_len} bytes truncated", offset=len(raw)
        )
    try:
        payload = json.loads(raw[HEADER_SIZE:data_base].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DumpFormatError(f"manifest is not valid JSON: {exc}", offset=HEADER_SIZE) from None

    try:
        manifest = DumpManifest(
            model_id=payload["model_id"],
            layer_count=payload["layer_count"],
            hidden_dim=payload["hidden_dim"],
            layer_roles=tuple(payload["layer_roles"]),
            cls_position=payload["cls_position"],
            instances=tuple(
                InstanceEntry(instance_id=e["id"], offset=e["offset"], token_count=e["token_count"])
                for e in payload["instances"]
            ),
        )
    except (KeyError, TypeError) as exc:
        raise DumpFormatError(f"manifest missing field: {exc}", offset=HEADER_SIZE) from None
    manifest.validate()

    item_size = 4
    matrices: dict[str, np.ndarray] = {}
    alignments: dict[str, Alignment] = {}
    for entry, raw_entry in zip(manifest.instances, payload["instances"]):
        alignment = tuple((int(s), int(e)) for s, e in raw_entry["alignment"])
        _validate_alignment(entry.instance_id, alignment, entry.token_count)
        nbytes = manifest.layer_count * entry.token_count * manifest.hidden_dim * item_size
        start = data_base + entry.offset
        end = start + nbytes
        if end > len(raw):
            raise DumpFormatError(
                f"instance {entry.instance_id!r}: data block ends at {end} beyond file size",
                offset=len(raw),
            )
        matrix = np.frombuffer(raw[start:end], dtype="<f4").reshape(
            manifest.layer_count, entry.token_count, manifest.hidden_dim
        )
        if not np.isfinite(matrix).all():
            raise DumpFormatError(f"instance {entry.instance_id!r}: non-finite values", offset=start)
        matrices[entry.instance_id] = matrix
        alignments[entry.instance_id] = alignment
    return manifest, matrices, alignments
