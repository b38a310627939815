"""Synthetic corpus and dump backend.

Generates a labeled instance set and matching layer dumps without any real
model or licensed data: every layer holds seeded Gaussian noise, and one
chosen layer can additionally carry a linear class signal (a fixed random
direction per class added to every token row). Probes trained on the
planted layer recover the labels; probes on other layers stay at chance,
which makes the whole pipeline, including best-layer identification,
testable end to end.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..pdtb.instances import DiscourseInstance, build_instance
from ..pdtb.pipe import RawRelation
from ..pdtb.senses import SenseMap, default_sense_map
from ..store.format import SENTINEL, Alignment, DumpManifest
from ..util import stable_seed

_WORDS = (
    "market", "share", "price", "report", "growth", "fund", "deal", "bank",
    "rate", "profit", "board", "plan", "stock", "trade", "value", "index",
)
_CONNECTIVES = ("since", "but", "because", "although", "so", "however")


def _words(rng: np.random.Generator, count: int) -> str:
    return " ".join(_WORDS[i] for i in rng.integers(0, len(_WORDS), size=count))


def synthetic_corpus(
    seed: int = 0,
    instances_per_class: int = 30,
    sense_map: SenseMap | None = None,
) -> list[DiscourseInstance]:
    """Labeled instances over the full 21-class inventory, splits assigned 3:1:1.

    Labels below the EntRel index cycle through Explicit, Implicit, and
    AltLex relations so every subset is populated; the EntRel and NoRel
    labels come from their own relation types.
    """
    sense_map = sense_map or default_sense_map()
    inventory = sense_map.label_inventory
    class_count = len(inventory)
    sense_label_count = class_count - 2
    rtypes = ("Explicit", "Implicit", "AltLex")

    instances = []
    counter = 0
    for label_index in range(class_count):
        for k in range(instances_per_class):
            rng = np.random.default_rng(stable_seed("syn-corpus", seed, label_index, k))
            arg1 = _words(rng, int(rng.integers(3, 7)))
            arg2 = _words(rng, int(rng.integers(3, 7)))

            if label_index == sense_label_count:
                rtype = "EntRel"
            elif label_index == sense_label_count + 1:
                rtype = "NoRel"
            else:
                rtype = rtypes[counter % len(rtypes)]
            sense_paths = (inventory[label_index],) if label_index < sense_label_count else ()

            conn_text = conn_span = altlex_text = altlex_span = None
            if rtype == "Explicit":
                conn_text = _CONNECTIVES[int(rng.integers(0, len(_CONNECTIVES)))]
                conn_span = ((len(arg1) + 1, len(arg1) + 1 + len(conn_text)),)
            arg2_start = len(arg1) + 1 if conn_span is None else conn_span[0][1] + 1
            if rtype == "AltLex":
                altlex_text = arg2.split(" ", 1)[0]
                altlex_span = ((arg2_start, arg2_start + len(altlex_text)),)

            raw = RawRelation(
                doc_id=f"syn_{counter:04d}",
                line_number=1,
                relation_type=rtype,
                arg1_text=arg1,
                arg2_text=arg2,
                arg1_spans=((0, len(arg1)),),
                arg2_spans=((arg2_start, arg2_start + len(arg2)),),
                connective_text=conn_text,
                connective_char_span=conn_span,
                altlex_text=altlex_text,
                altlex_char_span=altlex_span,
                sense_paths=sense_paths,
            )
            split = ("train", "train", "train", "valid", "test")[k % 5]
            instances.append(replace(build_instance(raw, sense_map), split=split))
            counter += 1
    return instances


def whitespace_alignment(text: str, leading_sentinels: int = 0, trailing_sentinels: int = 0) -> Alignment:
    """One token per whitespace-separated word, with optional sentinel rows."""
    intervals: list[tuple[int, int]] = [SENTINEL] * leading_sentinels
    pos = 0
    for word in text.split(" "):
        if word:
            intervals.append((pos, pos + len(word)))
        pos += len(word) + 1
    intervals += [SENTINEL] * trailing_sentinels
    return tuple(intervals)


def synthetic_dump(
    instances: list[DiscourseInstance],
    model_id: str = "synthetic",
    layer_count: int = 12,
    hidden_dim: int = 32,
    has_cls: bool = True,
    encoder_decoder: bool = False,
    seed: int = 0,
    planted_layer: int | None = None,
    signal_scale: float = 3.0,
    class_count: int = 21,
) -> tuple[DumpManifest, dict[str, np.ndarray], dict[str, Alignment]]:
    """Per-instance layer matrices of seeded noise, plus one planted layer.

    The planted layer (1-based, optional) adds a per-class unit direction
    scaled by signal_scale to every token row, classifier row included.
    """
    if planted_layer is not None and not 1 <= planted_layer <= layer_count:
        raise ValueError(f"planted layer {planted_layer} outside 1..{layer_count}")

    if encoder_decoder:
        half = layer_count // 2
        roles = ("encoder",) * half + ("decoder",) * (layer_count - half)
    else:
        roles = ("n/a",) * layer_count
    manifest = DumpManifest(
        model_id=model_id,
        layer_count=layer_count,
        hidden_dim=hidden_dim,
        layer_roles=roles,
        cls_position=0 if has_cls else None,
    )

    dir_rng = np.random.default_rng(stable_seed("syn-directions", seed))
    directions = dir_rng.standard_normal((class_count, hidden_dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)

    matrices: dict[str, np.ndarray] = {}
    alignments: dict[str, Alignment] = {}
    for inst in instances:
        alignment = whitespace_alignment(
            inst.serialized_text,
            leading_sentinels=1 if has_cls else 0,
            trailing_sentinels=1 if has_cls else 0,
        )
        token_count = len(alignment)
        rng = np.random.default_rng(stable_seed("syn-dump", seed, inst.id))
        matrix = rng.standard_normal((layer_count, token_count, hidden_dim)).astype(np.float32)
        if planted_layer is not None:
            matrix[planted_layer - 1] += directions[inst.label_index].astype(np.float32) * signal_scale
        matrices[inst.id] = matrix
        alignments[inst.id] = alignment
    return manifest, matrices, alignments
