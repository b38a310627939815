"""Feature-variant construction from layer embeddings.

Four variants of a per-instance feature vector:

    WHOLE_CLS   the classifier-token row
    WHOLE_MEAN  mean over all content tokens
    CON         mean over the connective's tokens (Explicit only)
    ARG         mean over both arguments' tokens, connective tokens excluded
"""

from __future__ import annotations

import enum

import numpy as np

from ..pdtb.instances import DiscourseInstance
from .alignment import content_token_indices, tokens_in_span
from .format import Alignment, DumpManifest


class FeatureError(ValueError):
    pass


class FeatureVariant(enum.Enum):
    WHOLE_CLS = "whole_cls"
    WHOLE_MEAN = "whole_mean"
    CON = "con"
    ARG = "arg"

    def __str__(self) -> str:
        return self.value


def pool_mean(matrix: np.ndarray, token_indices: list[int]) -> np.ndarray:
    """Arithmetic mean over the selected token rows."""
    if not token_indices:
        raise FeatureError("cannot pool over an empty token set")
    rows = matrix[np.asarray(token_indices, dtype=np.intp)]
    return rows.mean(axis=0)


def variant_token_indices(
    instance: DiscourseInstance,
    alignment: Alignment,
    variant: FeatureVariant,
    include_special: bool = False,
) -> list[int]:
    """Token rows feeding each pooled variant (WHOLE_CLS is positional, not here)."""
    if variant is FeatureVariant.WHOLE_MEAN:
        if include_special:
            return list(range(len(alignment)))
        return content_token_indices(alignment)
    if variant is FeatureVariant.CON:
        if instance.connective_char_span is None:
            raise FeatureError(f"instance {instance.id!r} has no connective span for variant CON")
        indices = tokens_in_span(alignment, instance.connective_char_span)
        if not indices:
            raise FeatureError(f"instance {instance.id!r}: connective span covers no tokens")
        return indices
    if variant is FeatureVariant.ARG:
        arg_indices = set(tokens_in_span(alignment, instance.arg1_char_span))
        arg_indices |= set(tokens_in_span(alignment, instance.arg2_char_span))
        if instance.connective_char_span is not None:
            arg_indices -= set(tokens_in_span(alignment, instance.connective_char_span))
        if not arg_indices:
            raise FeatureError(f"instance {instance.id!r}: argument spans cover no tokens")
        return sorted(arg_indices)
    raise FeatureError(f"variant {variant} has no pooled token set")


def feature_vector(
    instance: DiscourseInstance,
    manifest: DumpManifest,
    matrix: np.ndarray,
    alignment: Alignment,
    layer: int,
    variant: FeatureVariant,
    include_special: bool = False,
) -> np.ndarray:
    """Build the feature vector of one instance at a 1-based layer.

    matrix has shape (layer_count, token_count, hidden_dim); validity of the
    (variant, instance, model) combination is checked here.
    """
    if not 1 <= layer <= manifest.layer_count:
        raise FeatureError(f"layer {layer} outside 1..{manifest.layer_count}")
    layer_matrix = matrix[layer - 1]

    if variant is FeatureVariant.WHOLE_CLS:
        if manifest.cls_position is None:
            raise FeatureError(
                f"variant WHOLE_CLS is invalid for model {manifest.model_id!r} without a classifier token"
            )
        if manifest.cls_position >= layer_matrix.shape[0]:
            raise FeatureError(
                f"instance {instance.id!r}: cls_position {manifest.cls_position} outside "
                f"{layer_matrix.shape[0]} token rows"
            )
        return layer_matrix[manifest.cls_position].copy()

    if variant is FeatureVariant.CON and instance.relation_type != "Explicit":
        raise FeatureError(
            f"variant CON is invalid for {instance.relation_type} instance {instance.id!r}"
        )
    indices = variant_token_indices(instance, alignment, variant, include_special=include_special)
    return pool_mean(layer_matrix, indices)
