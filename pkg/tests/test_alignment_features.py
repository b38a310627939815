"""Span-to-token queries and feature pooling against hand-enumerated oracles."""

import numpy as np
import pytest

from dprobe.pdtb.instances import DiscourseInstance
from dprobe.store.alignment import content_token_indices, is_sentinel, tokens_in_span
from dprobe.store.features import (
    FeatureError,
    FeatureVariant,
    feature_vector,
    pool_mean,
    variant_token_indices,
)
from dprobe.store.format import SENTINEL, DumpManifest

# Text:    "ab cde f"
# Tokens:  [CLS]=sentinel, "ab"(0,2), "cd"(3,5), "e"(5,6), "f"(7,8), [EOS]=sentinel
ALIGNMENT = (SENTINEL, (0, 2), (3, 5), (5, 6), (7, 8), SENTINEL)


def test_sentinel_detection():
    assert is_sentinel(SENTINEL)
    assert not is_sentinel((0, 1))


def test_content_tokens_skip_sentinels():
    assert content_token_indices(ALIGNMENT) == [1, 2, 3, 4]


def test_tokens_in_span_hand_enumerated():
    # Whole text: every content token.
    assert tokens_in_span(ALIGNMENT, (0, 8)) == [1, 2, 3, 4]
    # Only "ab".
    assert tokens_in_span(ALIGNMENT, (0, 2)) == [1]
    # "cd" and "e" both intersect (3, 6).
    assert tokens_in_span(ALIGNMENT, (3, 6)) == [2, 3]
    # Query ending at a token start does not include it.
    assert tokens_in_span(ALIGNMENT, (0, 3)) == [1]
    # Query starting at a token end does not include it.
    assert tokens_in_span(ALIGNMENT, (2, 3)) == []
    # Partial overlap counts: (1, 4) clips into "ab" and "cd".
    assert tokens_in_span(ALIGNMENT, (1, 4)) == [1, 2]
    # The gap character at offset 6 hits nothing.
    assert tokens_in_span(ALIGNMENT, (6, 7)) == []


def test_subword_straddling_boundary_is_kept():
    # One token (0, 4) straddles the span edge (2, 6): intersection keeps it.
    alignment = ((0, 4), (4, 6))
    assert tokens_in_span(alignment, (2, 6)) == [0, 1]


def test_pool_mean_hand_computed():
    matrix = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    np.testing.assert_allclose(pool_mean(matrix, [0, 2]), [3.0, 4.0])
    np.testing.assert_allclose(pool_mean(matrix, [1]), [3.0, 4.0])


def test_pool_mean_empty_set_rejected():
    with pytest.raises(FeatureError):
        pool_mean(np.zeros((2, 2)), [])


def explicit_instance() -> DiscourseInstance:
    # "ab cde f": arg1 "ab" (0,2), connective "cde" (3,6), arg2 "f" (7,8).
    return DiscourseInstance(
        id="doc:1",
        serialized_text="ab cde f",
        arg1_char_span=(0, 2),
        arg2_char_span=(7, 8),
        relation_type="Explicit",
        label="Comparison.Contrast",
        label_index=8,
        connective_char_span=(3, 6),
    )


def implicit_instance() -> DiscourseInstance:
    return DiscourseInstance(
        id="doc:2",
        serialized_text="ab cde f",
        arg1_char_span=(0, 5),
        arg2_char_span=(6, 8),
        relation_type="Implicit",
        label="Expansion.Conjunction",
        label_index=12,
    )


def test_variant_token_sets_on_explicit():
    inst = explicit_instance()
    assert variant_token_indices(inst, ALIGNMENT, FeatureVariant.WHOLE_MEAN) == [1, 2, 3, 4]
    # Connective "cde" covers tokens "cd" and "e".
    assert variant_token_indices(inst, ALIGNMENT, FeatureVariant.CON) == [2, 3]
    # Arguments: "ab" plus "f"; connective tokens excluded.
    assert variant_token_indices(inst, ALIGNMENT, FeatureVariant.ARG) == [1, 4]


def test_con_and_arg_are_disjoint_on_explicit():
    inst = explicit_instance()
    con = set(variant_token_indices(inst, ALIGNMENT, FeatureVariant.CON))
    arg = set(variant_token_indices(inst, ALIGNMENT, FeatureVariant.ARG))
    assert con.isdisjoint(arg)


def test_con_without_connective_span_rejected():
    with pytest.raises(FeatureError):
        variant_token_indices(implicit_instance(), ALIGNMENT, FeatureVariant.CON)


def test_whole_mean_with_special_tokens_included():
    inst = explicit_instance()
    indices = variant_token_indices(inst, ALIGNMENT, FeatureVariant.WHOLE_MEAN, include_special=True)
    assert indices == [0, 1, 2, 3, 4, 5]


def manifest_and_matrix():
    manifest = DumpManifest(
        model_id="toy",
        layer_count=2,
        hidden_dim=2,
        layer_roles=("n/a", "n/a"),
        cls_position=0,
    )
    # Layer 1 rows are [k, k] for token k; layer 2 rows are [10k, 10k].
    base = np.arange(6, dtype=np.float32)[:, None].repeat(2, axis=1)
    matrix = np.stack([base, base * 10.0])
    return manifest, matrix


def test_feature_vector_whole_cls_is_positional_row():
    manifest, matrix = manifest_and_matrix()
    vec = feature_vector(explicit_instance(), manifest, matrix, ALIGNMENT, 1, FeatureVariant.WHOLE_CLS)
    np.testing.assert_allclose(vec, [0.0, 0.0])
    vec2 = feature_vector(explicit_instance(), manifest, matrix, ALIGNMENT, 2, FeatureVariant.WHOLE_CLS)
    np.testing.assert_allclose(vec2, [0.0, 0.0])


def test_feature_vector_layer_indexing_is_one_based():
    manifest, matrix = manifest_and_matrix()
    inst = explicit_instance()
    # CON tokens are rows 2 and 3: layer-1 mean 2.5, layer-2 mean 25.
    v1 = feature_vector(inst, manifest, matrix, ALIGNMENT, 1, FeatureVariant.CON)
    v2 = feature_vector(inst, manifest, matrix, ALIGNMENT, 2, FeatureVariant.CON)
    np.testing.assert_allclose(v1, [2.5, 2.5])
    np.testing.assert_allclose(v2, [25.0, 25.0])
    with pytest.raises(FeatureError):
        feature_vector(inst, manifest, matrix, ALIGNMENT, 0, FeatureVariant.CON)
    with pytest.raises(FeatureError):
        feature_vector(inst, manifest, matrix, ALIGNMENT, 3, FeatureVariant.CON)


def test_feature_vector_whole_mean_excludes_sentinels():
    manifest, matrix = manifest_and_matrix()
    vec = feature_vector(
        implicit_instance(), manifest, matrix, ALIGNMENT, 1, FeatureVariant.WHOLE_MEAN
    )
    # Content rows 1..4 have values 1,2,3,4: mean 2.5.
    np.testing.assert_allclose(vec, [2.5, 2.5])


def test_whole_cls_requires_classifier_token():
    manifest, matrix = manifest_and_matrix()
    no_cls = DumpManifest(
        model_id="gpt", layer_count=2, hidden_dim=2, layer_roles=("n/a", "n/a"), cls_position=None
    )
    with pytest.raises(FeatureError):
        feature_vector(explicit_instance(), no_cls, matrix, ALIGNMENT, 1, FeatureVariant.WHOLE_CLS)


def test_con_feature_requires_explicit_instance():
    manifest, matrix = manifest_and_matrix()
    with pytest.raises(FeatureError):
        feature_vector(implicit_instance(), manifest, matrix, ALIGNMENT, 1, FeatureVariant.CON)


def test_arg_feature_on_implicit_uses_both_arguments():
    manifest, matrix = manifest_and_matrix()
    vec = feature_vector(implicit_instance(), manifest, matrix, ALIGNMENT, 1, FeatureVariant.ARG)
    # arg1 (0,5) hits tokens 1,2; arg2 (6,8) hits token 4: mean of 1,2,4.
    np.testing.assert_allclose(vec, [7.0 / 3.0, 7.0 / 3.0])
