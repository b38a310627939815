"""Synthetic corpus and dump backend: coverage, consistency, determinism."""

import numpy as np

from dprobe.runner.synthetic import synthetic_corpus, synthetic_dump, whitespace_alignment
from dprobe.store.format import SENTINEL


def test_corpus_covers_all_labels_and_splits():
    instances = synthetic_corpus(seed=0, instances_per_class=10)
    assert len(instances) == 21 * 10
    by_label = {}
    for inst in instances:
        by_label.setdefault(inst.label_index, []).append(inst)
    assert sorted(by_label) == list(range(21))
    for members in by_label.values():
        assert {m.split for m in members} == {"train", "valid", "test"}


def test_corpus_populates_every_relation_type():
    instances = synthetic_corpus(seed=0, instances_per_class=10)
    types = {inst.relation_type for inst in instances}
    assert types == {"Explicit", "Implicit", "AltLex", "EntRel", "NoRel"}
    for inst in instances:
        if inst.relation_type == "Explicit":
            assert inst.connective_char_span is not None
        else:
            assert inst.connective_char_span is None


def test_corpus_ids_unique_and_deterministic():
    a = synthetic_corpus(seed=0, instances_per_class=5)
    b = synthetic_corpus(seed=0, instances_per_class=5)
    assert a == b
    ids = [inst.id for inst in a]
    assert len(set(ids)) == len(ids)
    c = synthetic_corpus(seed=1, instances_per_class=5)
    assert [i.serialized_text for i in a] != [i.serialized_text for i in c]


def test_corpus_instances_validate():
    for inst in synthetic_corpus(seed=0, instances_per_class=5):
        inst.validate()


def test_whitespace_alignment_hand_checked():
    assert whitespace_alignment("ab cde f") == ((0, 2), (3, 6), (7, 8))
    assert whitespace_alignment("ab cde f", leading_sentinels=1, trailing_sentinels=1) == (
        SENTINEL,
        (0, 2),
        (3, 6),
        (7, 8),
        SENTINEL,
    )
    assert whitespace_alignment("x") == ((0, 1),)


def test_alignment_tokens_match_text():
    instances = synthetic_corpus(seed=0, instances_per_class=3)
    for inst in instances[:10]:
        for start, end in whitespace_alignment(inst.serialized_text):
            assert " " not in inst.serialized_text[start:end]
            assert inst.serialized_text[start:end] != ""


def test_dump_shapes_and_alignment_lengths():
    instances = synthetic_corpus(seed=0, instances_per_class=3)
    manifest, matrices, alignments = synthetic_dump(
        instances, layer_count=5, hidden_dim=16, seed=0
    )
    assert manifest.layer_count == 5
    assert manifest.hidden_dim == 16
    assert manifest.cls_position == 0
    for inst in instances:
        matrix = matrices[inst.id]
        assert matrix.shape[0] == 5
        assert matrix.shape[2] == 16
        assert matrix.dtype == np.float32
        assert matrix.shape[1] == len(alignments[inst.id])
        # Leading and trailing sentinel rows around the word tokens.
        assert alignments[inst.id][0] == SENTINEL
        assert alignments[inst.id][-1] == SENTINEL


def test_dump_is_deterministic():
    instances = synthetic_corpus(seed=0, instances_per_class=3)
    _, a, _ = synthetic_dump(instances, layer_count=3, hidden_dim=8, seed=4, planted_layer=2)
    _, b, _ = synthetic_dump(instances, layer_count=3, hidden_dim=8, seed=4, planted_layer=2)
    for key in a:
        np.testing.assert_array_equal(a[key], b[key])


def test_planted_layer_shifts_only_that_layer():
    instances = synthetic_corpus(seed=0, instances_per_class=3)
    _, plain, _ = synthetic_dump(instances, layer_count=3, hidden_dim=8, seed=4)
    _, planted, _ = synthetic_dump(instances, layer_count=3, hidden_dim=8, seed=4, planted_layer=2)
    for key in plain:
        np.testing.assert_array_equal(plain[key][0], planted[key][0])
        np.testing.assert_array_equal(plain[key][2], planted[key][2])
        assert not np.array_equal(plain[key][1], planted[key][1])


def test_planted_shift_is_shared_within_a_class():
    instances = synthetic_corpus(seed=0, instances_per_class=3)
    _, plain, _ = synthetic_dump(instances, layer_count=2, hidden_dim=8, seed=4)
    _, planted, _ = synthetic_dump(instances, layer_count=2, hidden_dim=8, seed=4, planted_layer=1)
    by_label = {}
    for inst in instances:
        shift = (planted[inst.id][0] - plain[inst.id][0])[0]
        by_label.setdefault(inst.label_index, []).append(shift)
    for shifts in by_label.values():
        for shift in shifts[1:]:
            np.testing.assert_allclose(shift, shifts[0], atol=1e-5)
    # Distinct classes get distinct directions.
    first = {label: shifts[0] for label, shifts in by_label.items()}
    assert not np.allclose(first[0], first[1], atol=1e-3)


def test_encoder_decoder_roles_split_the_stack():
    instances = synthetic_corpus(seed=0, instances_per_class=2)
    manifest, _, _ = synthetic_dump(
        instances, layer_count=6, hidden_dim=4, encoder_decoder=True
    )
    assert manifest.layer_roles == ("encoder",) * 3 + ("decoder",) * 3
    manifest.validate()


def test_no_cls_dump_has_no_sentinels():
    instances = synthetic_corpus(seed=0, instances_per_class=2)
    manifest, _, alignments = synthetic_dump(
        instances, layer_count=2, hidden_dim=4, has_cls=False
    )
    assert manifest.cls_position is None
    for alignment in alignments.values():
        assert SENTINEL not in alignment
