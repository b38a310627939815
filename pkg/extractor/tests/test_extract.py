"""Extraction behavior per family: shapes, determinism, frozen weights."""

import json

import numpy as np
import pytest
import torch
from transformers import AutoConfig, AutoModel, AutoTokenizer

from dprobe.store.format import SENTINEL, read_dump
from dprobe_extractor.adapters import AdapterError
from dprobe_extractor.descriptor import (
    FAMILY_DECODER,
    FAMILY_ENCODER,
    FAMILY_SEQ2SEQ,
    POOLING_LAST,
    ModelDescriptor,
    descriptor_from_config,
)
from dprobe_extractor.extract import ExtractionError, extract, weights_digest

from conftest import DEPTH, HIDDEN, make_handoff


def make_descriptor(checkpoint, max_length=64):
    config = AutoConfig.from_pretrained(checkpoint)
    return descriptor_from_config(str(checkpoint), config, max_length=max_length)


@pytest.fixture(scope="module")
def bert_dump(tmp_path_factory, bert_checkpoint, bert_handoff):
    out = tmp_path_factory.mktemp("dump") / "bert.dprb"
    records = extract(bert_handoff, make_descriptor(bert_checkpoint), out)
    return out, records


@pytest.fixture(scope="module")
def gpt2_dump(tmp_path_factory, gpt2_checkpoint, gpt2_handoff):
    out = tmp_path_factory.mktemp("dump") / "gpt2.dprb"
    records = extract(gpt2_handoff, make_descriptor(gpt2_checkpoint), out)
    return out, records


@pytest.fixture(scope="module")
def bart_dump(tmp_path_factory, bart_checkpoint, bart_handoff):
    out = tmp_path_factory.mktemp("dump") / "bart.dprb"
    records = extract(bart_handoff, make_descriptor(bart_checkpoint), out)
    return out, records


def test_descriptor_inference_per_family(bert_checkpoint, gpt2_checkpoint, bart_checkpoint):
    bert = make_descriptor(bert_checkpoint)
    assert (bert.family, bert.layer_count, bert.hidden_dim) == (FAMILY_ENCODER, DEPTH, HIDDEN)
    assert bert.has_cls

    gpt2 = make_descriptor(gpt2_checkpoint)
    assert (gpt2.family, gpt2.layer_count) == (FAMILY_DECODER, DEPTH)
    assert not gpt2.has_cls

    bart = make_descriptor(bart_checkpoint)
    assert (bart.family, bart.layer_count, bart.encoder_layers) == (
        FAMILY_SEQ2SEQ,
        2 * DEPTH,
        DEPTH,
    )
    assert bart.layer_roles() == ("encoder",) * DEPTH + ("decoder",) * DEPTH


def test_dump_dimensions_match_descriptor(bert_dump, corpus_instances):
    manifest, matrices, alignments = read_dump(bert_dump[0])
    assert manifest.layer_count == DEPTH
    assert manifest.hidden_dim == HIDDEN
    assert manifest.layer_roles == ("encoder",) * DEPTH
    assert manifest.cls_position == 0
    assert manifest.model_id == "tiny-bert"
    assert set(matrices) == {inst.id for inst in corpus_instances}
    for instance_id, alignment in alignments.items():
        assert alignment[0] == SENTINEL  # classifier token
        assert alignment[-1] == SENTINEL  # closing separator
        assert matrices[instance_id].shape[0] == DEPTH


def test_no_truncation_on_short_corpus(bert_dump):
    _, records = bert_dump
    assert records
    assert not any(r.truncated for r in records)


def test_re_extraction_is_byte_identical(tmp_path, bert_checkpoint, bert_handoff, bert_dump):
    again = tmp_path / "again.dprb"
    extract(bert_handoff, make_descriptor(bert_checkpoint), again)
    assert again.read_bytes() == bert_dump[0].read_bytes()


def test_weights_unchanged_by_extraction(tmp_path, bert_checkpoint, bert_handoff):
    model = AutoModel.from_pretrained(bert_checkpoint)
    before = weights_digest(model)
    extract(bert_handoff, make_descriptor(bert_checkpoint), tmp_path / "w.dprb")
    model_after = AutoModel.from_pretrained(bert_checkpoint)
    assert weights_digest(model_after) == before
    sidecar = json.loads((tmp_path / "w.dprb.extraction.json").read_text(encoding="utf-8"))
    assert sidecar["weights_sha256"] == before


def test_classifier_rows_match_direct_inference(
    tmp_path, bert_checkpoint, bert_handoff, bert_dump, corpus_instances
):
    manifest, matrices, _ = read_dump(bert_dump[0])
    model = AutoModel.from_pretrained(bert_checkpoint).eval().float()
    tokenizer = AutoTokenizer.from_pretrained(bert_checkpoint)
    sample = sorted(inst.id for inst in corpus_instances)[:5]
    by_id = {inst.id: inst for inst in corpus_instances}
    for instance_id in sample:
        encoded = tokenizer(by_id[instance_id].serialized_text, return_tensors="pt")
        with torch.no_grad():
            out = model(**encoded, output_hidden_states=True)
        for layer in range(1, DEPTH + 1):
            expected = out.hidden_states[layer][0, manifest.cls_position].numpy()
            stored = matrices[instance_id][layer - 1, manifest.cls_position]
            np.testing.assert_allclose(stored, expected, rtol=1e-5, atol=1e-5)

    # With batch size 1 the padded batch path degenerates to direct
    # inference, so the stored rows must be bit-equal.
    single = tmp_path / "single.dprb"
    extract(bert_handoff, make_descriptor(bert_checkpoint), single, batch_size=1)
    _, single_matrices, _ = read_dump(single)
    for instance_id in sample:
        encoded = tokenizer(by_id[instance_id].serialized_text, return_tensors="pt")
        with torch.no_grad():
            out = model(**encoded, output_hidden_states=True)
        for layer in range(1, DEPTH + 1):
            expected = out.hidden_states[layer][0].numpy().astype(np.float32)
            np.testing.assert_array_equal(single_matrices[instance_id][layer - 1], expected)


def test_truncation_flagged_and_bounded(tmp_path, bert_checkpoint, bert_handoff):
    out = tmp_path / "short.dprb"
    records = extract(bert_handoff, make_descriptor(bert_checkpoint, max_length=6), out)
    truncated = [r for r in records if r.truncated]
    assert truncated
    assert all(r.token_count <= 6 for r in records)
    sidecar = json.loads((tmp_path / "short.dprb.extraction.json").read_text(encoding="utf-8"))
    assert sidecar["truncated_count"] == len(truncated)
    manifest, _, _ = read_dump(out)
    assert manifest.layer_count == DEPTH


def test_descriptor_checkpoint_mismatch_aborts(tmp_path, bert_checkpoint, instance_file):
    # Manifest and descriptor agree on (wrong) dims, so the abort must come
    # from the checkpoint cross-check.
    handoff = make_handoff(tmp_path, instance_file, "wide-bert", DEPTH, HIDDEN * 2)
    wrong = ModelDescriptor(
        checkpoint=str(bert_checkpoint),
        family=FAMILY_ENCODER,
        layer_count=DEPTH,
        hidden_dim=HIDDEN * 2,
        has_cls=True,
        max_length=64,
    )
    with pytest.raises(AdapterError):
        extract(handoff, wrong, tmp_path / "x.dprb")


def test_handoff_descriptor_mismatch_aborts(tmp_path, bert_checkpoint, gpt2_handoff):
    # The hand-off manifest pins the expected dims; a descriptor that
    # disagrees must fail before any inference happens.
    mismatched = ModelDescriptor(
        checkpoint=str(bert_checkpoint),
        family=FAMILY_ENCODER,
        layer_count=DEPTH + 1,
        hidden_dim=HIDDEN,
        has_cls=True,
        max_length=64,
    )
    with pytest.raises(ExtractionError):
        extract(gpt2_handoff, mismatched, tmp_path / "x.dprb")


def test_decoder_dump_defaults_to_no_classifier_row(gpt2_dump):
    manifest, matrices, alignments = read_dump(gpt2_dump[0])
    assert manifest.cls_position is None
    assert manifest.layer_roles == ("decoder",) * DEPTH
    for alignment in alignments.values():
        assert SENTINEL not in alignment  # no special tokens at all


def test_decoder_last_token_pooling_adds_positional_row(
    tmp_path, gpt2_checkpoint, gpt2_handoff, gpt2_dump
):
    out = tmp_path / "last.dprb"
    extract(gpt2_handoff, make_descriptor(gpt2_checkpoint), out, pooling=POOLING_LAST)
    manifest, matrices, alignments = read_dump(out)
    assert manifest.cls_position == 0
    _, plain_matrices, plain_alignments = read_dump(gpt2_dump[0])
    for instance_id, matrix in matrices.items():
        plain = plain_matrices[instance_id]
        assert matrix.shape[1] == plain.shape[1] + 1
        assert alignments[instance_id][0] == SENTINEL
        assert alignments[instance_id][1:] == plain_alignments[instance_id]
        np.testing.assert_array_equal(matrix[:, 0, :], plain[:, -1, :])
        np.testing.assert_array_equal(matrix[:, 1:, :], plain)


def test_last_token_pooling_rejected_outside_decoder_family(
    tmp_path, bert_checkpoint, bert_handoff
):
    with pytest.raises(ExtractionError):
        extract(
            bert_handoff,
            make_descriptor(bert_checkpoint),
            tmp_path / "x.dprb",
            pooling=POOLING_LAST,
        )


def test_seq2seq_dump_stacks_both_sides(bart_dump, bart_checkpoint, corpus_instances):
    manifest, matrices, _ = read_dump(bart_dump[0])
    assert manifest.layer_count == 2 * DEPTH
    assert manifest.layer_roles == ("encoder",) * DEPTH + ("decoder",) * DEPTH
    assert manifest.cls_position == 0

    model = AutoModel.from_pretrained(bart_checkpoint).eval().float()
    tokenizer = AutoTokenizer.from_pretrained(bart_checkpoint)
    from transformers.models.bart.modeling_bart import shift_tokens_right

    instance = min(corpus_instances, key=lambda inst: inst.id)
    encoded = tokenizer(instance.serialized_text, return_tensors="pt")
    decoder_input_ids = shift_tokens_right(
        encoded["input_ids"], model.config.pad_token_id, model.config.decoder_start_token_id
    )
    with torch.no_grad():
        out = model(
            input_ids=encoded["input_ids"],
            attention_mask=encoded["attention_mask"],
            decoder_input_ids=decoder_input_ids,
            output_hidden_states=True,
        )
    stored = matrices[instance.id]
    for layer in range(1, DEPTH + 1):
        np.testing.assert_allclose(
            stored[layer - 1],
            out.encoder_hidden_states[layer][0].numpy(),
            rtol=1e-5,
            atol=1e-5,
        )
        np.testing.assert_allclose(
            stored[DEPTH + layer - 1],
            out.decoder_hidden_states[layer][0].numpy(),
            rtol=1e-5,
            atol=1e-5,
        )
