"""Session fixtures: a small corpus plus one tiny local checkpoint per family."""

import json
import os
import sys
from pathlib import Path

import pytest
import torch

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

import transformers

transformers.utils.logging.set_verbosity_error()
transformers.utils.logging.disable_progress_bar()

from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (
    BartConfig,
    BartModel,
    BertConfig,
    BertModel,
    GPT2Config,
    GPT2Model,
    PreTrainedTokenizerFast,
)

from dprobe.cli import main as dprobe_main
from dprobe.pdtb.instances import write_instances
from dprobe.runner.synthetic import synthetic_corpus

REPO_ROOT = Path(__file__).resolve().parents[2]
GOLDEN_DUMP = REPO_ROOT / "tests" / "fixtures" / "golden.dprb"

HIDDEN = 16
DEPTH = 2


def word_tokenizer(words, specials, template=None, unk="[UNK]"):
    """Word-level fast tokenizer over a fixed vocabulary with offsets."""
    vocab = {token: index for index, token in enumerate(specials)}
    for word in sorted(words):
        vocab.setdefault(word, len(vocab))
    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token=unk))
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    if template is not None:
        single, pair_tokens = template
        tokenizer.post_processor = processors.TemplateProcessing(
            single=single,
            special_tokens=[(tok, vocab[tok]) for tok in pair_tokens],
        )
    return tokenizer, vocab


@pytest.fixture(scope="session")
def corpus_instances():
    return synthetic_corpus(seed=9, instances_per_class=8)


@pytest.fixture(scope="session")
def corpus_words(corpus_instances):
    return {word for inst in corpus_instances for word in inst.serialized_text.split()}


@pytest.fixture(scope="session")
def instance_file(tmp_path_factory, corpus_instances):
    path = tmp_path_factory.mktemp("corpus") / "instances.jsonl"
    write_instances(corpus_instances, path)
    return path


def save_checkpoint(directory, model, tokenizer_object, **tokenizer_kwargs):
    directory.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(directory)
    fast = PreTrainedTokenizerFast(tokenizer_object=tokenizer_object, **tokenizer_kwargs)
    fast.save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def bert_checkpoint(tmp_path_factory, corpus_words):
    tokenizer, vocab = word_tokenizer(
        corpus_words,
        specials=("[PAD]", "[UNK]", "[CLS]", "[SEP]"),
        template=("[CLS] $A [SEP]", ("[CLS]", "[SEP]")),
    )
    torch.manual_seed(101)
    model = BertModel(
        BertConfig(
            vocab_size=len(vocab),
            hidden_size=HIDDEN,
            num_hidden_layers=DEPTH,
            num_attention_heads=2,
            intermediate_size=2 * HIDDEN,
            max_position_embeddings=128,
            pad_token_id=0,
        )
    )
    return save_checkpoint(
        tmp_path_factory.mktemp("ckpt") / "tiny-bert",
        model,
        tokenizer,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
    )


@pytest.fixture(scope="session")
def gpt2_checkpoint(tmp_path_factory, corpus_words):
    tokenizer, vocab = word_tokenizer(
        corpus_words, specials=("<|pad|>", "<|unk|>"), unk="<|unk|>"
    )
    torch.manual_seed(202)
    model = GPT2Model(
        GPT2Config(
            vocab_size=len(vocab),
            n_embd=HIDDEN,
            n_layer=DEPTH,
            n_head=2,
            n_positions=128,
            bos_token_id=1,
            eos_token_id=1,
        )
    )
    return save_checkpoint(
        tmp_path_factory.mktemp("ckpt") / "tiny-gpt2",
        model,
        tokenizer,
        unk_token="<|unk|>",
        pad_token="<|pad|>",
    )


@pytest.fixture(scope="session")
def bart_checkpoint(tmp_path_factory, corpus_words):
    tokenizer, vocab = word_tokenizer(
        corpus_words,
        specials=("<s>", "<pad>", "</s>", "<unk>"),
        template=("<s> $A </s>", ("<s>", "</s>")),
        unk="<unk>",
    )
    torch.manual_seed(303)
    model = BartModel(
        BartConfig(
            vocab_size=len(vocab),
            d_model=HIDDEN,
            encoder_layers=DEPTH,
            decoder_layers=DEPTH,
            encoder_attention_heads=2,
            decoder_attention_heads=2,
            encoder_ffn_dim=2 * HIDDEN,
            decoder_ffn_dim=2 * HIDDEN,
            max_position_embeddings=128,
            pad_token_id=1,
            bos_token_id=0,
            eos_token_id=2,
            decoder_start_token_id=2,
        )
    )
    return save_checkpoint(
        tmp_path_factory.mktemp("ckpt") / "tiny-bart",
        model,
        tokenizer,
        unk_token="<unk>",
        pad_token="<pad>",
        bos_token="<s>",
        eos_token="</s>",
    )


def make_handoff(directory, instance_file, model_id, layer_count, hidden_dim):
    """Run the upstream manifest command to produce a real hand-off file."""
    descriptor_path = directory / f"{model_id}.descriptor.json"
    descriptor_path.write_text(
        json.dumps(
            {"model_id": model_id, "layer_count": layer_count, "hidden_dim": hidden_dim}
        ),
        encoding="utf-8",
    )
    manifest_path = directory / f"{model_id}.manifest.json"
    code = dprobe_main(
        [
            "manifest",
            str(instance_file),
            "--model",
            str(descriptor_path),
            "--out",
            str(manifest_path),
        ]
    )
    assert code == 0
    return manifest_path


@pytest.fixture(scope="session")
def bert_handoff(tmp_path_factory, instance_file):
    return make_handoff(
        tmp_path_factory.mktemp("handoff"), instance_file, "tiny-bert", DEPTH, HIDDEN
    )


@pytest.fixture(scope="session")
def gpt2_handoff(tmp_path_factory, instance_file):
    return make_handoff(
        tmp_path_factory.mktemp("handoff"), instance_file, "tiny-gpt2", DEPTH, HIDDEN
    )


@pytest.fixture(scope="session")
def bart_handoff(tmp_path_factory, instance_file):
    return make_handoff(
        tmp_path_factory.mktemp("handoff"), instance_file, "tiny-bart", 2 * DEPTH, HIDDEN
    )
