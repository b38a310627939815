"""Initialization and freezing plans for translation models built on
pretrained transformers, plus the recorded training configuration.

A plan assigns every parameter group an initialization source (pretrained
weights or random) and a trainable flag; a single-layer variant freezes
everything except one layer's groups.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

SIDE_ENCODER = "encoder"
SIDE_DECODER = "decoder"
SIDE_EMBEDDING = "embedding"
SIDE_HEAD = "head"
SIDES = (SIDE_ENCODER, SIDE_DECODER, SIDE_EMBEDDING, SIDE_HEAD)

INIT_FROM_PLM = "from_plm"
INIT_RANDOM = "random"

STRATEGY_ENCODER = "encoder_init"
STRATEGY_DECODER = "decoder_init"
STRATEGY_SEQ2SEQ = "seq2seq_init"
STRATEGIES = (STRATEGY_ENCODER, STRATEGY_DECODER, STRATEGY_SEQ2SEQ)

# Single layers worth fine-tuning alone: first, middle, last, and the
# layer the probes single out as most discourse-aware.
PROBE_INFORMED_LAYERS = (1, 6, 9, 12)


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class ParamGroup:
    """A named slice of model parameters, e.g. one layer's weights."""

    name: str
    side: str
    layer: int | None = None

    def validate(self) -> None:
        if not self.name:
            raise PlanError("param group has an empty name")
        if self.side not in SIDES:
            raise PlanError(f"group {self.name!r}: unknown side {self.side!r}")
        if self.layer is not None and self.layer < 1:
            raise PlanError(f"group {self.name!r}: layer index {self.layer} must be >= 1")

    def host_side(self) -> str:
        """The stack whose initialization this group follows.

        Layer groups belong to their own side; embedding and head groups
        belong to the stack named by their dotted prefix.
        """
        if self.side in (SIDE_ENCODER, SIDE_DECODER):
            return self.side
        prefix = self.name.split(".", 1)[0]
        if prefix in (SIDE_ENCODER, SIDE_DECODER):
            return prefix
        raise PlanError(
            f"group {self.name!r}: cannot tell encoder from decoder; "
            f"prefix the name with 'encoder.' or 'decoder.'"
        )


@dataclass(frozen=True)
class PlanEntry:
    group: ParamGroup
    init_source: str
    trainable: bool

    def validate(self) -> None:
        self.group.validate()
        if self.init_source not in (INIT_FROM_PLM, INIT_RANDOM):
            raise PlanError(f"group {self.group.name!r}: unknown init source {self.init_source!r}")


@dataclass(frozen=True)
class InitPlan:
    """A total assignment of init source and trainability to every group."""

    entries: tuple[PlanEntry, ...]
    strategy: str
    single_layer: int | None = None

    def validate(self) -> None:
        if self.strategy not in STRATEGIES:
            raise PlanError(f"unknown strategy {self.strategy!r}")
        if not self.entries:
            raise PlanError("plan has no parameter groups")
        names = [entry.group.name for entry in self.entries]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise PlanError(f"duplicate group names: {dupes}")
        for entry in self.entries:
            entry.validate()
        if self.single_layer is not None:
            expected = {e.group.name for e in self.entries if e.group.layer == self.single_layer}
            if not expected:
                raise PlanError(f"single layer {self.single_layer} has no groups")
            actual = {e.group.name for e in self.entries if e.trainable}
            if actual != expected:
                raise PlanError(
                    f"single layer {self.single_layer}: trainable groups {sorted(actual)} "
                    f"differ from that layer's groups {sorted(expected)}"
                )

    def groups(self) -> tuple[ParamGroup, ...]:
        return tuple(entry.group for entry in self.entries)

    def layers(self) -> tuple[int, ...]:
        return tuple(sorted({e.group.layer for e in self.entries if e.group.layer is not None}))

    def entry(self, name: str) -> PlanEntry:
        for candidate in self.entries:
            if candidate.group.name == name:
                return candidate
        raise PlanError(f"no group named {name!r}")

    def trainable_names(self) -> tuple[str, ...]:
        return tuple(e.group.name for e in self.entries if e.trainable)

    def random_names(self) -> tuple[str, ...]:
        return tuple(e.group.name for e in self.entries if e.init_source == INIT_RANDOM)


def seq2seq_architecture(
    encoder_layers: int, decoder_layers: int, continuous_numbering: bool = False
) -> tuple[ParamGroup, ...]:
    """Standard translation-model parameter groups.

    Per-stack numbering gives encoder.layer.1..E and decoder.layer.1..D.
    With ``continuous_numbering`` the decoder continues at E+1, matching
    conventions that count an encoder-decoder's layers straight through.
    """
    if encoder_layers < 1 or decoder_layers < 1:
        raise PlanError("both stacks need at least one layer")
    groups = [
        ParamGroup("encoder.embeddings", SIDE_EMBEDDING),
        ParamGroup("decoder.embeddings", SIDE_EMBEDDING),
    ]
    for i in range(1, encoder_layers + 1):
        groups.append(ParamGroup(f"encoder.layer.{i}", SIDE_ENCODER, i))
    offset = encoder_layers if continuous_numbering else 0
    for i in range(1, decoder_layers + 1):
        groups.append(ParamGroup(f"decoder.layer.{offset + i}", SIDE_DECODER, offset + i))
    groups.append(ParamGroup("decoder.output_head", SIDE_HEAD))
    return tuple(groups)


def make_init_plan(architecture: Sequence[ParamGroup], plm_kind: str) -> InitPlan:
    """Assign pretrained vs random initialization by pretrained-model kind.

    ``encoder`` kind seeds the encoder stack and randomizes the decoder,
    ``decoder`` mirrors that, ``seq2seq`` seeds everything. Every group
    starts trainable.
    """
    strategies = {
        "encoder": STRATEGY_ENCODER,
        "decoder": STRATEGY_DECODER,
        "seq2seq": STRATEGY_SEQ2SEQ,
    }
    if plm_kind not in strategies:
        raise PlanError(f"unknown plm_kind {plm_kind!r}; expected one of {sorted(strategies)}")
    plm_sides = {
        "encoder": {SIDE_ENCODER},
        "decoder": {SIDE_DECODER},
        "seq2seq": {SIDE_ENCODER, SIDE_DECODER},
    }[plm_kind]
    entries = []
    for group in architecture:
        group.validate()
        source = INIT_FROM_PLM if group.host_side() in plm_sides else INIT_RANDOM
        entries.append(PlanEntry(group=group, init_source=source, trainable=True))
    plan = InitPlan(entries=tuple(entries), strategy=strategies[plm_kind])
    plan.validate()
    return plan


def single_layer_plan(plan: InitPlan, layer: int) -> InitPlan:
    """Freeze everything except the given layer's groups.

    Init sources are untouched, so applying this twice with the same layer
    changes nothing.
    """
    plan.validate()
    if layer not in plan.layers():
        raise PlanError(f"layer {layer} not in plan layers {list(plan.layers())}")
    entries = tuple(
        replace(entry, trainable=entry.group.layer == layer) for entry in plan.entries
    )
    narrowed = InitPlan(entries=entries, strategy=plan.strategy, single_layer=layer)
    narrowed.validate()
    return narrowed


def training_config() -> dict:
    """Constants for the downstream trainer; this artifact never trains."""
    return {
        "max_steps": 200000,
        "batch_size": 16,
        "length_penalty": 1,
        "optimizer": "adam",
        "learning_rate": 2e-5,
        "beam_size": 4,
        "dev_sets": ["dev2010"],
        "test_sets": ["tst2010", "tst2011", "tst2012", "tst2013"],
    }


def plan_to_dict(plan: InitPlan) -> dict:
    plan.validate()
    return {
        "strategy": plan.strategy,
        "single_layer": plan.single_layer,
        "groups": [
            {
                "name": e.group.name,
                "side": e.group.side,
                "layer": e.group.layer,
                "init_source": e.init_source,
                "trainable": e.trainable,
            }
            for e in plan.entries
        ],
    }


def write_init_plan(plan: InitPlan, path: Path) -> None:
    text = json.dumps(plan_to_dict(plan), indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_training_config(path: Path) -> None:
    text = json.dumps(training_config(), indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
