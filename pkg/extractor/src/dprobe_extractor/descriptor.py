"""Checkpoint descriptors: family, depth, width, and dump conventions."""

from __future__ import annotations

from dataclasses import dataclass

FAMILY_ENCODER = "bidirectional-encoder"
FAMILY_DECODER = "autoregressive-decoder"
FAMILY_SEQ2SEQ = "encoder-decoder"
FAMILIES = (FAMILY_ENCODER, FAMILY_DECODER, FAMILY_SEQ2SEQ)

POOLING_MEAN = "mean"
POOLING_LAST = "last"

# config.json model_type values this extractor knows how to drive.
MODEL_TYPE_FAMILIES = {
    "bert": FAMILY_ENCODER,
    "gpt2": FAMILY_DECODER,
    "bart": FAMILY_SEQ2SEQ,
}


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class ModelDescriptor:
    """What the extractor needs to know about one checkpoint.

    layer_count covers every probed layer; for an encoder-decoder model it
    is the sum of both stacks and encoder_layers records the split point.
    Embedding-table outputs (the layer-0 hidden state) are never dumped.
    """

    checkpoint: str
    family: str
    layer_count: int
    hidden_dim: int
    has_cls: bool
    max_length: int
    encoder_layers: int | None = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise DescriptorError(f"unknown family {self.family!r}")
        if self.layer_count <= 0 or self.hidden_dim <= 0:
            raise DescriptorError("layer_count and hidden_dim must be positive")
        if self.max_length <= 0:
            raise DescriptorError("max_length must be positive")
        if self.family == FAMILY_SEQ2SEQ:
            if self.encoder_layers is None or not 0 < self.encoder_layers < self.layer_count:
                raise DescriptorError(
                    f"encoder-decoder checkpoint needs encoder_layers strictly inside "
                    f"1..{self.layer_count - 1}, got {self.encoder_layers}"
                )
        elif self.encoder_layers is not None:
            raise DescriptorError(f"{self.family} checkpoint cannot set encoder_layers")
        if self.family == FAMILY_DECODER and self.has_cls:
            raise DescriptorError("autoregressive checkpoints have no classifier token")

    def layer_roles(self) -> tuple[str, ...]:
        """Dump role labels: encoder stack first, then decoder stack."""
        self.validate()
        if self.family == FAMILY_ENCODER:
            return ("encoder",) * self.layer_count
        if self.family == FAMILY_DECODER:
            return ("decoder",) * self.layer_count
        return ("encoder",) * self.encoder_layers + ("decoder",) * (
            self.layer_count - self.encoder_layers
        )


def descriptor_from_config(checkpoint: str, config, family: str | None = None,
                           max_length: int | None = None) -> ModelDescriptor:
    """Build a descriptor from a loaded checkpoint config.

    family is inferred from config.model_type unless given; max_length
    defaults to the checkpoint's position budget.
    """
    model_type = getattr(config, "model_type", None)
    if family is None:
        if model_type not in MODEL_TYPE_FAMILIES:
            raise DescriptorError(
                f"cannot infer a family from model_type {model_type!r}; pass one of {FAMILIES}"
            )
        family = MODEL_TYPE_FAMILIES[model_type]
    if family not in FAMILIES:
        raise DescriptorError(f"unknown family {family!r}")

    try:
        if family == FAMILY_ENCODER:
            layer_count = config.num_hidden_layers
            hidden_dim = config.hidden_size
            positions = config.max_position_embeddings
            encoder_layers = None
            has_cls = True
        elif family == FAMILY_DECODER:
            layer_count = config.n_layer
            hidden_dim = config.n_embd
            positions = config.n_positions
            encoder_layers = None
            has_cls = False
        else:
            encoder_layers = config.encoder_layers
            layer_count = config.encoder_layers + config.decoder_layers
            hidden_dim = config.d_model
            positions = config.max_position_embeddings
            has_cls = True
    except AttributeError as exc:
        raise DescriptorError(
            f"checkpoint config (model_type {model_type!r}) does not fit family {family!r}: {exc}"
        ) from None

    descriptor = ModelDescriptor(
        checkpoint=checkpoint,
        family=family,
        layer_count=int(layer_count),
        hidden_dim=int(hidden_dim),
        has_cls=has_cls,
        max_length=int(max_length if max_length is not None else positions),
        encoder_layers=encoder_layers,
    )
    descriptor.validate()
    return descriptor
