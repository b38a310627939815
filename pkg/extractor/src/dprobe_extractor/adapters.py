"""Per-family checkpoint drivers: tokenize with offsets, embed all layers.

Inference runs frozen, in float32, under no_grad; the layer-0 embedding
output is always dropped so layer k of the dump is transformer block k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoConfig, AutoModel, AutoTokenizer

from .descriptor import (
    FAMILY_DECODER,
    FAMILY_ENCODER,
    FAMILY_SEQ2SEQ,
    ModelDescriptor,
)
from .dumpio import SENTINEL, Alignment


class AdapterError(ValueError):
    pass


@dataclass
class TokenizedInstance:
    instance_id: str
    input_ids: list[int]
    alignment: Alignment
    truncated: bool


def load_checkpoint(descriptor: ModelDescriptor):
    """Load model and tokenizer, then cross-check the descriptor against
    the checkpoint config; a depth or width mismatch aborts extraction."""
    config = AutoConfig.from_pretrained(descriptor.checkpoint)
    model = AutoModel.from_pretrained(descriptor.checkpoint)
    tokenizer = AutoTokenizer.from_pretrained(descriptor.checkpoint)
    if not tokenizer.is_fast:
        raise AdapterError("checkpoint tokenizer provides no character offsets")

    if descriptor.family == FAMILY_ENCODER:
        depth, width = config.num_hidden_layers, config.hidden_size
    elif descriptor.family == FAMILY_DECODER:
        depth, width = config.n_layer, config.n_embd
    else:
        depth, width = config.encoder_layers + config.decoder_layers, config.d_model
        if descriptor.encoder_layers != config.encoder_layers:
            raise AdapterError(
                f"descriptor places the stack boundary at {descriptor.encoder_layers}, "
                f"checkpoint has {config.encoder_layers} encoder layers"
            )
    if (descriptor.layer_count, descriptor.hidden_dim) != (depth, width):
        raise AdapterError(
            f"descriptor says {descriptor.layer_count} layers x {descriptor.hidden_dim}, "
            f"checkpoint has {depth} layers x {width}"
        )

    model.eval()
    model.float()
    return model, tokenizer


def tokenize_instance(tokenizer, instance_id: str, text: str, max_length: int) -> TokenizedInstance:
    """Tokenize with character offsets; over-long inputs are truncated from
    the right and flagged, never dropped silently."""
    encoded = tokenizer(text, return_offsets_mapping=True, add_special_tokens=True)
    truncated = len(encoded["input_ids"]) > max_length
    if truncated:
        encoded = tokenizer(
            text,
            return_offsets_mapping=True,
            add_special_tokens=True,
            truncation=True,
            max_length=max_length,
        )
    alignment = tuple(
        SENTINEL if start == end else (int(start), int(end))
        for start, end in encoded["offset_mapping"]
    )
    if not any(span != SENTINEL for span in alignment):
        raise AdapterError(f"instance {instance_id!r}: no content tokens survive")
    return TokenizedInstance(
        instance_id=instance_id,
        input_ids=[int(i) for i in encoded["input_ids"]],
        alignment=alignment,
        truncated=truncated,
    )


def pad_batch(batch: list[TokenizedInstance], pad_id: int) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(item.input_ids) for item in batch)
    ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(batch), width), dtype=torch.long)
    for row, item in enumerate(batch):
        length = len(item.input_ids)
        ids[row, :length] = torch.tensor(item.input_ids, dtype=torch.long)
        mask[row, :length] = 1
    return ids, mask


def layer_states(
    descriptor: ModelDescriptor,
    model,
    input_ids: torch.Tensor,
    attention_mask: torch.Tensor,
) -> torch.Tensor:
    """All probed layers for one padded batch, shape (batch, layers, tokens, dim)."""
    with torch.no_grad():
        if descriptor.family == FAMILY_SEQ2SEQ:
            # The decoder re-consumes the same tokens under teacher forcing
            # (inputs shifted right), giving one decoder state per token.
            from transformers.models.bart.modeling_bart import shift_tokens_right

            decoder_input_ids = shift_tokens_right(
                input_ids,
                model.config.pad_token_id,
                model.config.decoder_start_token_id,
            )
            outputs = model(
                input_ids=input_ids,
                attention_mask=attention_mask,
                decoder_input_ids=decoder_input_ids,
                output_hidden_states=True,
            )
            stacked = torch.stack(
                outputs.encoder_hidden_states[1:] + outputs.decoder_hidden_states[1:],
                dim=1,
            )
        else:
            outputs = model(
                input_ids=input_ids,
                attention_mask=attention_mask,
                output_hidden_states=True,
            )
            stacked = torch.stack(outputs.hidden_states[1:], dim=1)
    return stacked.to(torch.float32)


def instance_matrix(states: torch.Tensor, row: int, token_count: int) -> np.ndarray:
    """Slice one instance's unpadded (layers, tokens, dim) block from a batch."""
    return states[row, :, :token_count, :].cpu().numpy().astype(np.float32)
