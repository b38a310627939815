"""Layer-embedding dump format, token alignment, and feature pooling."""

from .alignment import content_token_indices, is_sentinel, tokens_in_span
from .features import FeatureError, FeatureVariant, feature_vector, pool_mean, variant_token_indices
from .format import (
    HEADER_SIZE,
    MAGIC,
    SENTINEL,
    Alignment,
    DumpFormatError,
    DumpManifest,
    InstanceEntry,
    read_dump,
    write_dump,
)

__all__ = [
    "Alignment",
    "DumpFormatError",
    "DumpManifest",
    "FeatureError",
    "FeatureVariant",
    "HEADER_SIZE",
    "InstanceEntry",
    "MAGIC",
    "SENTINEL",
    "content_token_indices",
    "feature_vector",
    "is_sentinel",
    "pool_mean",
    "read_dump",
    "tokens_in_span",
    "variant_token_indices",
    "write_dump",
]
