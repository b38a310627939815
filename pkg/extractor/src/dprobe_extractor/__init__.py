"""Checkpoint-to-dump extraction for layer-wise probing."""

from .descriptor import (
    FAMILIES,
    FAMILY_DECODER,
    FAMILY_ENCODER,
    FAMILY_SEQ2SEQ,
    POOLING_LAST,
    POOLING_MEAN,
    DescriptorError,
    ModelDescriptor,
    descriptor_from_config,
)
from .extract import ExtractionError, ExtractionRecord, extract, weights_digest
from .verify import VerifyReport, verify_alignment

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "FAMILY_DECODER",
    "FAMILY_ENCODER",
    "FAMILY_SEQ2SEQ",
    "POOLING_LAST",
    "POOLING_MEAN",
    "DescriptorError",
    "ExtractionError",
    "ExtractionRecord",
    "ModelDescriptor",
    "VerifyReport",
    "descriptor_from_config",
    "extract",
    "verify_alignment",
    "weights_digest",
]
