"""Small shared helpers."""

from __future__ import annotations

import hashlib


def stable_seed(*parts: object) -> int:
    """Platform-independent 63-bit seed derived from the given parts.

    SHA-256 over the "|"-joined string forms of the parts; replaces Python's
    salted hash() so derived seeds are reproducible across runs and machines.
    """
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFF_FFFF_FFFF_FFFF


def short_digest(text: str, length: int = 12) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:length]
