"""Token-to-character alignment queries.

An alignment lists one (char_start, char_end) interval per token row of an
instance matrix; special tokens carry the sentinel (-1, -1) and never match
any span query.
"""

from __future__ import annotations

from .format import SENTINEL, Alignment


def is_sentinel(interval: tuple[int, int]) -> bool:
    return tuple(interval) == SENTINEL


def content_token_indices(alignment: Alignment) -> list[int]:
    """Indices of all non-sentinel tokens."""
    return [i for i, interval in enumerate(alignment) if not is_sentinel(interval)]


def tokens_in_span(alignment: Alignment, char_interval: tuple[int, int]) -> list[int]:
    """Indices of tokens whose interval intersects the query interval.

    Intersection (not containment) is used so that subword pieces straddling
    a span boundary are never dropped. Sentinel tokens are excluded; the
    result is ascending and may be empty.
    """
    q_start, q_end = char_interval
    hits = []
    for i, (t_start, t_end) in enumerate(alignment):
        if (t_start, t_end) == SENTINEL:
            continue
        if t_start < q_end and q_start < t_end:
            hits.append(i)
    return hits
