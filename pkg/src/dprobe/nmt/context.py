"""Document-context corpus construction for context-aware translation.

Each source sentence is paired with the immediately previous sentence of
the same document, joined by a separator token; document-start sentences
carry no context.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

DEFAULT_SEPARATOR = " [SEP] "


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class DocPair:
    """One aligned sentence pair plus its in-document context."""

    doc_id: str
    index: int
    context_sentence: str | None
    current_sentence: str
    target_sentence: str
    source_line: str
    separator: str = DEFAULT_SEPARATOR

    def validate(self) -> None:
        if self.index < 0:
            raise ContextError(f"pair {self.doc_id}[{self.index}]: negative index")
        if self.index == 0 and self.context_sentence is not None:
            raise ContextError(f"pair {self.doc_id}[0]: document start cannot have context")
        for field_name in ("current_sentence", "target_sentence", "source_line"):
            text = getattr(self, field_name)
            if "\n" in text or "\r" in text:
                raise ContextError(f"pair {self.doc_id}[{self.index}]: {field_name} contains a newline")
        if self.context_sentence is None:
            if self.source_line != self.current_sentence:
                raise ContextError(
                    f"pair {self.doc_id}[{self.index}]: context-free source_line must equal the sentence"
                )
            if self.separator in self.source_line:
                raise ContextError(
                    f"pair {self.doc_id}[{self.index}]: separator present without context"
                )
        else:
            expected = self.context_sentence + self.separator + self.current_sentence
            if self.source_line != expected:
                raise ContextError(
                    f"pair {self.doc_id}[{self.index}]: source_line does not join context and sentence"
                )
            if self.source_line.count(self.separator) != 1:
                raise ContextError(
                    f"pair {self.doc_id}[{self.index}]: separator must appear exactly once"
                )


def build_doc_pairs(
    documents: Iterable[tuple[str, Sequence[tuple[str, str]]]],
    separator: str = DEFAULT_SEPARATOR,
) -> list[DocPair]:
    """Pair every sentence with its previous in-document sentence as context.

    ``documents`` yields (doc_id, ordered (source, target) sentence pairs).
    Contexts never cross document boundaries; empty documents are skipped
    with a warning. Sentences already containing the separator would make
    the joined line ambiguous, so they are rejected.
    """
    pairs: list[DocPair] = []
    for doc_id, sentences in documents:
        if not sentences:
            warnings.warn(f"document {doc_id!r} is empty; skipped", stacklevel=2)
            continue
        previous: str | None = None
        for index, (source, target) in enumerate(sentences):
            if separator in source:
                raise ContextError(
                    f"document {doc_id!r} sentence {index}: source already contains {separator!r}"
                )
            line = source if previous is None else previous + separator + source
            pair = DocPair(
                doc_id=doc_id,
                index=index,
                context_sentence=previous,
                current_sentence=source,
                target_sentence=target,
                source_line=line,
                separator=separator,
            )
            pair.validate()
            pairs.append(pair)
            previous = source
    return pairs


def write_parallel_corpus(pairs: Sequence[DocPair], source_path: Path, target_path: Path) -> None:
    """Emit line-aligned source/target text files for an external trainer."""
    for pair in pairs:
        pair.validate()
    with open(source_path, "w", encoding="utf-8", newline="\n") as handle:
        for pair in pairs:
            handle.write(pair.source_line + "\n")
    with open(target_path, "w", encoding="utf-8", newline="\n") as handle:
        for pair in pairs:
            handle.write(pair.target_sentence + "\n")


def read_parallel_documents(
    source_path: Path, target_path: Path, boundary: str = ""
) -> list[tuple[str, list[tuple[str, str]]]]:
    """Load aligned text files where a blank line marks a document boundary.

    Returns (doc_id, sentence pairs) entries with doc_ids doc_0000, doc_0001,
    in file order.
    """
    source_lines = Path(source_path).read_text(encoding="utf-8").splitlines()
    target_lines = Path(target_path).read_text(encoding="utf-8").splitlines()
    if len(source_lines) != len(target_lines):
        raise ContextError(
            f"line count mismatch: {len(source_lines)} source vs {len(target_lines)} target"
        )
    documents: list[tuple[str, list[tuple[str, str]]]] = []
    current: list[tuple[str, str]] = []
    for source, target in zip(source_lines, target_lines):
        if source == boundary:
            if target != boundary:
                raise ContextError("document boundary present only on the source side")
            documents.append((f"doc_{len(documents):04d}", current))
            current = []
            continue
        current.append((source, target))
    documents.append((f"doc_{len(documents):04d}", current))
    if not documents[-1][1]:
        documents.pop()
    return documents
