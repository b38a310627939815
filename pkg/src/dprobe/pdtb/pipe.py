"""Parsing and serialization of PDTB 2.0 pipe-delimited annotation files.

Each annotation line has 48 pipe-separated columns. Only the columns needed
for relation extraction are read; the rest (Gorn addresses, attribution,
supplementary spans) are preserved as empty columns on round-trip. The
fixture files under ``tests/fixtures/pdtb/`` double as executable
documentation of the layout.

Column map (0-based):

    0   relation type (Explicit | Implicit | AltLex | EntRel | NoRel)
    1   section number
    2   file number
    3   connective/AltLex character span list, e.g. "9..14" or "9..14;20..25"
    5   connective/AltLex raw text
    9   first implicit connective (Conn1)
    11  first sense of the connective / Conn1
    12  second sense of the connective / Conn1
    13  first sense of Conn2
    14  second sense of Conn2
    22  Arg1 character span list
    24  Arg1 raw text
    32  Arg2 character span list
    34  Arg2 raw text
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

COLUMN_COUNT = 48

RELATION_TYPES = ("Explicit", "Implicit", "AltLex", "EntRel", "NoRel")

_COL_TYPE = 0
_COL_SECTION = 1
_COL_FILE = 2
_COL_CONN_SPAN = 3
_COL_CONN_TEXT = 5
_COL_CONN1 = 9
_COL_SENSE1A = 11
_COL_SENSE1B = 12
_COL_SENSE2A = 13
_COL_SENSE2B = 14
_COL_ARG1_SPAN = 22
_COL_ARG1_TEXT = 24
_COL_ARG2_SPAN = 32
_COL_ARG2_TEXT = 34


class PipeFormatError(ValueError):
    """Malformed pipe annotation line.

    Carries the 1-based line number and, when known, the offending column.
    """

    def __init__(self, message: str, line_number: int, column: int | None = None):
        loc = f"line {line_number}"
        if column is not None:
            loc += f", column {column}"
        super().__init__(f"{loc}: {message}")
        self.line_number = line_number
        self.column = column


@dataclass(frozen=True)
class RawRelation:
    """One shallow discourse annotation, with spans into the source document."""

    doc_id: str
    line_number: int
    relation_type: str
    arg1_text: str
    arg2_text: str
    arg1_spans: tuple[tuple[int, int], ...]
    arg2_spans: tuple[tuple[int, int], ...]
    connective_text: str | None = None
    connective_char_span: tuple[tuple[int, int], ...] | None = None
    altlex_text: str | None = None
    altlex_char_span: tuple[tuple[int, int], ...] | None = None
    sense_paths: tuple[str, ...] = field(default_factory=tuple)

    def validate(self) -> None:
        if self.relation_type not in RELATION_TYPES:
            raise ValueError(f"unknown relation type {self.relation_type!r}")
        if self.relation_type == "Explicit" and not self.connective_text:
            raise ValueError(f"{self.doc_id}:{self.line_number}: Explicit relation without connective text")
        if self.relation_type in ("EntRel", "NoRel") and self.sense_paths:
            raise ValueError(f"{self.doc_id}:{self.line_number}: {self.relation_type} relation carries sense paths")
        if self.relation_type == "AltLex" and not self.altlex_char_span:
            raise ValueError(f"{self.doc_id}:{self.line_number}: AltLex relation without AltLex span")
        for name, spans in (
            ("arg1", self.arg1_spans),
            ("arg2", self.arg2_spans),
            ("connective", self.connective_char_span),
            ("altlex", self.altlex_char_span),
        ):
            for start, end in spans or ():
                if start >= end:
                    raise ValueError(f"{self.doc_id}:{self.line_number}: empty {name} span {start}..{end}")


def _parse_span_list(text: str, line_number: int, column: int) -> tuple[tuple[int, int], ...]:
    spans = []
    for piece in text.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        try:
            start_s, end_s = piece.split("..")
            start, end = int(start_s), int(end_s)
        except ValueError:
            raise PipeFormatError(f"bad span {piece!r}", line_number, column) from None
        if start >= end:
            raise PipeFormatError(f"empty span {piece!r}", line_number, column)
        spans.append((start, end))
    return tuple(spans)


def _format_span_list(spans: tuple[tuple[int, int], ...] | None) -> str:
    if not spans:
        return ""
    return ";".join(f"{s}..{e}" for s, e in spans)


def parse_pipe_line(line: str, doc_id: str, line_number: int) -> RawRelation:
    cols = line.rstrip("\n").split("|")
    if len(cols) != COLUMN_COUNT:
        raise PipeFormatError(f"expected {COLUMN_COUNT} columns, got {len(cols)}", line_number)

    rtype = cols[_COL_TYPE]
    if rtype not in RELATION_TYPES:
        raise PipeFormatError(f"unknown relation type {rtype!r}", line_number, _COL_TYPE)

    arg1_spans = _parse_span_list(cols[_COL_ARG1_SPAN], line_number, _COL_ARG1_SPAN)
    arg2_spans = _parse_span_list(cols[_COL_ARG2_SPAN], line_number, _COL_ARG2_SPAN)

    connective_text = None
    connective_span = None
    altlex_text = None
    altlex_span = None
    sense_paths: tuple[str, ...] = ()

    if rtype == "Explicit":
        connective_text = cols[_COL_CONN_TEXT]
        if not connective_text:
            raise PipeFormatError("Explicit relation without connective text", line_number, _COL_CONN_TEXT)
        connective_span = _parse_span_list(cols[_COL_CONN_SPAN], line_number, _COL_CONN_SPAN) or None
        sense_paths = tuple(s for s in (cols[_COL_SENSE1A], cols[_COL_SENSE1B]) if s)
    elif rtype == "Implicit":
        connective_text = cols[_COL_CONN1] or None
        sense_paths = tuple(
            s
            for s in (cols[_COL_SENSE1A], cols[_COL_SENSE1B], cols[_COL_SENSE2A], cols[_COL_SENSE2B])
            if s
        )
    elif rtype == "AltLex":
        altlex_text = cols[_COL_CONN_TEXT] or None
        altlex_span = _parse_span_list(cols[_COL_CONN_SPAN], line_number, _COL_CONN_SPAN)
        if not altlex_span:
            raise PipeFormatError("AltLex relation without AltLex span", line_number, _COL_CONN_SPAN)
        sense_paths = tuple(s for s in (cols[_COL_SENSE1A], cols[_COL_SENSE1B]) if s)

    return RawRelation(
        doc_id=doc_id,
        line_number=line_number,
        relation_type=rtype,
        arg1_text=cols[_COL_ARG1_TEXT],
        arg2_text=cols[_COL_ARG2_TEXT],
        arg1_spans=arg1_spans,
        arg2_spans=arg2_spans,
        connective_text=connective_text,
        connective_char_span=connective_span,
        altlex_text=altlex_text,
        altlex_char_span=altlex_span,
        sense_paths=sense_paths,
    )


def parse_pdtb(stream: Iterable[str] | IO[str], doc_id: str) -> list[RawRelation]:
    """Parse one pipe-delimited annotation file into RawRelations.

    Blank lines are skipped. Raises PipeFormatError with line/column on any
    malformed line.
    """
    relations = []
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        relations.append(parse_pipe_line(line, doc_id, line_number))
    return relations


def format_pipe_line(relation: RawRelation) -> str:
    """Serialize a RawRelation back to the 48-column pipe layout.

    Columns this parser does not model are left empty; parsing the result
    yields an equal RawRelation.
    """
    cols = [""] * COLUMN_COUNT
    cols[_COL_TYPE] = relation.relation_type
    doc_num = relation.doc_id.rsplit("_", 1)[-1]
    cols[_COL_SECTION] = doc_num[:2]
    cols[_COL_FILE] = doc_num
    cols[_COL_ARG1_SPAN] = _format_span_list(relation.arg1_spans)
    cols[_COL_ARG1_TEXT] = relation.arg1_text
    cols[_COL_ARG2_SPAN] = _format_span_list(relation.arg2_spans)
    cols[_COL_ARG2_TEXT] = relation.arg2_text

    rtype = relation.relation_type
    if rtype == "Explicit":
        cols[_COL_CONN_SPAN] = _format_span_list(relation.connective_char_span)
        cols[_COL_CONN_TEXT] = relation.connective_text or ""
        senses = relation.sense_paths
        cols[_COL_SENSE1A] = senses[0] if len(senses) > 0 else ""
        cols[_COL_SENSE1B] = senses[1] if len(senses) > 1 else ""
    elif rtype == "Implicit":
        cols[_COL_CONN1] = relation.connective_text or ""
        for col, sense in zip((_COL_SENSE1A, _COL_SENSE1B, _COL_SENSE2A, _COL_SENSE2B), relation.sense_paths):
            cols[col] = sense
    elif rtype == "AltLex":
        cols[_COL_CONN_SPAN] = _format_span_list(relation.altlex_char_span)
        cols[_COL_CONN_TEXT] = relation.altlex_text or ""
        senses = relation.sense_paths
        cols[_COL_SENSE1A] = senses[0] if len(senses) > 0 else ""
        cols[_COL_SENSE1B] = senses[1] if len(senses) > 1 else ""

    return "|".join(cols)
