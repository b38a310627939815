"""Canonical probing instances: serialization, split assignment, statistics.

A relation is serialized into the single text string fed to a language
model: ``arg1 <connective> arg2`` for Explicit relations, ``arg1 arg2``
otherwise, joined by single spaces. The annotated connective of Implicit,
EntRel, and NoRel relations never enters the text. All spans are recomputed
against the serialized string; document offsets are not reused.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable

from .pipe import RawRelation
from .senses import SenseMap, simplify_sense

SPLITS = ("train", "valid", "test")
EXCLUDE = "exclude"

_WSJ_DOC = re.compile(r"wsj_(\d{2})\d{2}$")


class InstanceError(ValueError):
    pass


class SplitConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DiscourseInstance:
    """One serialized relation, with spans into its own serialized_text."""

    id: str
    serialized_text: str
    arg1_char_span: tuple[int, int]
    arg2_char_span: tuple[int, int]
    relation_type: str
    label: str
    label_index: int
    connective_char_span: tuple[int, int] | None = None
    altlex_char_span: tuple[int, int] | None = None
    split: str | None = None

    def validate(self) -> None:
        n = len(self.serialized_text)
        for name, span in (
            ("arg1", self.arg1_char_span),
            ("arg2", self.arg2_char_span),
            ("connective", self.connective_char_span),
            ("altlex", self.altlex_char_span),
        ):
            if span is None:
                continue
            start, end = span
            if not (0 <= start < end <= n):
                raise InstanceError(f"{self.id}: {name} span {span} outside serialized text of length {n}")
        if self.connective_char_span is not None:
            c0, c1 = self.connective_char_span
            for a0, a1 in (self.arg1_char_span, self.arg2_char_span):
                if c0 < a1 and a0 < c1:
                    raise InstanceError(f"{self.id}: connective span overlaps an argument span")
        a = self.arg1_char_span
        b = self.arg2_char_span
        if a[0] < b[1] and b[0] < a[1]:
            raise InstanceError(f"{self.id}: argument spans overlap")
        if self.relation_type in ("Implicit", "EntRel", "NoRel") and self.connective_char_span is not None:
            raise InstanceError(f"{self.id}: {self.relation_type} instance carries a connective span")
        if self.relation_type == "Explicit" and self.connective_char_span is None:
            raise InstanceError(f"{self.id}: Explicit instance lacks a connective span")


def build_instance(relation: RawRelation, sense_map: SenseMap, sense_path: str | None = None) -> DiscourseInstance:
    """Serialize one RawRelation into a DiscourseInstance.

    sense_path overrides the default first-listed-sense policy (used when
    duplicating multi-sense relations).
    """
    arg1 = relation.arg1_text
    arg2 = relation.arg2_text
    if not arg1 or not arg2:
        raise InstanceError(f"{relation.doc_id}:{relation.line_number}: empty argument text")

    paths = (sense_path,) if sense_path is not None else relation.sense_paths
    label_index = simplify_sense(sense_map, relation.relation_type, paths)
    label = sense_map.label_inventory[label_index]

    connective_span = None
    if relation.relation_type == "Explicit":
        conn = relation.connective_text or ""
        text = f"{arg1} {conn} {arg2}"
        arg1_span = (0, len(arg1))
        connective_span = (len(arg1) + 1, len(arg1) + 1 + len(conn))
        arg2_span = (connective_span[1] + 1, len(text))
    else:
        text = f"{arg1} {arg2}"
        arg1_span = (0, len(arg1))
        arg2_span = (len(arg1) + 1, len(text))

    altlex_span = None
    if relation.relation_type == "AltLex" and relation.altlex_text:
        # The AltLex text is part of Arg2 in PDTB; locate it there.
        at = arg2.find(relation.altlex_text)
        if at >= 0:
            start = arg2_span[0] + at
            altlex_span = (start, start + len(relation.altlex_text))

    instance = DiscourseInstance(
        id=f"{relation.doc_id}:{relation.line_number}",
        serialized_text=text,
        arg1_char_span=arg1_span,
        arg2_char_span=arg2_span,
        relation_type=relation.relation_type,
        label=label,
        label_index=label_index,
        connective_char_span=connective_span,
        altlex_char_span=altlex_span,
    )
    instance.validate()
    return instance


def build_instances(
    relations: Iterable[RawRelation],
    sense_map: SenseMap,
    duplicate_per_sense: bool = False,
) -> list[DiscourseInstance]:
    """Serialize a batch of relations.

    With duplicate_per_sense, a relation annotated with several senses
    yields one instance per sense (ids suffixed "@2", "@3", ...); the
    default keeps one instance per relation so corpus counts stay aligned
    with the annotation counts.
    """
    instances = []
    for relation in relations:
        if duplicate_per_sense and len(relation.sense_paths) > 1:
            for k, path in enumerate(relation.sense_paths, start=1):
                inst = build_instance(relation, sense_map, sense_path=path)
                if k > 1:
                    inst = replace(inst, id=f"{inst.id}@{k}")
                instances.append(inst)
        else:
            instances.append(build_instance(relation, sense_map))
    return instances


@dataclass(frozen=True)
class SplitConfig:
    """Document-to-split assignment: doc rules override section rules.

    Docs mapped to "exclude" are dropped; a doc matched by no rule is an
    error unless a default action is set.
    """

    section_rules: dict[str, str]
    doc_rules: dict[str, str]
    default: str | None = None

    def action_for(self, doc_id: str) -> str:
        if doc_id in self.doc_rules:
            return self.doc_rules[doc_id]
        m = _WSJ_DOC.search(doc_id)
        if m and m.group(1) in self.section_rules:
            return self.section_rules[m.group(1)]
        if self.default is not None:
            return self.default
        raise SplitConfigError(f"document {doc_id!r} is not covered by the split config")


def _expand_sections(spec: str) -> list[str]:
    sections = []
    for piece in spec.split(","):
        piece = piece.strip()
        if "-" in piece:
            lo, hi = piece.split("-")
            sections += [f"{k:02d}" for k in range(int(lo), int(hi) + 1)]
        else:
            sections.append(f"{int(piece):02d}")
    return sections


def parse_split_config(lines: Iterable[str]) -> SplitConfig:
    section_rules: dict[str, str] = {}
    doc_rules: dict[str, str] = {}
    default = None
    valid_actions = SPLITS + (EXCLUDE,)
    for line_number, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        kind = parts[0]
        if kind == "default" and len(parts) == 2:
            default = parts[1]
            if default not in valid_actions:
                raise SplitConfigError(f"line {line_number}: unknown split {default!r}")
        elif kind == "section" and len(parts) == 3:
            if parts[2] not in valid_actions:
                raise SplitConfigError(f"line {line_number}: unknown split {parts[2]!r}")
            for section in _expand_sections(parts[1]):
                section_rules[section] = parts[2]
        elif kind == "doc" and len(parts) == 3:
            if parts[2] not in valid_actions:
                raise SplitConfigError(f"line {line_number}: unknown split {parts[2]!r}")
            doc_rules[parts[1]] = parts[2]
        else:
            raise SplitConfigError(f"line {line_number}: cannot parse {line!r}")
    return SplitConfig(section_rules=section_rules, doc_rules=doc_rules, default=default)


def load_split_config(path: str | Path) -> SplitConfig:
    with open(path, encoding="utf-8") as f:
        return parse_split_config(f)


def default_split_config() -> SplitConfig:
    """Shipped section assignment: 02-21 train, 22 valid, 23 test, rest held out."""
    text = resources.files("dprobe.pdtb").joinpath("data/default_splits.tsv").read_text("utf-8")
    return parse_split_config(text.splitlines())


def assign_splits(instances: Iterable[DiscourseInstance], config: SplitConfig) -> list[DiscourseInstance]:
    """Deterministically assign splits; excluded documents drop out."""
    assigned = []
    for inst in instances:
        doc_id = inst.id.split(":", 1)[0]
        action = config.action_for(doc_id)
        if action == EXCLUDE:
            continue
        assigned.append(replace(inst, split=action))
    return assigned


@dataclass(frozen=True)
class CorpusStats:
    """Per-split instance counts, with the explicit-only counts of Table-style reports."""

    splits: dict[str, dict[str, int]]

    def total(self, split: str) -> int:
        return sum(self.splits.get(split, {}).values())

    def explicit(self, split: str) -> int:
        return self.splits.get(split, {}).get("Explicit", 0)

    def to_json(self) -> str:
        payload = {
            split: {
                "total": self.total(split),
                "explicit": self.explicit(split),
                "by_type": dict(sorted(counts.items())),
            }
            for split, counts in sorted(self.splits.items())
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def corpus_stats(instances: Iterable[DiscourseInstance]) -> CorpusStats:
    splits: dict[str, dict[str, int]] = {}
    for inst in instances:
        split = inst.split or "unassigned"
        by_type = splits.setdefault(split, {})
        by_type[inst.relation_type] = by_type.get(inst.relation_type, 0) + 1
    return CorpusStats(splits=splits)


def write_instances(instances: Iterable[DiscourseInstance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            record = {
                "id": inst.id,
                "serialized_text": inst.serialized_text,
                "arg1_char_span": list(inst.arg1_char_span),
                "arg2_char_span": list(inst.arg2_char_span),
                "connective_char_span": list(inst.connective_char_span) if inst.connective_char_span else None,
                "altlex_char_span": list(inst.altlex_char_span) if inst.altlex_char_span else None,
                "relation_type": inst.relation_type,
                "label": inst.label,
                "label_index": inst.label_index,
                "split": inst.split,
            }
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_instances(path: str | Path) -> list[DiscourseInstance]:
    instances = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            r = json.loads(line)
            instances.append(
                DiscourseInstance(
                    id=r["id"],
                    serialized_text=r["serialized_text"],
                    arg1_char_span=tuple(r["arg1_char_span"]),
                    arg2_char_span=tuple(r["arg2_char_span"]),
                    connective_char_span=tuple(r["connective_char_span"]) if r.get("connective_char_span") else None,
                    altlex_char_span=tuple(r["altlex_char_span"]) if r.get("altlex_char_span") else None,
                    relation_type=r["relation_type"],
                    label=r["label"],
                    label_index=r["label_index"],
                    split=r.get("split"),
                )
            )
    return instances
