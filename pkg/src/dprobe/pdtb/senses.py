"""Sense simplification: raw hierarchical sense paths to the 21-label inventory.

The classifier label set is 19 simplified senses plus EntRel and NoRel. The
simplification table is data, not code: it ships as an editable config file
(``data/default_sense_map.tsv``) whose default entries cover the complete
PDTB 2.0 sense hierarchy (class / type / subtype, 43 paths). EntRel and
NoRel never pass through the table; they resolve to their dedicated labels.

Config file format, one record per line, tab-separated:

    # comment
    !<label>                 inventory entry, in class-index order
    <raw_path>\t<label>      simplification entry
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

ENTREL_LABEL = "EntRel"
NOREL_LABEL = "NoRel"

#: Complete PDTB 2.0 sense hierarchy; default sense maps must cover it.
PDTB_SENSE_INVENTORY = (
    "Temporal",
    "Temporal.Asynchronous",
    "Temporal.Asynchronous.Precedence",
    "Temporal.Asynchronous.Succession",
    "Temporal.Synchrony",
    "Contingency",
    "Contingency.Cause",
    "Contingency.Cause.Reason",
    "Contingency.Cause.Result",
    "Contingency.Pragmatic cause",
    "Contingency.Pragmatic cause.Justification",
    "Contingency.Condition",
    "Contingency.Condition.Hypothetical",
    "Contingency.Condition.General",
    "Contingency.Condition.Unreal present",
    "Contingency.Condition.Unreal past",
    "Contingency.Condition.Factual present",
    "Contingency.Condition.Factual past",
    "Contingency.Pragmatic condition",
    "Contingency.Pragmatic condition.Relevance",
    "Contingency.Pragmatic condition.Implicit assertion",
    "Comparison",
    "Comparison.Contrast",
    "Comparison.Contrast.Juxtaposition",
    "Comparison.Contrast.Opposition",
    "Comparison.Pragmatic contrast",
    "Comparison.Concession",
    "Comparison.Concession.Expectation",
    "Comparison.Concession.Contra-expectation",
    "Comparison.Pragmatic concession",
    "Expansion",
    "Expansion.Conjunction",
    "Expansion.Instantiation",
    "Expansion.Restatement",
    "Expansion.Restatement.Specification",
    "Expansion.Restatement.Equivalence",
    "Expansion.Restatement.Generalization",
    "Expansion.Alternative",
    "Expansion.Alternative.Conjunctive",
    "Expansion.Alternative.Disjunctive",
    "Expansion.Alternative.Chosen alternative",
    "Expansion.Exception",
    "Expansion.List",
)


class SenseMapError(ValueError):
    pass


@dataclass(frozen=True)
class SenseMap:
    """Raw-path-to-label table plus the ordered label inventory."""

    entries: dict[str, str]
    label_inventory: tuple[str, ...]

    def validate(self, require_full_inventory: bool = False) -> None:
        if len(set(self.label_inventory)) != len(self.label_inventory):
            raise SenseMapError("duplicate labels in inventory")
        for special in (ENTREL_LABEL, NOREL_LABEL):
            if special not in self.label_inventory:
                raise SenseMapError(f"inventory lacks {special}")
        for raw, label in self.entries.items():
            if label not in self.label_inventory:
                raise SenseMapError(f"mapping {raw!r} -> {label!r} targets a label outside the inventory")
        if require_full_inventory:
            missing = [p for p in PDTB_SENSE_INVENTORY if p not in self.entries]
            if missing:
                raise SenseMapError(f"sense map leaves {len(missing)} PDTB paths unmapped, e.g. {missing[0]!r}")

    def label_index(self, label: str) -> int:
        try:
            return self.label_inventory.index(label)
        except ValueError:
            raise SenseMapError(f"label {label!r} not in inventory") from None


def simplify_sense(sense_map: SenseMap, relation_type: str, sense_paths: Iterable[str]) -> int:
    """Resolve a relation to its class index.

    EntRel and NoRel bypass the table; everything else maps the first listed
    sense path. An unmapped path is an error, never silently dropped.
    """
    if relation_type == "EntRel":
        return sense_map.label_index(ENTREL_LABEL)
    if relation_type == "NoRel":
        return sense_map.label_index(NOREL_LABEL)
    paths = list(sense_paths)
    if not paths:
        raise SenseMapError(f"{relation_type} relation has no sense path")
    first = paths[0]
    try:
        label = sense_map.entries[first]
    except KeyError:
        raise SenseMapError(f"sense path {first!r} is not covered by the sense map") from None
    return sense_map.label_index(label)


def parse_sense_map(lines: Iterable[str]) -> SenseMap:
    inventory: list[str] = []
    entries: dict[str, str] = {}
    for line_number, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("!"):
            inventory.append(line[1:].strip())
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise SenseMapError(f"line {line_number}: expected 'raw_path<TAB>label', got {line!r}")
        raw, label = parts[0].strip(), parts[1].strip()
        if raw in entries:
            raise SenseMapError(f"line {line_number}: duplicate entry for {raw!r}")
        entries[raw] = label
    sm = SenseMap(entries=entries, label_inventory=tuple(inventory))
    sm.validate()
    return sm


def load_sense_map(path: str | Path) -> SenseMap:
    with open(path, encoding="utf-8") as f:
        return parse_sense_map(f)


def format_sense_map(sense_map: SenseMap) -> str:
    lines = [f"!{label}" for label in sense_map.label_inventory]
    lines += [f"{raw}\t{label}" for raw, label in sense_map.entries.items()]
    return "\n".join(lines) + "\n"


def default_sense_map() -> SenseMap:
    """The shipped 21-label table covering the full PDTB 2.0 hierarchy."""
    text = resources.files("dprobe.pdtb").joinpath("data/default_sense_map.tsv").read_text("utf-8")
    sm = parse_sense_map(text.splitlines())
    sm.validate(require_full_inventory=True)
    return sm
