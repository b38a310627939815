"""Alignment verifier: do the dumped token offsets actually fit the texts?"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .dumpio import SENTINEL, read_dump_index, read_instance_file


@dataclass(frozen=True)
class VerifyRecord:
    instance_id: str
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class VerifyReport:
    records: tuple[VerifyRecord, ...]
    explicit_count: int
    connective_covered_count: int

    @property
    def pass_count(self) -> int:
        return sum(r.passed for r in self.records)

    @property
    def fail_count(self) -> int:
        return len(self.records) - self.pass_count

    @property
    def connective_coverage(self) -> float:
        if self.explicit_count == 0:
            return 1.0
        return self.connective_covered_count / self.explicit_count

    @property
    def ok(self) -> bool:
        return self.fail_count == 0

    def to_text(self) -> str:
        lines = [
            f"{r.instance_id}: " + ("pass" if r.passed else "FAIL " + "; ".join(r.failures))
            for r in self.records
        ]
        lines.append(
            f"{self.pass_count}/{len(self.records)} instances pass, "
            f"connective coverage {self.connective_coverage:.2%} "
            f"({self.connective_covered_count}/{self.explicit_count} explicit)"
        )
        return "\n".join(lines) + "\n"


def _tokens_touching(alignment, span) -> int:
    start, end = span
    return sum(
        1
        for token_start, token_end in alignment
        if (token_start, token_end) != SENTINEL
        and token_start < end
        and start < token_end
    )


def _uncovered_positions(text: str, span, alignment) -> int:
    """Non-whitespace characters of a span no token interval reaches."""
    covered = [False] * len(text)
    for token_start, token_end in alignment:
        if (token_start, token_end) == SENTINEL:
            continue
        for k in range(token_start, min(token_end, len(text))):
            covered[k] = True
    return sum(
        1
        for k in range(span[0], span[1])
        if not text[k].isspace() and not covered[k]
    )


def verify_alignment(dump_path: str | Path, instances_path: str | Path) -> VerifyReport:
    """Check every dumped alignment against its instance's serialized text.

    Per instance: token intervals must lie inside the text, an Explicit
    connective span must touch at least one token, and every non-space
    argument character must be covered by some token (truncation aside,
    uncovered argument text means broken offsets).
    """
    index = read_dump_index(dump_path)
    alignments = {e["id"]: [tuple(span) for span in e["alignment"]] for e in index["instances"]}
    instances = read_instance_file(instances_path)
    dumped_ids = set(alignments)

    records = []
    explicit_count = 0
    connective_covered = 0
    for instance in sorted(instances, key=lambda e: e["id"]):
        instance_id = instance["id"]
        if instance_id not in dumped_ids:
            records.append(
                VerifyRecord(instance_id=instance_id, failures=("absent from dump",))
            )
            continue
        text = instance["serialized_text"]
        alignment = alignments[instance_id]
        failures = []

        for token_start, token_end in alignment:
            if (token_start, token_end) == SENTINEL:
                continue
            if not 0 <= token_start < token_end <= len(text):
                failures.append(
                    f"token interval ({token_start}, {token_end}) outside text of length {len(text)}"
                )

        truncated_tail = max(
            (end for start, end in alignment if (start, end) != SENTINEL), default=0
        )
        if instance["relation_type"] == "Explicit" and instance.get("connective_char_span"):
            explicit_count += 1
            span = tuple(instance["connective_char_span"])
            if _tokens_touching(alignment, span) >= 1:
                connective_covered += 1
            elif span[0] < truncated_tail:
                failures.append(f"connective span {span} touches no token")

        if not failures:
            for name in ("arg1_char_span", "arg2_char_span"):
                span = tuple(instance[name])
                # Only demand coverage up to the last aligned character, so
                # flagged truncation does not read as corruption.
                clipped = (span[0], min(span[1], truncated_tail))
                if clipped[0] < clipped[1]:
                    missing = _uncovered_positions(text, clipped, alignment)
                    if missing:
                        failures.append(
                            f"{name} leaves {missing} characters uncovered"
                        )

        records.append(VerifyRecord(instance_id=instance_id, failures=tuple(failures)))

    return VerifyReport(
        records=tuple(records),
        explicit_count=explicit_count,
        connective_covered_count=connective_covered,
    )
