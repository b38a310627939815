"""Shared fixtures and the acceptance-suite result banner."""

from __future__ import annotations

from pathlib import Path

import pytest

from dprobe.pdtb.instances import assign_splits, build_instances, default_split_config
from dprobe.pdtb.pipe import parse_pdtb
from dprobe.pdtb.senses import default_sense_map

FIXTURE_DIR = Path(__file__).parent / "fixtures"
PDTB_FIXTURE_DIR = FIXTURE_DIR / "pdtb"

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.skipped):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    _acceptance_results.append((name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"ACCEPTANCE {name}: {outcome}")


@pytest.fixture(scope="session")
def sense_map():
    return default_sense_map()


@pytest.fixture(scope="session")
def fixture_relations(sense_map):
    """All RawRelations from the committed pipe fixture corpus."""
    relations = []
    for pipe_file in sorted(PDTB_FIXTURE_DIR.rglob("*.pipe")):
        with open(pipe_file, encoding="utf-8") as handle:
            relations.extend(parse_pdtb(handle, doc_id=pipe_file.stem))
    return relations


@pytest.fixture(scope="session")
def fixture_instances(fixture_relations, sense_map):
    """Fixture corpus as split-assigned instances (section 00 dropped)."""
    instances = build_instances(fixture_relations, sense_map)
    return assign_splits(instances, default_split_config())
