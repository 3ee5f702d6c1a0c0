import os
import re
from pathlib import Path

import numpy as np
import pytest

from mofs.core import load_any

DATA = Path(__file__).resolve().parents[1] / "src" / "mofs" / "data"

_criteria: dict[str, tuple[str, float]] = {}


def load_data(name: str):
    return load_any((DATA / name).read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    key = m.group(1)
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[key] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        outcome, dur = _criteria[key]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {verdict} ({dur:.1f} s)")
