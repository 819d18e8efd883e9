import math

import numpy as np
import pytest

from polgpr.core import Bscan, SurveyGrid

_acceptance = {}


def make_scan(data, channel="HV", frame="I", **grid_kw):
    data = np.asarray(data, dtype=float)
    grid = SurveyGrid(n_samples=data.shape[0], n_traces=data.shape[1], **grid_kw)
    return Bscan(grid, channel, frame, data)


@pytest.fixture
def scan_of():
    return make_scan


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
