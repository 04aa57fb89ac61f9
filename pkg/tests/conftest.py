"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

import re

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    key = int(m.group(1))
    if report.failed or key not in _CRITERIA:
        _CRITERIA[key] = ("PASS" if report.passed else "FAIL", m.group(2).replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        status, name = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {status}  {name}")
