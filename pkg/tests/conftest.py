"""Shared fixtures and the per-criterion acceptance report."""

from __future__ import annotations

from collections import OrderedDict

import pytest

from covigov import GameParams, OpinionParams

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


@pytest.fixture
def baseline():
    return GameParams.baseline()


@pytest.fixture
def control():
    return OpinionParams.control()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, desc = mark.args
    entry = _CRITERIA.setdefault(number, {"desc": desc, "failed": [], "ran": 0})
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry["ran"] += 1
        if not rep.passed:
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "FAIL" if e["failed"] else "PASS"
        line = f"criterion {number:>2}: {status}  {e['desc']}"
        if e["failed"]:
            line += f"  (failing checks: {', '.join(e['failed'])})"
        tr.write_line(line)
