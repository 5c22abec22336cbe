import os
import sys
from collections import OrderedDict

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


def pytest_collection_finish(session):
    # after deselection, so -k and -m runs only report what they select
    for item in session.items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            entry = _CRITERIA.setdefault(number, {"title": title, "outcomes": {}})
            entry["outcomes"][item.nodeid] = "not run"


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid in entry["outcomes"]:
            if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
                entry["outcomes"][report.nodeid] = report.outcome
            elif report.when == "teardown" and report.outcome == "failed":
                entry["outcomes"][report.nodeid] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = list(entry["outcomes"].values())
        ok = outcomes and all(o == "passed" for o in outcomes)
        status = "PASS" if ok else "FAIL"
        detail = "" if ok else f" ({', '.join(sorted(set(outcomes)))})"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {entry['title']}{detail}")
