from __future__ import annotations

from collections import OrderedDict
from functools import partial

import pytest
from hypothesis import settings

from gradlie.core import BasisElement, TruncatedAlgebra

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def _abelian(n: int, N: int) -> TruncatedAlgebra:
    basis = [BasisElement(i, 1, f"a{i}") for i in range(1, n + 1)]
    return TruncatedAlgebra(f"abelian{n}", basis, {}, N, rebuild=partial(_abelian, n))


@pytest.fixture
def abelian():
    """Factory for abelian algebras spanned by degree-1 elements."""
    return _abelian


# -- acceptance summary: one PASS/FAIL line per criterion --------------------

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    info = getattr(report, "criterion", None)
    if info is None:
        return
    number, title = info
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "tests": 0})
    entry["tests"] += 1
    if not report.passed:
        entry["passed"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = (mark.args[0], mark.args[1] if len(mark.args) > 1 else "")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] else "FAIL"
        tr.write_line(f"criterion {number:>2}: {status}  {entry['title']}")
