"""Per-criterion reporting for the acceptance suite.

Tests marked ``@pytest.mark.criterion(number, title)`` may record named
sub-checks through the ``acceptance`` fixture. At the end of the session one
line per criterion is printed: PASS only when every test of that criterion
passed.
"""
from __future__ import annotations

import os
from collections import defaultdict

import pytest

_TITLES: dict[str, str] = {}
_OUTCOMES: dict[str, list[tuple[str, str]]] = defaultdict(list)
_DETAILS: dict[str, list[str]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("WAVEDIM_FULL") == "1":
        return
    skip = pytest.mark.skip(reason="full-scale run; set WAVEDIM_FULL=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


class Recorder:
    def __init__(self, key: str):
        self.key = key
        self.failed: list[str] = []

    def check(self, label: str, ok: bool, detail: str = "") -> bool:
        text = f"{'ok  ' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "")
        _DETAILS[self.key].append(text)
        print(text)
        if not ok:
            self.failed.append(label)
        return ok

    def verify(self) -> None:
        if self.failed:
            pytest.fail("failed checks: " + ", ".join(self.failed), pytrace=False)


def _key(item) -> str | None:
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return None
    key = str(mark.args[0])
    _TITLES.setdefault(key, mark.args[1] if len(mark.args) > 1 else "")
    return key


@pytest.fixture
def acceptance(request):
    key = _key(request.node)
    if key is None:
        raise RuntimeError("acceptance fixture needs a criterion marker")
    return Recorder(key)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    key = _key(item)
    if key is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[key].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")

    def order(key):
        head = key.split("-")[0]
        return (int(head) if head.isdigit() else 99, key)

    for key in sorted(_OUTCOMES, key=order):
        outcomes = [o for _, o in _OUTCOMES[key]]
        if all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        elif all(o in ("passed", "skipped") for o in outcomes):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        tr.write_line(f"criterion {key:<6} {verdict:<4}  {_TITLES.get(key, '')}")
        for name, o in _OUTCOMES[key]:
            if o != "passed":
                tr.write_line(f"    {o:<7} {name}")
        for line in _DETAILS.get(key, []):
            tr.write_line(f"    {line}")
