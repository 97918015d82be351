"""Per-criterion pass/fail summary for the acceptance suite.

Acceptance tests carry ``@pytest.mark.acceptance(criterion=k, title=...)``;
a criterion passes only if every test tagged with it passes.
"""

from collections import OrderedDict

import pytest

_RESULTS = OrderedDict()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        k = marker.kwargs["criterion"]
        entry = _RESULTS.setdefault(k, {"title": marker.kwargs.get("title", ""), "parts": []})
        entry["parts"].append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_RESULTS):
        entry = _RESULTS[k]
        ok = all(p for _, p in entry["parts"])
        failed = [n for n, p in entry["parts"] if not p]
        suffix = f"  (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {entry['title']}{suffix}")
