"""Per-criterion summary for the acceptance suite.

Tests in test_acceptance.py are named ``test_c<k>_...``; criterion k passes
when every test carrying its number passes.  Values recorded with
``record_property("measured", ...)`` are echoed next to the verdict.
"""

import re
from collections import defaultdict

_NAME = re.compile(r"test_acceptance\.py::test_c(\d+)_")
_results = defaultdict(list)


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        measured = [v for k, v in report.user_properties if k == "measured"]
        _results[int(m.group(1))].append((report.nodeid.split("::")[-1], report.outcome, measured))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_results):
        ok = all(outcome == "passed" for _, outcome, _ in _results[k])
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}")
        for name, outcome, measured in _results[k]:
            extra = f"  [{'; '.join(measured)}]" if measured else ""
            tr.write_line(f"    {outcome:6s} {name}{extra}")
