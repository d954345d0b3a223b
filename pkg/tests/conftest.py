"""One PASS/FAIL line per acceptance criterion in the terminal summary."""

from collections import defaultdict

import pytest

_OUTCOMES = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        ok = rep.outcome == "passed" and not hasattr(rep, "wasxfail")
        _OUTCOMES[mark.args[0]].append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        tests = _OUTCOMES[n]
        status = "PASS" if all(ok for _, ok in tests) else "FAIL"
        failed = [name for name, ok in tests if not ok]
        extra = f" (not met: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {status} [{len(tests)} test(s)]{extra}")
