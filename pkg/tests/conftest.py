import re

_CRITERIA: dict[int, str] = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.failed:
        _CRITERIA[n] = f"FAIL  criterion {n} ({m.group(2).replace('_', ' ')})"
    elif report.when == "call" and n not in _CRITERIA:
        _CRITERIA[n] = f"PASS  criterion {n} ({m.group(2).replace('_', ' ')})"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])
