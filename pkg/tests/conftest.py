import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance gate criteria")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    if report.when == "call" or report.failed:
        # a setup failure or a call failure both count against the criterion
        prev = _results.get(key)
        _results[key] = (prev is None or prev[0]) and report.passed, report.duration


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), (ok, secs) in sorted(_results.items()):
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}  ({secs:.2f}s)")
