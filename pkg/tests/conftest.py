"""Prints one PASS/FAIL line per acceptance criterion after the run."""

_LABELS: dict[str, tuple[str, str]] = {}
_OUTCOMES: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(tag, text): acceptance criterion covered by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _LABELS[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _LABELS:
        return
    if report.failed:
        _OUTCOMES[report.nodeid] = "FAIL"
    elif report.skipped:
        _OUTCOMES.setdefault(report.nodeid, "SKIP")
    elif report.when == "call":
        _OUTCOMES.setdefault(report.nodeid, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for nodeid, (tag, text) in _LABELS.items():
        if nodeid in _OUTCOMES:
            terminalreporter.write_line(f"{_OUTCOMES[nodeid]:4}  {tag:>3}  {text}")
