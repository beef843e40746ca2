import pytest

_RESULTS = {}
_DETAILS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.fixture
def detail(request):
    """Append a short measured-value note to the criterion's summary line."""
    marker = request.node.get_closest_marker("criterion")
    notes = _DETAILS.setdefault(marker.args[0], []) if marker else []
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _RESULTS[n] = (title, rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, outcome = _RESULTS[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        notes = "; ".join(_DETAILS.get(n, []))
        terminalreporter.write_line(f"[{verdict}] criterion {n}: {title}"
                                    + (f" ({notes})" if notes else ""))
