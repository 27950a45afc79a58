import pytest

# (criterion, passed, detail) in the order the acceptance tests ran
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    The test sets ``rec.detail`` as it goes; the outcome is taken from the
    test itself, so an exception still produces a FAIL line.
    """
    class Recorder:
        detail = ""

    rec = Recorder()
    yield rec
    call = getattr(request.node, "rep_call", None)
    passed = call is not None and call.passed
    name = request.node.get_closest_marker("criterion").args[0]
    ACCEPTANCE_LINES.append((name, passed, rec.detail))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
