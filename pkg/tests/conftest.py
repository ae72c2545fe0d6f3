import pytest


@pytest.fixture(scope="session")
def criterion_report(request):
    """Emit one PASS/FAIL line per acceptance criterion on the live terminal."""
    reporter = request.config.pluginmanager.getplugin("terminalreporter")

    def emit(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        if reporter is not None:
            reporter.write_line(line)
        else:
            print(line)
        assert ok, line

    return emit
