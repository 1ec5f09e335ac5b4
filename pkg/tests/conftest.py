import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Log one PASS/FAIL line for an acceptance criterion and return the verdict."""

    def _record(number, name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:2d}  {name}: {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
