import pytest


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def record_criterion(request):
    """Record one PASS/FAIL line per acceptance criterion; the lines are echoed at the end."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        request.config.acceptance_lines[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
