import pytest


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request):
    """Record a one-line PASS/FAIL for an acceptance criterion, then assert it."""

    def record(number, title, checks, detail=""):
        failed = [name for name, ok in checks.items() if not ok]
        status = "FAIL" if failed else "PASS"
        line = f"[{status}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        if failed:
            line += " failed: " + ", ".join(failed)
        request.config.acceptance_lines.append(line)
        assert not failed, line

    return record
