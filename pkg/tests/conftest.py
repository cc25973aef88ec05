import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Log one acceptance criterion outcome for the end-of-run summary."""
    def _record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
