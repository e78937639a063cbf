import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(capsys):
    """Record and print one acceptance line: ``verdict(k, ok, detail)``."""

    def record(label, ok, detail=""):
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(line)


def _order(line):
    label = line.split(":")[0].split()[1]
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label
