import pytest

CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record a numbered acceptance criterion; the outcome is printed at the end."""
    def record(number, name, ok, detail=""):
        CRITERIA[number] = (name, bool(ok), detail)
        print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {name} {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        name, ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"{n:2d} {'PASS' if ok else 'FAIL'}  {name}  {detail}")
