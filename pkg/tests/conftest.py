import pytest

# filled by test_acceptance.py: criterion number -> (title, passed, detail)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key:2d}. {title}: {detail}")


@pytest.fixture
def record_criterion():
    def record(key, title, passed, detail):
        ACCEPTANCE[key] = (title, bool(passed), detail)
        return passed
    return record
