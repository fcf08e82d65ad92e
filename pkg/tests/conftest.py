import pytest

# criterion number -> (passed, one-line summary); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n][1])


@pytest.fixture
def record_criterion():
    def record(result):
        ACCEPTANCE[result.number] = (result.passed, result.line())
        print(result.line())
    return record
