import pytest

from selfsim import catalog

# Acceptance results, filled by tests/test_acceptance.py and echoed at the end of the run.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def G():
    return catalog.load("G").machine


@pytest.fixture(scope="session")
def H():
    return catalog.load("H").machine


@pytest.fixture(scope="session")
def grig():
    return catalog.load("grigorchuk").machine


@pytest.fixture(scope="session")
def grig_exp():
    return catalog.load("grigorchuk-exp").machine


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one test per acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail}")
