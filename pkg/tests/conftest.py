import pytest

from meshcam.numerics import make_rng


@pytest.fixture
def rng():
    return make_rng(1234, "tests")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
