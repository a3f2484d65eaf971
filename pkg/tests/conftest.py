import warnings

import pytest

from event_eso import BelowRStarWarning, LinearDesign, NonlinearDesign, SimConfig, section_iv_noise, section_iv_plant

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sec4_plant():
    return section_iv_plant()


@pytest.fixture(scope="session")
def sec4_noise():
    return section_iv_noise()


@pytest.fixture(scope="session")
def sec4_linear():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BelowRStarWarning)
        return LinearDesign((3.0, 3.0, 1.0), r=15.0)


@pytest.fixture(scope="session")
def sec4_nonlinear():
    return NonlinearDesign((3.0, 3.0, 1.0), r=15.0, nu=6 / 7, p=3.0)


@pytest.fixture
def short_sim():
    return SimConfig(t_end=0.3, t_transient=0.15)
