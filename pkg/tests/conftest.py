import random

import pytest

from maryec.curve import SECG_CURVES, SMALL_CURVES, registry_get


@pytest.fixture(params=SMALL_CURVES)
def small_curve(request):
    return registry_get(request.param)


@pytest.fixture(params=SECG_CURVES)
def secg_curve(request):
    return registry_get(request.param)


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
