import numpy as np
import pytest

from fblkit import InputDistribution, bec, bsc, identity, z_channel

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion."""
    log = request.config.stash[_ACCEPTANCE]

    def record(number, passed, detail):
        log.append((number, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(log, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def uniform2():
    return InputDistribution.uniform(2)


@pytest.fixture
def bsc011():
    return bsc(0.11)


@pytest.fixture
def noiseless():
    return identity(2)


def h2(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)
