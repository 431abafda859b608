import numpy as np
import pytest

from furstenberg.model import ModelSpec, canonical_V0

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    def log(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def v0_spec():
    return ModelSpec(N=2, ell=0.1, V=canonical_V0(2), bernoulli_p=0.5)


@pytest.fixture
def free_n1():
    return ModelSpec(N=1, ell=0.5, V=[[0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
