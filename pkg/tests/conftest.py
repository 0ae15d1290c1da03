import numpy as np
import pytest

from hyperstab import PolySystem, Tensor

ACCEPTANCE_LINES = []


def example_a1():
    return Tensor(np.full((2, 2), 0.1))


def example_a2():
    return Tensor.from_entries(3, 2, {(1, 1, 2): 0.5, (2, 1, 2): 0.5, (1, 2, 1): 0.5, (2, 2, 1): 0.5}, fill=1.0)


def example_a2_signed():
    return Tensor.from_entries(3, 2, {(1, 1, 2): 1.5, (2, 1, 2): 1.5, (1, 2, 1): -0.5, (2, 2, 1): -0.5}, fill=1.0)


@pytest.fixture
def A1():
    return example_a1()


@pytest.fixture
def A2():
    return example_a2()


@pytest.fixture
def A2_tilde():
    return example_a2_signed()


@pytest.fixture
def quad_sys():
    return PolySystem(2, {2: example_a1(), 3: example_a2()})


@pytest.fixture
def quad_sys_tilde():
    return PolySystem(2, {2: example_a1(), 3: example_a2_signed()})


@pytest.fixture
def ones3():
    return Tensor.full(3, 2, 1.0)


@pytest.fixture
def common_sys():
    """Linear part 0.25 everywhere plus the all-ones cubic: shares the uniform Perron vector."""
    return PolySystem(2, {2: Tensor(np.full((2, 2), 0.25)), 3: Tensor.full(3, 2, 1.0)})


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
