import pytest

from tiltbench.analysis import build_tilts, cartan_table
from tiltbench.algebra import cartan_matrix
from tiltbench.data import load
from tiltbench.endo import endomorphism_algebra

# acceptance outcomes, printed in the terminal summary
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def ex1():
    return load("ex1").algebra


@pytest.fixture(scope="session")
def ex2():
    return load("ex2").algebra


@pytest.fixture(scope="session")
def a4():
    return load("a4").algebra


@pytest.fixture(scope="session")
def kx2():
    return load("kx2").algebra


@pytest.fixture(scope="session")
def ex1_transport(ex1):
    return endomorphism_algebra(ex1, [ex1.simple_index("k")])


@pytest.fixture(scope="session")
def ex2_transport(ex2):
    return endomorphism_algebra(ex2, [ex2.simple_index("k")])


@pytest.fixture(scope="session")
def ex1_tilts(ex1, ex1_transport):
    """T^(0) .. T^(3) for EX1 with I_0 = {k}."""
    return build_tilts(ex1, ex1_transport, 3)


@pytest.fixture(scope="session")
def ex1_table(ex1, ex1_tilts):
    return cartan_table(ex1_tilts, [0], cartan_matrix(ex1))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, desc = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}")
