import pytest

from gribov.bargmann import GribovParams, build_hamiltonian
from gribov import jacobi, kernel


@pytest.fixture(scope="session")
def half():
    return GribovParams(1.0, 0.5)


@pytest.fixture(scope="session")
def pairs_256(half):
    """Eigenpairs at N = 256 with convergence flags from N = 512."""
    return jacobi.eigen_spectrum(build_hamiltonian(half, 256), 60, reference_trunc=512)


@pytest.fixture(scope="session")
def positive_grid_half(half):
    return kernel.positive_grid(half)


@pytest.fixture(scope="session")
def negative_grid_one():
    return kernel.negative_grid(GribovParams(1.0, 1.0), 20.0)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Records one pass/fail line per acceptance criterion."""

    def record(number: int, passed: bool, detail: str, status: str | None = None) -> bool:
        line = f"[{status or ('PASS' if passed else 'FAIL')}] criterion {number}: {detail}"
        print(line)
        _CRITERIA.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
