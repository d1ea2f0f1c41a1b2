import numpy as np
import pytest

from cndfv.euler import EulerModel
from cndfv.swlin import EDDY, LAPLACIAN, SwLinModel


def random_euler_states(rng, n, gamma=1.4):
    """Conserved states with rho, p in [0.1, 10] and u in [-2, 2]."""
    W = np.column_stack([rng.uniform(0.1, 10, n), rng.uniform(-2, 2, n), rng.uniform(0.1, 10, n)])
    return EulerModel(gamma).conserved(W)


def random_states(model, rng, n):
    if isinstance(model, EulerModel):
        return random_euler_states(rng, n, model.gamma)
    return rng.uniform(-5, 5, (n, model.m))


def fd_gradient(f, U, h=1e-6):
    """Central-difference gradient of a scalar function, relative step."""
    U = np.asarray(U, dtype=float)
    g = np.zeros_like(U)
    for i in range(U.size):
        step = h * max(1.0, abs(U[i]))
        e = np.zeros_like(U)
        e[i] = step
        g[i] = (f(U + e) - f(U - e)) / (2 * step)
    return g


def fd_jacobian(F, U, h=1e-6):
    U = np.asarray(U, dtype=float)
    cols = []
    for i in range(U.size):
        step = h * max(1.0, abs(U[i]))
        e = np.zeros_like(U)
        e[i] = step
        cols.append((F(U + e) - F(U - e)) / (2 * step))
    return np.stack(cols, axis=-1)


ALL_MODELS = [
    pytest.param(SwLinModel(viscosity=EDDY), id="swlin-eddy"),
    pytest.param(SwLinModel(viscosity=LAPLACIAN), id="swlin-laplacian"),
    pytest.param(EulerModel(), id="euler-ns"),
    pytest.param(EulerModel(viscosity="laplacian"), id="euler-laplacian"),
]


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES: dict = {}


def record_acceptance(number: int, passed: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
