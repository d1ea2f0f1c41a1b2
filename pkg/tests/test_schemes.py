import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cndfv.core import Dirichlet, HyperbolicModel, Open, StateField, extend_with_ghosts, init_field, make_grid
from cndfv.euler import EulerModel
from cndfv.schemes import (
    SchemeConfig,
    cnd_interface_flux,
    interface_fluxes,
    minmod,
    reconstruct,
    rhs_from_array,
    roe_interface_flux,
    semidiscrete_rhs,
)
from cndfv.swlin import EDDY, LAPLACIAN, SwLinModel

from conftest import ALL_MODELS, random_states


class LinearModel(HyperbolicModel):
    name = "linear"

    def __init__(self, A):
        self.A = np.asarray(A, dtype=float)
        self.m = self.A.shape[0]
        lam, R = np.linalg.eig(self.A)
        order = np.argsort(lam.real)
        self._lam, self._R = lam.real[order], R.real[:, order]

    def flux(self, U):
        return np.asarray(U) @ self.A.T

    def eigenvalues(self, U):
        return np.broadcast_to(self._lam, np.shape(U))

    def eigen_batch(self, U):
        shape = np.shape(U)[:-1]
        return (np.broadcast_to(self._lam, shape + (self.m,)),
                np.broadcast_to(self._R, shape + (self.m, self.m)))


def _random_hyperbolic(rng, m):
    R = rng.normal(size=(m, m)) + 3 * np.eye(m)
    lam = np.sort(rng.uniform(-3, 3, m)) + 0.1 * np.arange(m)
    return R @ np.diag(lam) @ np.linalg.inv(R)


# -- minmod and reconstruction ---------------------------------------------------

@pytest.mark.parametrize("a, b, expected", [(1, 2, 1), (-1, 2, 0), (0, 5, 0), (-3, -2, -2)])
def test_minmod(a, b, expected):
    assert minmod(a, b) == expected


def test_reconstruct_constant():
    ext = np.full((6, 2), 1.5)
    minus, plus = reconstruct(ext)
    assert np.all(minus == 1.5) and np.all(plus == 1.5)


def test_reconstruct_linear():
    ext = np.arange(6.0)[:, None]
    minus, plus = reconstruct(ext)
    np.testing.assert_array_equal(minus[:, 0], np.arange(1, 5) - 0.5)
    np.testing.assert_array_equal(plus[:, 0], np.arange(1, 5) + 0.5)


def test_reconstruct_clips_extremum():
    minus, plus = reconstruct(np.array([[0.0], [1.0], [0.0]]))
    assert minus[0, 0] == plus[0, 0] == 1.0


@given(arrays(float, (12, 3), elements=st.floats(-1e3, 1e3)))
def test_reconstruct_local_bounds(ext):
    minus, plus = reconstruct(ext)
    lo = np.minimum(np.minimum(ext[:-2], ext[1:-1]), ext[2:])
    hi = np.maximum(np.maximum(ext[:-2], ext[1:-1]), ext[2:])
    for edge in (minus, plus):
        assert np.all(edge >= lo - 1e-12 * (1 + np.abs(lo)))
        assert np.all(edge <= hi + 1e-12 * (1 + np.abs(hi)))


def test_scheme_config_validation():
    with pytest.raises(ValueError):
        SchemeConfig("upwind")
    with pytest.raises(ValueError):
        SchemeConfig("cnd", cfl=1.5)
    with pytest.raises(ValueError):
        SchemeConfig("cnd2", limiter="superbee")
    assert SchemeConfig("cnd2").n_ghost == 2 and SchemeConfig("roe").n_ghost == 1


# -- Roe flux ---------------------------------------------------------------

@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_roe_is_exact_upwind_for_linear_systems(m, seed):
    rng = np.random.default_rng(seed)
    model = LinearModel(_random_hyperbolic(rng, m))
    R, lam = model._R, model._lam
    Rinv = np.linalg.inv(R)
    Ap = R @ np.diag(np.maximum(lam, 0)) @ Rinv
    Am = R @ np.diag(np.minimum(lam, 0)) @ Rinv
    Ul, Ur = rng.normal(size=(5, m)), rng.normal(size=(5, m))
    expected = Ul @ Ap.T + Ur @ Am.T
    np.testing.assert_allclose(roe_interface_flux(model, Ul, Ur), expected, atol=1e-10)


@pytest.mark.parametrize("model", ALL_MODELS)
def test_roe_consistency(model, rng):
    U = random_states(model, rng, 50)
    np.testing.assert_allclose(roe_interface_flux(model, U, U), model.flux(U), rtol=1e-13, atol=1e-13)


def test_roe_sw_step_value():
    model = SwLinModel()
    A = model.A
    lam, R = np.linalg.eig(A)
    absA = R @ np.diag(np.abs(lam)) @ np.linalg.inv(R)
    expected = A @ [2.0, 1.0] - 0.5 * absA @ [-2.0, 0.0]
    np.testing.assert_allclose(roe_interface_flux(model, np.array([3.0, 1.0]), np.array([1.0, 1.0])),
                               expected, atol=1e-14)


# -- CND flux -----------------------------------------------------------------

@pytest.mark.parametrize("model", ALL_MODELS)
def test_cnd_consistency(model, rng):
    U = random_states(model, rng, 50)
    np.testing.assert_allclose(cnd_interface_flux(model, U, U, 3.0), model.flux(U), rtol=1e-13)


def test_cnd_eddy_diffuses_velocity_only():
    model = SwLinModel(viscosity=EDDY)
    D = model.interface_diffusion(np.array([1.0, 2.0]), np.array([1.7, 2.5]), 3.0)
    np.testing.assert_allclose(D, [0.0, 1.5])


def test_cnd_laplacian_diffuses_both():
    model = SwLinModel(viscosity=LAPLACIAN)
    D = model.interface_diffusion(np.array([1.0, 2.0]), np.array([1.7, 2.5]), 3.0)
    np.testing.assert_allclose(D, [2.1, 1.5])


@pytest.mark.parametrize("model", ALL_MODELS)
def test_interface_dissipation_sign(model, rng):
    Ul, Ur = random_states(model, rng, 1000), random_states(model, rng, 1000)
    D = model.interface_diffusion(Ul, Ur, 2.5)
    dV = model.entropy_vars(Ur) - model.entropy_vars(Ul)
    assert np.sum(dV * D, axis=-1).min() >= -1e-10


# -- semi-discrete operator --------------------------------------------------------

SCHEMES = ["roe", "cnd", "cnd2", "ec"]


def _sw_step_field(n):
    return init_field(SwLinModel(), make_grid(-1, 1, n), lambda x: (3.0, 1.0) if x < 0 else (1.0, 1.0))


@pytest.mark.parametrize("kind", SCHEMES)
@pytest.mark.parametrize("model", ALL_MODELS)
def test_constant_field_zero_rhs(kind, model):
    U = random_states(model, np.random.default_rng(3), 1)[0]
    f = StateField(make_grid(0, 1, 8), np.tile(U, (8, 1)))
    rhs = semidiscrete_rhs(model, SchemeConfig(kind), f, Dirichlet(U), Open(), 0.0)
    np.testing.assert_allclose(rhs, 0, atol=1e-12 * max(1, np.abs(U).max()))


@pytest.mark.parametrize("kind", SCHEMES)
@pytest.mark.parametrize("model", ALL_MODELS)
def test_conservation_telescoping(kind, model, rng):
    n = 40
    data = random_states(model, rng, n)
    f = StateField(make_grid(0, 2, n), data)
    left = Dirichlet(random_states(model, rng, 1)[0])
    rhs, F = semidiscrete_rhs(model, SchemeConfig(kind), f, left, Open(), 0.0, return_fluxes=True)
    total = rhs.sum(axis=0) * f.grid.dx + (F[-1] - F[0])
    assert np.abs(total).max() <= 1e-12 * max(1.0, np.abs(F).max())


@pytest.mark.parametrize("model", ALL_MODELS)
def test_ec_scheme_entropy_telescopes(model, rng):
    n = 30
    data = random_states(model, rng, n)
    f = StateField(make_grid(0, 1, n), data)
    left, right = Dirichlet(data[0] * 1.1), Open()
    rhs = semidiscrete_rhs(model, SchemeConfig("ec"), f, left, right, 0.0)
    dx = f.grid.dx
    production = np.sum(model.entropy_vars(data) * rhs) * dx
    ext = extend_with_ghosts(data, left, right, 0.0)
    V, Psi = model.entropy_vars(ext), model.entropy_potential(ext)
    F = model.ec_flux(ext[:-1], ext[1:])
    Vbar, Psibar = 0.5 * (V[:-1] + V[1:]), 0.5 * (Psi[:-1] + Psi[1:])
    Qhat = np.sum(Vbar * F, axis=-1) - Psibar
    scale = max(1.0, np.abs(Qhat).max())
    assert abs(production + Qhat[-1] - Qhat[0]) <= 1e-11 * scale


@pytest.mark.parametrize("model", ALL_MODELS)
def test_cnd2_without_slopes_is_cnd(model, rng):
    data = random_states(model, rng, 25)
    f = StateField(make_grid(0, 1, 25), data)
    left = Dirichlet(data[3])
    a = semidiscrete_rhs(model, SchemeConfig("cnd"), f, left, Open(), 0.0)
    b = semidiscrete_rhs(model, SchemeConfig("cnd2", limiter="none"), f, left, Open(), 0.0)
    assert np.array_equal(a, b)


def test_cnd_rhs_support_on_step_data():
    f = _sw_step_field(1000)
    rhs = semidiscrete_rhs(SwLinModel(), SchemeConfig("cnd"), f, Dirichlet((2.0, 1.0)), Open(), 0.0)
    assert np.all(np.isfinite(rhs))
    active = np.flatnonzero(np.abs(rhs).max(axis=1) > 0)
    np.testing.assert_array_equal(active, [0, 499, 500])


def test_equivalent_equation_rate():
    """CND rhs minus (-A U_x + (c dx / 2) B U_xx) shrinks like dx^2 on smooth periodic data."""
    model = SwLinModel(viscosity=EDDY)
    A, B = model.A, model.viscosity_matrix(np.zeros(2))
    c = 1 + np.sqrt(2)
    k = 2 * np.pi
    errors, sizes = [], [32, 64, 128, 256]
    for n in sizes:
        g = make_grid(0, 1, n)
        x = g.centers
        U = np.stack([np.sin(k * x), 0.5 * np.cos(k * x)], axis=-1)
        Ux = np.stack([k * np.cos(k * x), -0.5 * k * np.sin(k * x)], axis=-1)
        Uxx = -k * k * U
        ext = np.vstack([U[-1:], U, U[:1]])
        F = interface_fluxes(model, SchemeConfig("cnd"), ext, c)
        rhs = -(F[1:] - F[:-1]) / g.dx
        target = -Ux @ A.T + 0.5 * c * g.dx * Uxx @ B.T
        errors.append(np.abs(rhs - target).max())
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert rates.min() >= 1.9, rates


def test_rhs_from_array_matches_field_version(rng):
    model = EulerModel()
    data = random_states(model, rng, 12)
    f = StateField(make_grid(0, 1, 12), data)
    left = Dirichlet(model.conserved([2.0, 1.0, 2.0]))
    a = semidiscrete_rhs(model, SchemeConfig("cnd2"), f, left, Open(), 0.0)
    b = rhs_from_array(model, SchemeConfig("cnd2"), data, f.grid.dx, left, Open(), 0.0)
    assert np.array_equal(a, b)
