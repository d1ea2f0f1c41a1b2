"""Compressible Euler equations with an ideal-gas equation of state.

Conserved variables are ``(rho, rho u, E)`` with ``E = p/(gamma-1) + rho u^2/2``.
The entropy pair is ``S = -rho s/(gamma-1)``, ``Q = u S`` with
``s = log p - gamma log rho``. The convective two-point flux is the
Ismail-Roe entropy-conservative flux built from the parameter vector
``z = (sqrt(rho/p), sqrt(rho/p) u, sqrt(rho p))``.
"""
from __future__ import annotations

import numpy as np

from .core import HyperbolicModel, InadmissibleStateError

DEFAULT_GAMMA = 1.4
NAVIER_STOKES = "ns"
LAPLACIAN = "laplacian"

# |b - a|/(a + b) below this switches log_mean to its series expansion
LOG_MEAN_SWITCH = 1e-4


def primitive_to_conserved(W, gamma: float = DEFAULT_GAMMA) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    rho, u, p = W[..., 0], W[..., 1], W[..., 2]
    if np.any(rho <= 0) or np.any(p <= 0):
        raise InadmissibleStateError("density and pressure must be positive")
    return np.stack([rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u], axis=-1)


def conserved_to_primitive(U, gamma: float = DEFAULT_GAMMA) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    rho = U[..., 0]
    if np.any(rho <= 0):
        raise InadmissibleStateError("density must be positive")
    u = U[..., 1] / rho
    p = (gamma - 1.0) * (U[..., 2] - 0.5 * rho * u * u)
    if np.any(p <= 0):
        raise InadmissibleStateError("pressure must be positive")
    return np.stack([rho, u, p], axis=-1)


def log_mean(a, b):
    """Logarithmic mean ``(b - a)/(log b - log a)``, exact at ``a == b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("log_mean needs positive arguments")
    # order the pair so the result is bitwise symmetric
    a, b = np.minimum(a, b), np.maximum(a, b)
    f = (b - a) / (a + b)
    u = f * f
    small = np.abs(f) < LOG_MEAN_SWITCH
    with np.errstate(divide="ignore", invalid="ignore"):
        far = (b - a) / np.log1p((b - a) / a)
    # log(b/a) = 2 atanh(f) = 2 f (1 + u/3 + u^2/5 + u^3/7 + ...)
    near = 0.5 * (a + b) / (1.0 + u / 3.0 + u * u / 5.0 + u ** 3 / 7.0)
    out = np.where(small, near, far)
    return out if out.ndim else float(out)


def temperature(U, gamma: float = DEFAULT_GAMMA) -> np.ndarray:
    W = conserved_to_primitive(U, gamma)
    return W[..., 2] / ((gamma - 1.0) * W[..., 0])


def euler_ns_interface_diffusion(left_values, right_values, c_max, nu=1.0, kappa=1.0):
    """Navier-Stokes-shaped interface diffusion from ``(u, theta)`` pairs.

    Returns ``c_max * (0, nu du, nu d(u^2)/2 + kappa d theta)`` with ``d`` the
    right-minus-left difference. Works unchanged on cell values (first order)
    or on reconstructed edge values (second order).
    """
    ul, thl = np.asarray(left_values[0], dtype=float), np.asarray(left_values[1], dtype=float)
    ur, thr = np.asarray(right_values[0], dtype=float), np.asarray(right_values[1], dtype=float)
    c = np.asarray(c_max, dtype=float)
    du = ur - ul
    d2 = c * nu * du
    d3 = c * (0.5 * nu * (ur * ur - ul * ul) + kappa * (thr - thl))
    return np.stack([np.zeros_like(d2), d2, d3], axis=-1)


class EulerModel(HyperbolicModel):
    m = 3
    name = "euler"
    component_names = ("rho", "m", "E")

    def __init__(self, gamma: float = DEFAULT_GAMMA, viscosity: str = NAVIER_STOKES,
                 nu: float = 1.0, kappa: float = 1.0):
        if gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if viscosity not in (NAVIER_STOKES, LAPLACIAN):
            raise ValueError(f"unknown viscosity kind {viscosity!r} (expected 'ns' or 'laplacian')")
        if nu < 0 or kappa < 0:
            raise ValueError("nu and kappa must be nonnegative")
        self.gamma = gamma
        self.viscosity = viscosity
        self.nu = nu
        self.kappa = kappa

    def primitive(self, U):
        return conserved_to_primitive(U, self.gamma)

    def conserved(self, W):
        return primitive_to_conserved(W, self.gamma)

    def admissible(self, U):
        U = np.asarray(U, dtype=float)
        rho = U[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            p = (self.gamma - 1.0) * (U[..., 2] - 0.5 * U[..., 1] ** 2 / rho)
        return np.all(np.isfinite(U), axis=-1) & (rho > 0) & (p > 0)

    def sound_speed(self, U):
        W = self.primitive(U)
        return np.sqrt(self.gamma * W[..., 2] / W[..., 0])

    def flux(self, U):
        U = np.asarray(U, dtype=float)
        rho, u, p = np.moveaxis(self.primitive(U), -1, 0)
        E = U[..., 2]
        return np.stack([rho * u, rho * u * u + p, (E + p) * u], axis=-1)

    def eigenvalues(self, U):
        W = self.primitive(U)
        u = W[..., 1]
        c = np.sqrt(self.gamma * W[..., 2] / W[..., 0])
        return np.stack([u - c, u, u + c], axis=-1)

    def eigen_batch(self, U):
        U = np.asarray(U, dtype=float)
        rho, u, p = np.moveaxis(self.primitive(U), -1, 0)
        c = np.sqrt(self.gamma * p / rho)
        H = (U[..., 2] + p) / rho
        one = np.ones_like(u)
        R = np.stack([
            np.stack([one, one, one], axis=-1),
            np.stack([u - c, u, u + c], axis=-1),
            np.stack([H - u * c, 0.5 * u * u, H + u * c], axis=-1),
        ], axis=-2)
        return np.stack([u - c, u, u + c], axis=-1), R

    def physical_entropy(self, U):
        W = self.primitive(U)
        return np.log(W[..., 2]) - self.gamma * np.log(W[..., 0])

    def entropy(self, U):
        rho = np.asarray(U, dtype=float)[..., 0]
        return -rho * self.physical_entropy(U) / (self.gamma - 1.0)

    def entropy_flux(self, U):
        U = np.asarray(U, dtype=float)
        return U[..., 1] / U[..., 0] * self.entropy(U)

    def entropy_vars(self, U):
        rho, u, p = np.moveaxis(self.primitive(U), -1, 0)
        g = self.gamma
        s = np.log(p) - g * np.log(rho)
        beta = rho / p
        return np.stack([(g - s) / (g - 1.0) - 0.5 * beta * u * u, beta * u, -beta], axis=-1)

    def entropy_potential(self, U):
        return np.asarray(U, dtype=float)[..., 1].copy()

    def viscosity_matrix(self, U):
        """Jacobian of ``(0, nu u, nu u^2/2 + kappa theta)`` in conserved variables
        for the Navier-Stokes kind, the identity for the Laplacian kind."""
        U = np.asarray(U, dtype=float)
        if self.viscosity == LAPLACIAN:
            return np.broadcast_to(np.eye(3), U.shape[:-1] + (3, 3)).copy()
        rho, mom, E = U[..., 0], U[..., 1], U[..., 2]
        u = mom / rho
        nu, ka = self.nu, self.kappa
        zero = np.zeros_like(rho)
        # theta = E/rho - u^2/2
        row2 = np.stack([-nu * u / rho, nu / rho, zero], axis=-1)
        row3 = np.stack([
            nu * (-u * u / rho) + ka * (-E / rho ** 2 + u * u / rho),
            nu * u / rho - ka * u / rho,
            ka / rho,
        ], axis=-1)
        return np.stack([np.stack([zero, zero, zero], axis=-1), row2, row3], axis=-2)

    def ec_flux(self, Ul, Ur):
        Wl = self.primitive(Ul)
        Wr = self.primitive(Ur)
        g = self.gamma

        def params(W):
            rho, u, p = W[..., 0], W[..., 1], W[..., 2]
            z1 = np.sqrt(rho / p)
            return z1, z1 * u, np.sqrt(rho * p)

        z1l, z2l, z3l = params(Wl)
        z1r, z2r, z3r = params(Wr)
        z1m, z2m, z3m = 0.5 * (z1l + z1r), 0.5 * (z2l + z2r), 0.5 * (z3l + z3r)
        z1L, z3L = log_mean(z1l, z1r), log_mean(z3l, z3r)
        f1 = z2m * z3L
        umean = z2m / z1m
        f2 = z3m / z1m + umean * f1
        f3 = 0.5 * umean * ((g + 1.0) / (g - 1.0) * z3L / z1L + f2)
        return np.stack([f1, f2, f3], axis=-1)

    def interface_diffusion(self, Ul, Ur, c_max, U_avg=None):
        if self.viscosity == LAPLACIAN:
            return super().interface_diffusion(Ul, Ur, c_max, U_avg)
        Wl, Wr = self.primitive(Ul), self.primitive(Ur)
        gm1 = self.gamma - 1.0
        thl = Wl[..., 2] / (gm1 * Wl[..., 0])
        thr = Wr[..., 2] / (gm1 * Wr[..., 0])
        return euler_ns_interface_diffusion((Wl[..., 1], thl), (Wr[..., 1], thr), c_max,
                                            self.nu, self.kappa)
