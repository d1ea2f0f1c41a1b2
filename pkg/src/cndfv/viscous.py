"""Resolved viscous reference solutions at a fixed small viscosity.

The convective part uses the model's entropy-conservative flux; the viscous
part is written in flux form, ``G_{j+1/2} = F*_{j+1/2} - (eps/dx) d_{j+1/2}``,
so that ``(d_{j+1/2} - d_{j-1/2})`` is the pointwise second difference of the
chosen kind and conservation is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundaryCondition, HyperbolicModel, StateField, extend_with_ghosts, max_wave_speed
from .euler import EulerModel, euler_ns_interface_diffusion, temperature
from .timeint import RunTrace, integrate

IDENTITY = "identity"
MATRIX = "matrix"
NAVIER_STOKES = "navier_stokes"


@dataclass(frozen=True)
class ViscousSpec:
    base_model: HyperbolicModel
    epsilon: float
    diffusion_kind: str = MATRIX
    nu: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.diffusion_kind not in (IDENTITY, MATRIX, NAVIER_STOKES):
            raise ValueError(f"unknown diffusion kind {self.diffusion_kind!r}")
        if self.diffusion_kind == NAVIER_STOKES:
            if not isinstance(self.base_model, EulerModel):
                raise ValueError("navier_stokes diffusion needs an Euler base model")
            if self.nu < 0 or self.kappa < 0:
                raise ValueError("nu and kappa must be nonnegative")

    def diffusion_bound(self, data: np.ndarray) -> float:
        if self.diffusion_kind == IDENTITY:
            return 1.0
        if self.diffusion_kind == NAVIER_STOKES:
            return max(self.nu, self.kappa, 1.0)
        B = self.base_model.viscosity_matrix(data)
        return float(np.max(np.sum(np.abs(B), axis=-1)))


def viscous_interface_terms(spec: ViscousSpec, ext: np.ndarray) -> np.ndarray:
    """``d_{j+1/2}``: the first differences whose divergence is the diffusion."""
    left, right = ext[:-1], ext[1:]
    if spec.diffusion_kind == IDENTITY:
        return right - left
    if spec.diffusion_kind == NAVIER_STOKES:
        gamma = spec.base_model.gamma
        u = ext[:, 1] / ext[:, 0]
        th = temperature(ext, gamma)
        return euler_ns_interface_diffusion((u[:-1], th[:-1]), (u[1:], th[1:]), 1.0,
                                            spec.nu, spec.kappa)
    B = spec.base_model.viscosity_matrix(0.5 * (left + right))
    return np.einsum("...ij,...j->...i", B, right - left)


def _rhs_and_fluxes(spec, data, dx, left_bc, right_bc, t):
    ext = extend_with_ghosts(data, left_bc, right_bc, t, 1)
    G = spec.base_model.ec_flux(ext[:-1], ext[1:]) \
        - (spec.epsilon / dx) * viscous_interface_terms(spec, ext)
    return -(G[1:] - G[:-1]) / dx, G


def viscous_rhs(spec: ViscousSpec, field: StateField, left: BoundaryCondition,
                right: BoundaryCondition, t: float) -> np.ndarray:
    return _rhs_and_fluxes(spec, field.data, field.grid.dx, left, right, t)[0]


def run_viscous(spec: ViscousSpec, field: StateField, left: BoundaryCondition,
                right: BoundaryCondition, t_final: float, cfl_adv: float = 0.45,
                cfl_diff: float = 0.4, trace: RunTrace | None = None, callback=None,
                max_steps: int = 10_000_000) -> StateField:
    """SSP-RK2 with ``dt = min(cfl_adv dx / c_max, cfl_diff dx^2 / (eps b_max))``."""
    dx = field.grid.dx
    if t_final <= field.time:
        return field.copy()

    def rhs_and_fluxes(data, t):
        return _rhs_and_fluxes(spec, data, dx, left, right, t)

    def dt_for(data):
        dt_adv = cfl_adv * dx / max_wave_speed(spec.base_model, data)
        dt_diff = cfl_diff * dx * dx / (spec.epsilon * spec.diffusion_bound(data))
        return min(dt_adv, dt_diff)

    return integrate(field, t_final, rhs_and_fluxes, dt_for, max_steps, trace, callback)
