"""Semi-discrete conservative right-hand sides.

``dU_j/dt = -(F_{j+1/2} - F_{j-1/2}) / dx`` with one of

* ``roe``:  ``(F_j + F_{j+1})/2 - R|Lambda|R^-1 [U] / 2`` at the arithmetic mean state,
* ``ec``:   the model's entropy-conservative flux ``F*`` alone,
* ``cnd``:  ``F* - D*/2`` where ``D*`` is the model's viscosity-shaped diffusion
  scaled by the global wave speed ``c_max``,
* ``cnd2``: as ``cnd`` but the diffusion acts on minmod-reconstructed edge values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundaryCondition, HyperbolicModel, StateField, extend_with_ghosts, max_wave_speed

ROE = "roe"
CND = "cnd"
CND2 = "cnd2"
EC = "ec"
KINDS = (ROE, CND, CND2, EC)
LIMITERS = ("minmod", "none")


@dataclass(frozen=True)
class SchemeConfig:
    kind: str = CND
    cfl: float = 0.45
    limiter: str = "minmod"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scheme {self.kind!r}; choose from {KINDS}")
        if not 0 < self.cfl < 1:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.limiter not in LIMITERS:
            raise ValueError(f"unknown limiter {self.limiter!r}; choose from {LIMITERS}")

    @property
    def n_ghost(self) -> int:
        return 2 if self.kind == CND2 else 1


def minmod(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.where(np.sign(a) == np.sign(b), np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
    return out if out.ndim else float(out)


def reconstruct(ext: np.ndarray, limiter: str = "minmod"):
    """Edge values of cells ``1 .. len(ext) - 2`` of a ghost-extended array.

    Returns ``(minus, plus)`` with ``minus[i]`` the left-edge and ``plus[i]``
    the right-edge value of ``ext[i + 1]``.
    """
    ext = np.asarray(ext, dtype=float)
    centre = ext[1:-1]
    if limiter == "none":
        slope = np.zeros_like(centre)
    else:
        slope = minmod(ext[2:] - centre, centre - ext[:-2])
    return centre - 0.5 * slope, centre + 0.5 * slope


def roe_interface_flux(model: HyperbolicModel, U_j, U_j1) -> np.ndarray:
    U_j = np.asarray(U_j, dtype=float)
    U_j1 = np.asarray(U_j1, dtype=float)
    absA = model.abs_jacobian(0.5 * (U_j + U_j1))
    diff = np.einsum("...ij,...j->...i", absA, U_j1 - U_j)
    return 0.5 * (model.flux(U_j) + model.flux(U_j1)) - 0.5 * diff


def cnd_interface_flux(model: HyperbolicModel, U_j, U_j1, c_max, edge_j=None, edge_j1=None):
    """``F*(U_j, U_j1) - D/2``; with edges given, ``D`` acts on ``edge_j1 - edge_j``."""
    U_j = np.asarray(U_j, dtype=float)
    U_j1 = np.asarray(U_j1, dtype=float)
    if edge_j is None:
        diffusion = model.interface_diffusion(U_j, U_j1, c_max)
    else:
        diffusion = model.interface_diffusion(edge_j, edge_j1, c_max, 0.5 * (U_j + U_j1))
    return model.ec_flux(U_j, U_j1) - 0.5 * diffusion


def interface_fluxes(model: HyperbolicModel, scheme: SchemeConfig, ext: np.ndarray,
                     c_max: float | None = None) -> np.ndarray:
    """All ``N + 1`` interface fluxes of a ghost-extended array."""
    g = scheme.n_ghost
    n = ext.shape[0] - 2 * g
    left = ext[g - 1:g + n]
    right = ext[g:g + n + 1]
    if scheme.kind == ROE:
        return roe_interface_flux(model, left, right)
    if scheme.kind == EC:
        return model.ec_flux(left, right)
    if c_max is None:
        c_max = max_wave_speed(model, ext)
    if scheme.kind == CND:
        return cnd_interface_flux(model, left, right, c_max)
    minus, plus = reconstruct(ext, scheme.limiter)
    # cells whose edges leave the admissible set fall back to zero slope
    bad = ~(model.admissible(minus) & model.admissible(plus))
    if np.any(bad):
        minus[bad] = ext[1:-1][bad]
        plus[bad] = ext[1:-1][bad]
    # reconstructed cells are ext[1:-1]; shift indices by one
    return cnd_interface_flux(model, left, right, c_max,
                              plus[g - 2:g - 1 + n], minus[g - 1:g + n])


def semidiscrete_rhs(model: HyperbolicModel, scheme: SchemeConfig, field: StateField,
                     left: BoundaryCondition, right: BoundaryCondition, t: float,
                     return_fluxes: bool = False):
    """``dU/dt`` for every cell; optionally also the ``(N + 1, m)`` interface fluxes."""
    return rhs_from_array(model, scheme, field.data, field.grid.dx, left, right, t, return_fluxes)


def rhs_from_array(model, scheme, data, dx, left, right, t, return_fluxes=False):
    ext = extend_with_ghosts(data, left, right, t, scheme.n_ghost)
    F = interface_fluxes(model, scheme, ext)
    rhs = -(F[1:] - F[:-1]) / dx
    return (rhs, F) if return_fluxes else rhs
