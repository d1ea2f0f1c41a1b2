"""Grids, cell-average storage, the system-model interface and ghost cells.

Every model works on arrays whose last axis holds the ``m`` conserved
components, so a single state has shape ``(m,)`` and a whole grid has shape
``(N, m)``. All model methods broadcast over the leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np


class ModelError(ValueError):
    """A model was asked for something it cannot provide."""


class InadmissibleStateError(ModelError):
    """State outside the admissible set (e.g. negative pressure)."""


class SolverError(RuntimeError):
    """Time stepping failed (blow-up, non-finite values, step budget)."""


@dataclass(frozen=True)
class Grid:
    x_left: float
    x_right: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")
        if not self.x_left < self.x_right:
            raise ValueError(f"degenerate domain [{self.x_left}, {self.x_right}]")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def interfaces(self) -> np.ndarray:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    @property
    def centers(self) -> np.ndarray:
        xi = self.interfaces
        return 0.5 * (xi[:-1] + xi[1:])


def make_grid(x_left: float, x_right: float, n_cells: int) -> Grid:
    return Grid(float(x_left), float(x_right), int(n_cells))


@dataclass
class StateField:
    """Cell averages ``data[j] ~ U_j`` on ``grid`` at ``time``."""

    grid: Grid
    data: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[0] != self.grid.n_cells:
            raise ValueError(
                f"data must have shape ({self.grid.n_cells}, m), got {self.data.shape}"
            )
        if not np.all(np.isfinite(self.data)):
            raise ValueError("state field contains non-finite values")

    @property
    def m(self) -> int:
        return self.data.shape[1]

    def copy(self) -> "StateField":
        return StateField(self.grid, self.data.copy(), self.time)

    def total(self) -> np.ndarray:
        """Discrete integral sum_j U_j dx per component."""
        return self.data.sum(axis=0) * self.grid.dx


@dataclass(frozen=True)
class Eigensystem:
    lambdas: np.ndarray
    right_vectors: np.ndarray  # columns are R_i
    k_negative: int

    def check_noncharacteristic(self, tol: float = 1e-10) -> None:
        """Raise unless every eigenvalue is bounded away from zero by ``tol``."""
        if np.any(np.abs(self.lambdas) <= tol):
            raise ModelError(
                f"characteristic boundary: eigenvalue within {tol} of zero "
                f"({self.lambdas})"
            )


def normalize_columns(R: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Scale each column so its first non-negligible entry equals one."""
    R = np.array(R, dtype=float)
    for i in range(R.shape[1]):
        col = R[:, i]
        idx = np.flatnonzero(np.abs(col) > tol * max(np.abs(col).max(), 1.0))
        if idx.size == 0:
            raise ModelError("zero eigenvector")
        R[:, i] = col / col[idx[0]]
    return R


def eigensystem_from_matrix(A: np.ndarray) -> Eigensystem:
    A = np.asarray(A, dtype=float)
    lam, R = np.linalg.eig(A)
    if np.any(np.abs(np.imag(lam)) > 1e-12 * max(1.0, np.abs(lam).max())):
        raise ModelError(f"matrix is not hyperbolic: eigenvalues {lam}")
    lam = np.real(lam)
    R = np.real(R)
    order = np.argsort(lam)
    lam, R = lam[order], R[:, order]
    if np.any(np.diff(lam) <= 1e-12 * max(1.0, np.abs(lam).max())):
        raise ModelError(f"matrix is not strictly hyperbolic: eigenvalues {lam}")
    return Eigensystem(lam, normalize_columns(R), int(np.sum(lam < 0)))


class HyperbolicModel:
    """Interface of a system ``U_t + F(U)_x = eps (B(U) U_x)_x``.

    Subclasses supply the flux, eigenstructure, an entropy pair, the viscosity
    matrix and a two-point entropy-conservative flux. The remaining methods
    have generic defaults that subclasses may specialize for speed.
    """

    m: int = 0
    name: str = "model"
    component_names: tuple = ()

    def flux(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eigenvalues(self, U: np.ndarray) -> np.ndarray:
        """Ascending eigenvalues of F_U, shape ``U.shape``."""
        raise NotImplementedError

    def eigen_batch(self, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues ``(..., m)`` and right eigenvectors ``(..., m, m)``."""
        raise NotImplementedError

    def jacobian_eigen(self, U: np.ndarray) -> Eigensystem:
        lam, R = self.eigen_batch(np.asarray(U, dtype=float))
        return Eigensystem(lam, normalize_columns(R), int(np.sum(lam < 0)))

    def entropy(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def entropy_flux(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def entropy_vars(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def entropy_potential(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        return np.sum(self.entropy_vars(U) * self.flux(U), axis=-1) - self.entropy_flux(U)

    def viscosity_matrix(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def ec_flux(self, Ul: np.ndarray, Ur: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def interface_diffusion(self, Ul, Ur, c_max, U_avg=None) -> np.ndarray:
        """``c_max B(U_avg) (Ur - Ul)``; ``U_avg`` defaults to the arithmetic mean."""
        Ul = np.asarray(Ul, dtype=float)
        Ur = np.asarray(Ur, dtype=float)
        if U_avg is None:
            U_avg = 0.5 * (Ul + Ur)
        B = self.viscosity_matrix(U_avg)
        return np.asarray(c_max)[..., None] * np.einsum("...ij,...j->...i", B, Ur - Ul)

    def abs_jacobian(self, U: np.ndarray) -> np.ndarray:
        """``R |Lambda| R^{-1}`` at each state."""
        lam, R = self.eigen_batch(U)
        return np.einsum("...ij,...j,...jk->...ik", R, np.abs(lam), np.linalg.inv(R))

    def admissible(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        return np.all(np.isfinite(U), axis=-1)

    def check_admissible(self, U: np.ndarray) -> None:
        ok = self.admissible(U)
        if not np.all(ok):
            bad = np.argwhere(~np.atleast_1d(ok))[0]
            raise InadmissibleStateError(f"{self.name}: inadmissible state at index {tuple(bad)}")


@dataclass(frozen=True)
class Dirichlet:
    """Ghost cell holds ``value`` (a constant m-vector or a function of t)."""

    value: Union[Callable[[float], np.ndarray], np.ndarray, tuple]

    def at(self, t: float) -> np.ndarray:
        v = self.value(t) if callable(self.value) else self.value
        return np.asarray(v, dtype=float)


@dataclass(frozen=True)
class Open:
    """Zero-order extrapolation: ghost copies the adjacent interior cell."""


BoundaryCondition = Union[Dirichlet, Open]


def init_field(model: HyperbolicModel, grid: Grid, init: Callable) -> StateField:
    """Sample ``init(x)`` at the cell centers."""
    rows = [np.asarray(init(x), dtype=float).reshape(-1) for x in grid.centers]
    data = np.vstack(rows)
    if data.shape[1] != model.m:
        raise ValueError(f"init returns {data.shape[1]} components, model has {model.m}")
    if not np.all(np.isfinite(data)):
        raise ValueError("init produced non-finite values")
    return StateField(grid, data, 0.0)


def _ghost_rows(bc: BoundaryCondition, edge_row: np.ndarray, t: float, n: int) -> np.ndarray:
    if isinstance(bc, Dirichlet):
        v = bc.at(t)
        if v.shape != edge_row.shape:
            raise ValueError(f"Dirichlet value has shape {v.shape}, expected {edge_row.shape}")
        return np.tile(v, (n, 1))
    if isinstance(bc, Open):
        return np.tile(edge_row, (n, 1))
    raise TypeError(f"unknown boundary condition {bc!r}")


def extend_with_ghosts(data: np.ndarray, left: BoundaryCondition, right: BoundaryCondition,
                       t: float, n_ghost: int = 1) -> np.ndarray:
    """Array version of :func:`apply_boundary` with ``n_ghost`` cells per side."""
    return np.vstack([
        _ghost_rows(left, data[0], t, n_ghost),
        data,
        _ghost_rows(right, data[-1], t, n_ghost),
    ])


def apply_boundary(field: StateField, left: BoundaryCondition, right: BoundaryCondition,
                   t: float, n_ghost: int = 1) -> np.ndarray:
    return extend_with_ghosts(field.data, left, right, t, n_ghost)


def max_wave_speed(model: HyperbolicModel, field) -> float:
    """``max_j |lambda|_max(U_j)``; accepts a StateField or a raw ``(N, m)`` array."""
    data = field.data if isinstance(field, StateField) else np.asarray(field, dtype=float)
    lam = model.eigenvalues(data)
    if not np.all(np.isfinite(lam)):
        raise ModelError(f"{model.name}: non-hyperbolic state (complex eigenvalues)")
    return float(np.max(np.abs(lam)))
