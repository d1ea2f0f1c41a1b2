"""Linearized shallow water equations around a background state (h~, u~)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Eigensystem, HyperbolicModel, eigensystem_from_matrix

LAPLACIAN = "laplacian"
EDDY = "eddy"


@dataclass(frozen=True)
class SwLinParams:
    h_tilde: float = 2.0
    u_tilde: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        if self.h_tilde <= 0 or self.g <= 0:
            raise ValueError("need h_tilde > 0 and g > 0")


def sw_matrix(params: SwLinParams) -> np.ndarray:
    return np.array([[params.u_tilde, params.h_tilde],
                     [params.g, params.u_tilde]])


def sw_viscosity(kind: str) -> np.ndarray:
    if kind == LAPLACIAN:
        return np.eye(2)
    if kind == EDDY:
        return np.array([[0.0, 0.0], [0.0, 1.0]])
    raise ValueError(f"unknown viscosity kind {kind!r} (expected 'laplacian' or 'eddy')")


def sw_symmetrizer(params: SwLinParams) -> np.ndarray:
    # energy 1/2 (g h^2 + h~ u^2); S A is symmetric for this choice
    return np.diag([params.g, params.h_tilde])


def sw_entropy_pair(params: SwLinParams, U):
    """Return ``(S, Q, V, Psi)`` for the quadratic energy entropy."""
    U = np.asarray(U, dtype=float)
    Sm = sw_symmetrizer(params)
    SA = Sm @ sw_matrix(params)
    V = U @ Sm.T
    S = 0.5 * np.sum(U * V, axis=-1)
    Q = 0.5 * np.einsum("...i,ij,...j->...", U, SA, U)
    # Psi = V^T A U - Q = U^T (S A) U - Q
    Psi = Q.copy()
    return S, Q, V, Psi


def sw_ec_flux(A, U_j, U_j1) -> np.ndarray:
    return 0.5 * (np.asarray(U_j, dtype=float) + np.asarray(U_j1, dtype=float)) @ np.asarray(A).T


class SwLinModel(HyperbolicModel):
    """``U = (h, u)`` perturbation variables with ``F(U) = A U``."""

    m = 2
    name = "swlin"
    component_names = ("h", "u")

    def __init__(self, params: SwLinParams = SwLinParams(), viscosity: str = EDDY):
        self.params = params
        self.viscosity = viscosity
        self.A = sw_matrix(params)
        self.B = sw_viscosity(viscosity)
        self._eig = eigensystem_from_matrix(self.A)
        self._abs_A = self._eig.right_vectors @ np.diag(np.abs(self._eig.lambdas)) \
            @ np.linalg.inv(self._eig.right_vectors)

    def flux(self, U):
        return np.asarray(U, dtype=float) @ self.A.T

    def eigenvalues(self, U):
        U = np.asarray(U, dtype=float)
        return np.broadcast_to(self._eig.lambdas, U.shape).copy()

    def eigen_batch(self, U):
        U = np.asarray(U, dtype=float)
        lam = np.broadcast_to(self._eig.lambdas, U.shape)
        R = np.broadcast_to(self._eig.right_vectors, U.shape[:-1] + (2, 2))
        return lam, R

    def jacobian_eigen(self, U=None) -> Eigensystem:
        return self._eig

    def entropy(self, U):
        return sw_entropy_pair(self.params, U)[0]

    def entropy_flux(self, U):
        return sw_entropy_pair(self.params, U)[1]

    def entropy_vars(self, U):
        return sw_entropy_pair(self.params, U)[2]

    def entropy_potential(self, U):
        return sw_entropy_pair(self.params, U)[3]

    def viscosity_matrix(self, U):
        U = np.asarray(U, dtype=float)
        return np.broadcast_to(self.B, U.shape[:-1] + (2, 2))

    def ec_flux(self, Ul, Ur):
        return sw_ec_flux(self.A, Ul, Ur)

    def interface_diffusion(self, Ul, Ur, c_max, U_avg=None):
        jump = np.asarray(Ur, dtype=float) - np.asarray(Ul, dtype=float)
        return np.asarray(c_max)[..., None] * (jump @ self.B.T)

    def abs_jacobian(self, U):
        U = np.asarray(U, dtype=float)
        return np.broadcast_to(self._abs_A, U.shape[:-1] + (2, 2))
