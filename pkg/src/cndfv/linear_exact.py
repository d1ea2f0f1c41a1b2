"""Closed-form Riemann and boundary Riemann solutions for linear systems.

For ``U_t + A U_x = eps B U_xx`` with constant ``A`` and ``B`` the vanishing
viscosity limit is a fan of constant states. At a Dirichlet boundary the
``k`` incoming-from-the-right waves (negative speeds) are replaced by a
boundary layer whose admissible jumps span a space that depends on ``B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import Eigensystem, ModelError, eigensystem_from_matrix, normalize_columns
from .swlin import SwLinParams, sw_matrix, sw_viscosity

STABLE_TOL = -1e-10


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    B: np.ndarray = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.eye(A.shape[0]) if self.B is None else np.asarray(self.B, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or B.shape != A.shape:
            raise ValueError("A and B must be square matrices of equal size")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def eigen(self) -> Eigensystem:
        return eigensystem_from_matrix(self.A)


@dataclass
class SimilaritySolution:
    states: list
    speeds: np.ndarray
    alphas: np.ndarray
    origin_x: float = 0.0
    trace: np.ndarray = None

    def __post_init__(self):
        self.states = [np.asarray(s, dtype=float) for s in self.states]
        self.speeds = np.asarray(self.speeds, dtype=float)
        if len(self.states) != len(self.speeds) + 1:
            raise ValueError("need exactly one more state than wave speeds")
        if np.any(np.diff(self.speeds) <= 0):
            raise ValueError("wave speeds must be strictly increasing")
        if self.trace is None:
            self.trace = self.states[0]

    def __call__(self, x, t):
        return eval_similarity(self, x, t)


@dataclass(frozen=True)
class BoundaryLayerBasis:
    vectors: np.ndarray  # columns R~_1..R~_k
    k: int


def _solve_checked(M: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise ModelError(f"{what}: basis matrix is singular (condition number {cond:.3e})")
    return np.linalg.solve(M, rhs)


def solve_linear_riemann(sys: LinearSystem, u_minus, u_plus, origin_x: float = 0.0) -> SimilaritySolution:
    eig = sys.eigen()
    u_minus = np.asarray(u_minus, dtype=float)
    u_plus = np.asarray(u_plus, dtype=float)
    R = eig.right_vectors
    alphas = _solve_checked(R, u_plus - u_minus, "Riemann problem")
    states = [u_minus]
    for i in range(sys.m):
        states.append(states[-1] + alphas[i] * R[:, i])
    states[-1] = u_plus
    return SimilaritySolution(states, eig.lambdas, alphas, origin_x, u_minus)


def _stable_space(M: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the span of generalized eigenvectors with Re < 0."""
    _, Z, sdim = scipy.linalg.schur(M, output="real", sort=lambda re, im: re < STABLE_TOL)
    return Z[:, :sdim]


def boundary_layer_basis(sys: LinearSystem) -> BoundaryLayerBasis:
    """Vectors spanning the admissible jumps ``U_l - trace`` at a left boundary.

    Three structures of ``B`` are handled: the identity (the negative-speed
    eigenvectors of ``A``), any invertible ``B`` (stable space of ``B^-1 A``),
    and singular ``B`` whose null rows and columns coincide, with the
    remaining block invertible. In the last case the null rows of the layer
    equation are algebraic constraints that are eliminated before taking
    the stable space of the reduced system.
    """
    eig = sys.eigen()
    eig.check_noncharacteristic()
    A, B, m, k = sys.A, sys.B, sys.m, eig.k_negative

    if np.allclose(B, np.eye(m), rtol=0, atol=1e-14):
        vectors = eig.right_vectors[:, :k]
    elif abs(np.linalg.det(B)) > 1e-12 * max(1.0, np.abs(B).max()) ** m:
        vectors = _stable_space(np.linalg.solve(B, A))
    else:
        vectors = _singular_stable_space(A, B)

    if vectors.shape[1] != k:
        raise ModelError(
            f"boundary layer space has dimension {vectors.shape[1]}, expected k={k}; "
            "the boundary problem is ill-posed for this viscosity"
        )
    if k:
        vectors = normalize_columns(vectors)
        full = np.hstack([vectors, eig.right_vectors[:, k:]])
        if np.linalg.matrix_rank(full) < m:
            raise ModelError("admissible boundary jumps and outgoing waves do not span R^m")
    return BoundaryLayerBasis(vectors, k)


def _singular_stable_space(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    zero_row = np.all(B == 0, axis=1)
    zero_col = np.all(B == 0, axis=0)
    if not np.array_equal(zero_row, zero_col) or not zero_row.any():
        raise ModelError("unsupported singular viscosity matrix: null rows and columns differ")
    z = np.flatnonzero(zero_row)
    p = np.flatnonzero(~zero_row)
    if p.size == 0:
        raise ModelError("viscosity matrix is zero: no boundary layer is defined")
    B22 = B[np.ix_(p, p)]
    if np.linalg.matrix_rank(B22) < p.size:
        raise ModelError("unsupported singular viscosity matrix: reduced block is singular")
    A11, A12 = A[np.ix_(z, z)], A[np.ix_(z, p)]
    A21, A22 = A[np.ix_(p, z)], A[np.ix_(p, p)]
    if np.linalg.matrix_rank(A11) < z.size:
        raise ModelError("algebraic part of the boundary layer system is characteristic")
    # rows of B that vanish give 0 = A11 w1 + A12 w2
    elim = -np.linalg.solve(A11, A12)
    reduced = np.linalg.solve(B22, A22 + A21 @ elim)
    V2 = _stable_space(reduced)
    vectors = np.zeros((A.shape[0], V2.shape[1]))
    vectors[p, :] = V2
    vectors[z, :] = elim @ V2
    return vectors


def solve_boundary_riemann(sys: LinearSystem, u_l, u_0, x_boundary: float = 0.0) -> SimilaritySolution:
    """Vanishing-viscosity limit with Dirichlet datum ``u_l`` at a left boundary."""
    eig = sys.eigen()
    basis = boundary_layer_basis(sys)
    k = basis.k
    u_l = np.asarray(u_l, dtype=float)
    u_0 = np.asarray(u_0, dtype=float)
    full = np.hstack([basis.vectors, eig.right_vectors[:, k:]])
    alphas = _solve_checked(full, u_0 - u_l, "boundary Riemann problem")
    trace = u_l + basis.vectors @ alphas[:k]
    states = [trace]
    for i in range(k, sys.m):
        states.append(states[-1] + alphas[i] * eig.right_vectors[:, i])
    states[-1] = u_0
    return SimilaritySolution(states, eig.lambdas[k:], alphas, x_boundary, trace)


def eval_similarity(sol: SimilaritySolution, x, t):
    """State at ``(x, t)``; points on a wave take the state to its right.

    ``x`` may be an array, in which case the result has shape ``x.shape + (m,)``.
    """
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        idx = np.where(x < sol.origin_x, 0, len(sol.speeds))
    else:
        xi = (x - sol.origin_x) / t
        idx = np.searchsorted(sol.speeds, xi, side="right")
    return np.stack(sol.states)[idx]


def sw_system(viscosity: str, params=None) -> LinearSystem:
    return LinearSystem(sw_matrix(params or SwLinParams()), sw_viscosity(viscosity))


def sw_composite_solution(viscosity: str, params=None, u_l=(2.0, 1.0), u_minus=(3.0, 1.0),
                          u_plus=(1.0, 1.0), x_boundary=-1.0, x_jump=0.0):
    """Boundary fan at ``x_boundary`` plus interior Riemann fan at ``x_jump``.

    Returns ``(solution(x, t), t_max)`` where ``t_max`` is the time at which the
    two fans first meet; the composition is exact only for ``t < t_max``.
    """
    sys = sw_system(viscosity, params)
    bsol = solve_boundary_riemann(sys, u_l, u_minus, x_boundary)
    rsol = solve_linear_riemann(sys, u_minus, u_plus, x_jump)
    fastest_out = bsol.speeds[-1] if len(bsol.speeds) else 0.0
    slowest_in = rsol.speeds[0]
    closing = fastest_out - slowest_in
    t_max = np.inf if closing <= 0 else (x_jump - x_boundary) / closing

    def solution(x, t):
        x = np.asarray(x, dtype=float)
        if t >= t_max:
            raise ValueError(f"t={t} is past the fan interaction time {t_max:.6g}")
        near = x - x_boundary < fastest_out * t
        return np.where(near[..., None], eval_similarity(bsol, x, t), eval_similarity(rsol, x, t))

    return solution, t_max


def exact_sw_solution(viscosity: str, x, t, params=None):
    """Piecewise-constant limit for the standard step data with a Dirichlet
    datum (2, 1) at x = -1, Riemann data (3, 1) | (1, 1) at x = 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    solution, _ = sw_composite_solution(viscosity, params)
    return solution(x, t)


def linear_cauchy_solution(A, init):
    """Exact solution of ``U_t + A U_x = 0`` on the whole line.

    Each characteristic component ``l_i . U`` is transported at speed ``lambda_i``.
    """
    eig = eigensystem_from_matrix(A)
    R = eig.right_vectors
    L = np.linalg.inv(R)

    def solution(x, t):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (R.shape[0],))
        for i, lam in enumerate(eig.lambdas):
            w = np.asarray(init(x - lam * t)) @ L[i]
            out += w[..., None] * R[:, i]
        return out

    return solution
