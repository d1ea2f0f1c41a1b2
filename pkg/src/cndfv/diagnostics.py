"""Entropy, conservation, boundary admissibility and error-norm checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .core import BoundaryCondition, HyperbolicModel, StateField, extend_with_ghosts, max_wave_speed
from .schemes import CND, EC, SchemeConfig, interface_fluxes
from .timeint import RunTrace


@dataclass
class EntropyReport:
    entropy_rate: np.ndarray       # dS(U_j)/dt, one per cell
    entropy_flux: np.ndarray       # Q^_{j+1/2}, one per interface
    residual: np.ndarray           # dS/dt + (Q^_{j+1/2} - Q^_{j-1/2})/dx
    interface_dissipation: np.ndarray  # [V]^T D* per interface

    @property
    def max_positive_residual(self) -> float:
        return float(max(self.residual.max(), 0.0))


@dataclass(frozen=True)
class ErrorReport:
    l1: float
    l2: float
    linf: float
    window: Optional[tuple] = None


def interface_dissipation(model: HyperbolicModel, ext: np.ndarray, c_max: float) -> np.ndarray:
    """``[V]^T D*`` at every interface of ``ext``; nonnegative for dissipative pairs."""
    left, right = ext[:-1], ext[1:]
    D = model.interface_diffusion(left, right, c_max)
    dV = model.entropy_vars(right) - model.entropy_vars(left)
    return np.sum(dV * D, axis=-1)


def entropy_residual(model: HyperbolicModel, scheme: SchemeConfig, field: StateField,
                     left: BoundaryCondition, right: BoundaryCondition, t: float) -> EntropyReport:
    """Cell-wise discrete entropy balance of the first-order CND or EC scheme.

    The numerical entropy flux is
    ``Q^ = Vbar^T F* - Psibar - Vbar^T D*/2`` with arithmetic means, which
    makes the residual equal ``-([V]^T D*_{j+1/2} + [V]^T D*_{j-1/2})/(4 dx)``
    up to the entropy-conservation defect of ``F*``.
    """
    if scheme.kind not in (CND, EC):
        raise ValueError(f"entropy diagnostics are defined for 'cnd' and 'ec', not {scheme.kind!r}")
    dx = field.grid.dx
    ext = extend_with_ghosts(field.data, left, right, t, 1)
    c_max = max_wave_speed(model, ext)
    F = interface_fluxes(model, scheme, ext, c_max)
    rhs = -(F[1:] - F[:-1]) / dx
    V = model.entropy_vars(ext)
    Psi = model.entropy_potential(ext)
    Vbar = 0.5 * (V[:-1] + V[1:])
    Psibar = 0.5 * (Psi[:-1] + Psi[1:])
    Fstar = model.ec_flux(ext[:-1], ext[1:])
    Qhat = np.sum(Vbar * Fstar, axis=-1) - Psibar
    if scheme.kind == CND:
        D = model.interface_diffusion(ext[:-1], ext[1:], c_max)
        Qhat = Qhat - 0.5 * np.sum(Vbar * D, axis=-1)
        diss = np.sum((V[1:] - V[:-1]) * D, axis=-1)
    else:
        diss = np.zeros(Qhat.shape)
    rate = np.sum(V[1:-1] * rhs, axis=-1)
    residual = rate + (Qhat[1:] - Qhat[:-1]) / dx
    return EntropyReport(rate, Qhat, residual, diss)


def conservation_defect(trace: RunTrace, per_component: bool = False):
    """``|sum U dx (final) - sum U dx (initial) - int (F_left - F_right) dt|``."""
    d = trace.defect()
    if per_component:
        return d
    return float(d.max()) if d.size else 0.0


def dlf_boundary_check(model: HyperbolicModel, trace_state, data_state) -> float:
    """``Q(trace) - Q(U_l) - S_U(U_l) . (F(trace) - F(U_l))``; admissible traces give <= 0."""
    Ub = np.asarray(trace_state, dtype=float)
    Ul = np.asarray(data_state, dtype=float)
    model.check_admissible(np.stack([Ub, Ul]))
    value = model.entropy_flux(Ub) - model.entropy_flux(Ul) \
        - np.dot(model.entropy_vars(Ul), model.flux(Ub) - model.flux(Ul))
    return float(value)


def sample_reference(reference: Union[StateField, Callable], x: np.ndarray, t: float) -> np.ndarray:
    """Reference values at points ``x``: nearest cell of a field, or a call ``f(x, t)``."""
    if isinstance(reference, StateField):
        g = reference.grid
        # position in units of reference cells; exact ties (nested meshes) go left
        s = (np.asarray(x, dtype=float) - g.x_left) / g.dx - 0.5
        idx = np.clip(np.ceil(s - 0.5 - 1e-9).astype(int), 0, g.n_cells - 1)
        return reference.data[idx]
    return np.asarray(reference(x, t), dtype=float).reshape(x.size, -1)


def error_norms(field: StateField, reference, window: Optional[tuple] = None,
                component: Optional[int] = None) -> ErrorReport:
    """Discrete L1, L2 and max norms of ``field - reference`` over ``window``.

    With ``component=None`` the norms combine all components (L1 and L2 summed
    over components, max over everything).
    """
    x = field.grid.centers
    ref = sample_reference(reference, x, field.time)
    diff = field.data - ref
    mask = np.ones(x.size, dtype=bool)
    if window is not None:
        a, b = window
        mask = (x >= a) & (x <= b)
        if not mask.any():
            raise ValueError(f"window {window} contains no cell centers")
    d = diff[mask] if component is None else diff[mask, component][:, None]
    dx = field.grid.dx
    return ErrorReport(
        float(np.sum(np.abs(d)) * dx),
        float(np.sqrt(np.sum(d * d) * dx)),
        float(np.max(np.abs(d))),
        window,
    )
