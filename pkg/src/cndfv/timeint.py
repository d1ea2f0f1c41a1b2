"""SSP-RK2 (Heun) time stepping with CFL-limited steps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import BoundaryCondition, HyperbolicModel, SolverError, StateField, max_wave_speed
from .schemes import SchemeConfig, rhs_from_array

BLOWUP_FACTOR = 1e6


@dataclass(frozen=True)
class TimeLoopConfig:
    t_final: float
    cfl: float = 0.45
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.t_final < 0:
            raise ValueError("t_final must be nonnegative")
        if not 0 < self.cfl < 1:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass
class RunTrace:
    """Bookkeeping for the discrete conservation check.

    ``flux_integral`` accumulates ``int (F_{1/2} - F_{N+1/2}) dt`` using the
    stage fluxes exactly as the integrator combines them.
    """

    initial_total: Optional[np.ndarray] = None
    final_total: Optional[np.ndarray] = None
    flux_integral: Optional[np.ndarray] = None
    steps: int = 0
    dts: list = field(default_factory=list)

    def defect(self) -> np.ndarray:
        if self.initial_total is None:
            return np.zeros(0)
        return np.abs(self.final_total - self.initial_total - self.flux_integral)


def ssprk2_step(L: Callable, field: StateField, dt: float) -> StateField:
    """One step of ``U* = U + dt L(U)``, ``U** = U* + dt L(U*)``, ``(U + U**)/2``.

    ``L(data, t)`` returns ``dU/dt``; the second stage is evaluated at ``t + dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    U0 = field.data
    t = field.time
    U1 = U0 + dt * L(U0, t)
    _check_finite(U1, t, "first stage")
    U2 = U1 + dt * L(U1, t + dt)
    _check_finite(U2, t, "second stage")
    return StateField(field.grid, 0.5 * (U0 + U2), t + dt)


def _check_finite(U, t, where):
    if not np.all(np.isfinite(U)):
        raise SolverError(f"non-finite state in {where} of step starting at t={t:.6g}")


def integrate(field: StateField, t_final: float, rhs_and_fluxes: Callable, dt_for: Callable,
              max_steps: int = 10_000_000, trace: RunTrace | None = None,
              callback: Callable | None = None) -> StateField:
    """Advance ``field`` to ``t_final`` with SSP-RK2.

    ``rhs_and_fluxes(data, t)`` returns ``(rhs, interface_fluxes)`` and
    ``dt_for(data)`` the stable step for the current state.
    """
    dx = field.grid.dx
    stage_fluxes = []

    def L(data, t):
        rhs, F = rhs_and_fluxes(data, t)
        stage_fluxes.append(F[0] - F[-1])
        return rhs

    if trace is not None:
        trace.initial_total = field.total()
        trace.flux_integral = np.zeros(field.m)
        trace.final_total = trace.initial_total.copy()
    scale = max(np.abs(field.data).max(), 1e-300)
    step = 0
    while field.time < t_final:
        if step >= max_steps:
            raise SolverError(f"max_steps={max_steps} exceeded at t={field.time:.6g}")
        dt = dt_for(field.data)
        if not np.isfinite(dt) or dt <= 0:
            raise SolverError(f"invalid time step {dt} at step {step}")
        if field.time + dt >= t_final:
            dt = t_final - field.time
        stage_fluxes.clear()
        new = ssprk2_step(L, field, dt)
        if new.time >= t_final or abs(new.time - t_final) <= 1e-14 * max(1.0, abs(t_final)):
            new.time = t_final
        step += 1
        if np.abs(new.data).max() > BLOWUP_FACTOR * scale:
            raise SolverError(f"instability: state norm grew beyond {BLOWUP_FACTOR:g}x at step {step}")
        if trace is not None:
            trace.flux_integral += 0.5 * dt * (stage_fluxes[0] + stage_fluxes[1])
            trace.steps = step
            trace.dts.append(dt)
        field = new
        if callback is not None:
            callback(step, field.time, dt, field)
    if trace is not None:
        trace.final_total = field.total()
    return field


def run_to_time(model: HyperbolicModel, scheme: SchemeConfig, field: StateField,
                left: BoundaryCondition, right: BoundaryCondition, loop: TimeLoopConfig,
                trace: RunTrace | None = None, callback: Callable | None = None) -> StateField:
    """Integrate the semi-discrete scheme with ``dt = cfl dx / c_max``.

    ``callback(step, t, dt, field)`` is invoked after every accepted step.
    """
    dx = field.grid.dx
    if loop.t_final <= field.time:
        return field.copy()

    def rhs_and_fluxes(data, t):
        return rhs_from_array(model, scheme, data, dx, left, right, t, return_fluxes=True)

    def dt_for(data):
        return loop.cfl * dx / max_wave_speed(model, data)

    return integrate(field, loop.t_final, rhs_and_fluxes, dt_for, loop.max_steps, trace, callback)
