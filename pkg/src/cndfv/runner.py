"""Assemble and execute configured experiments; CSV serialization."""
from __future__ import annotations

import io
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .config import NAMED_STATES, ConfigError, ExperimentConfig, parse_config
from .core import Dirichlet, Open, StateField, init_field, make_grid
from .diagnostics import conservation_defect, entropy_residual, sample_reference
from .euler import EulerModel
from .linear_exact import linear_cauchy_solution, sw_composite_solution
from .schemes import SchemeConfig
from .swlin import SwLinModel, SwLinParams
from .timeint import RunTrace, TimeLoopConfig, run_to_time
from .viscous import ViscousSpec, run_viscous

log = logging.getLogger(__name__)

CSV_MAGIC = "# cndfv run output"


@dataclass
class RunOutput:
    config: ExperimentConfig
    x: np.ndarray
    columns: dict                      # name -> array, solution first
    component_names: tuple
    field: StateField
    trace: RunTrace
    metadata: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self) -> str:
        return format_csv(self.metadata, self.x, self.columns)

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path


def build_model(config: ExperimentConfig):
    mc = config.model
    if mc["kind"] == "swlin":
        return SwLinModel(SwLinParams(mc["h_tilde"], mc["u_tilde"], mc["g"]), mc["viscosity"])
    return EulerModel(mc["gamma"], mc["viscosity"], mc["nu"], mc["kappa"])


def _conserved(model, state):
    state = np.asarray(state, dtype=float)
    return model.conserved(state) if isinstance(model, EulerModel) else state


def _smooth_bump(problem):
    amp, c, w = problem["amplitude"], problem["center"], problem["width"]
    bg = np.asarray(problem["background"], dtype=float)

    def init(x):
        x = np.asarray(x, dtype=float)
        s = np.clip((x - c) / w + 0.5, 0.0, 1.0)
        bump = amp * np.sin(np.pi * s) ** 4
        out = np.broadcast_to(bg, x.shape + (bg.size,)).copy()
        out[..., 0] += bump
        return out

    return init


def initial_function(config: ExperimentConfig, model) -> Callable:
    p = config.problem
    kind = p["initial"]
    if kind == "lswinit":
        left, right, x0 = (3.0, 1.0), (1.0, 1.0), 0.0
    elif kind == "eulinit":
        left, right, x0 = (3.0, 1.0, 3.0), (1.0, 1.0, 1.0), 0.0
    elif kind == "riemann":
        left, right, x0 = p["left_state"], p["right_state"], p["x0"]
    elif kind == "constant":
        left = right = p["state"]
        x0 = 0.0
    else:
        return _smooth_bump(p)
    uL, uR = _conserved(model, left), _conserved(model, right)
    return lambda x: uL if x < x0 else uR


def boundary_condition(spec, model):
    if spec == "open":
        return Open()
    state = NAMED_STATES[spec] if isinstance(spec, str) else spec
    return Dirichlet(_conserved(model, state))


def exact_solution(config: ExperimentConfig, model) -> Optional[Callable]:
    """Closed-form limit solution ``f(x, t)`` for the linear problems, else None."""
    if not isinstance(model, SwLinModel):
        return None
    p = config.problem
    t = p["t_final"]
    if p["initial"] == "swsmooth":
        return linear_cauchy_solution(model.A, _smooth_bump(p))
    if p["initial"] not in ("lswinit", "riemann") or p["boundary_left"] == "open":
        return None
    u_l = NAMED_STATES[p["boundary_left"]] if isinstance(p["boundary_left"], str) else p["boundary_left"]
    if p["initial"] == "lswinit":
        u_minus, u_plus, x0 = (3.0, 1.0), (1.0, 1.0), 0.0
    else:
        u_minus, u_plus, x0 = p["left_state"], p["right_state"], p["x0"]
    solution, t_max = sw_composite_solution(model.viscosity, model.params, u_l, u_minus, u_plus,
                                            p["x_left"], x0)
    return solution if t < t_max else None


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_csv(metadata: dict, x: np.ndarray, columns: dict) -> str:
    buf = io.StringIO()
    buf.write(CSV_MAGIC + "\n")
    for key, value in metadata.items():
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(["x"] + list(columns)) + "\n")
    cols = [x] + list(columns.values())
    for i in range(x.size):
        buf.write(",".join(_fmt(c[i]) for c in cols) + "\n")
    return buf.getvalue()


def read_csv(path):
    """Return ``(metadata, columns)`` from a run CSV; columns include ``x``."""
    metadata = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if ": " in body:
                    key, value = body.split(": ", 1)
                    metadata[key] = value
                continue
            if not line:
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no CSV header found")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return metadata, {name: data[:, i] for i, name in enumerate(header)}


def field_from_columns(columns: dict, names) -> StateField:
    """Rebuild a StateField from a uniform-grid CSV (``x`` holds cell centers)."""
    x = columns["x"]
    n = x.size
    dx = (x[-1] - x[0]) / (n - 1) if n > 1 else 1.0
    grid = make_grid(x[0] - 0.5 * dx, x[-1] + 0.5 * dx, n)
    return StateField(grid, np.stack([columns[c] for c in names], axis=-1))


def load_reference(path, names) -> StateField:
    _, columns = read_csv(path)
    missing = [c for c in names if c not in columns]
    if missing:
        raise ValueError(f"reference {path} lacks columns {missing}")
    return field_from_columns(columns, names)


def simulate(config: ExperimentConfig, n_cells: Optional[int] = None, callback=None):
    """Run the configured solver; returns ``(model, field, trace, (left_bc, right_bc))``."""
    model = build_model(config)
    p, s = config.problem, config.solver
    grid = make_grid(p["x_left"], p["x_right"], n_cells or s["n_cells"])
    field = init_field(model, grid, initial_function(config, model))
    left = boundary_condition(p["boundary_left"], model)
    right = boundary_condition(p["boundary_right"], model)
    trace = RunTrace()
    max_steps = s.get("max_steps", 10_000_000)
    if s["kind"] == "viscous":
        nu, kappa = (model.nu, model.kappa) if isinstance(model, EulerModel) else (1.0, 1.0)
        spec = ViscousSpec(model, s["epsilon"], s["diffusion"], nu, kappa)
        out = run_viscous(spec, field, left, right, p["t_final"], s["cfl"], s["cfl_diff"],
                          trace, callback, max_steps)
    else:
        scheme = SchemeConfig(s["kind"], s["cfl"], s["limiter"])
        out = run_to_time(model, scheme, field, left, right,
                          TimeLoopConfig(p["t_final"], s["cfl"], max_steps), trace, callback)
    return model, out, trace, (left, right)


def run_experiment(config: ExperimentConfig, output: Optional[str] = None, write: bool = True,
                   callback=None) -> RunOutput:
    start = time.perf_counter()
    model, out, trace, (left, right) = simulate(config, callback=callback)
    wall = time.perf_counter() - start
    x = out.grid.centers
    names = model.component_names
    columns = {name: out.data[:, i] for i, name in enumerate(names)}

    exact = exact_solution(config, model)
    if exact is not None:
        ex = exact(x, out.time)
        for i, name in enumerate(names):
            columns[f"{name}_exact"] = ex[:, i]
    ref_path = config.output.get("reference")
    if ref_path:
        ref = sample_reference(load_reference(ref_path, names), x, out.time)
        for i, name in enumerate(names):
            columns[f"{name}_ref"] = ref[:, i]

    s = config.solver
    if s["kind"] in ("cnd", "ec"):
        report = entropy_residual(model, SchemeConfig(s["kind"], s["cfl"]), out, left, right, out.time)
        max_res = _fmt(report.max_positive_residual)
    else:
        max_res = "n/a"
    metadata = {
        "config": config.echo(),
        "steps": trace.steps,
        "t_final": _fmt(out.time),
        "n_cells": out.grid.n_cells,
        "conservation_defect": " ".join(_fmt(v) for v in conservation_defect(trace, per_component=True)),
        "max_entropy_residual": max_res,
    }
    result = RunOutput(config, x, columns, names, out, trace, metadata, wall)
    path = output or config.output.get("path")
    if write and path:
        result.write(path)
        log.info("wrote %s (%d steps, %.2fs)", path, trace.steps, wall)
    return result


def config_from_csv(path) -> ExperimentConfig:
    metadata, _ = read_csv(path)
    if "config" not in metadata:
        raise ConfigError([f"{path}: no config echo in metadata"])
    return parse_config(metadata["config"])


@dataclass
class ConvergenceTable:
    n_cells: list
    errors: list
    rates: list  # rates[i] compares meshes i-1 and i; rates[0] is None

    def rows(self):
        return list(zip(self.n_cells, self.errors, self.rates))

    def format(self) -> str:
        lines = ["n_cells,l1_error,rate"]
        for n, e, r in self.rows():
            lines.append(f"{n},{_fmt(e)},{'undefined' if r is None else _fmt(r)}")
        return "\n".join(lines) + "\n"


def convergence_study(config: ExperimentConfig, meshes, component: Optional[int] = None,
                      reference: Optional[Callable] = None) -> ConvergenceTable:
    """L1 errors against the exact (or supplied) solution on nested meshes."""
    from .diagnostics import error_norms

    meshes = [int(n) for n in meshes]
    if len(meshes) < 3:
        raise ConfigError(["convergence study needs at least 3 meshes"])
    for a, b in zip(meshes, meshes[1:]):
        if b <= a or b % a:
            raise ConfigError([f"meshes must be nested: {a} does not divide {b}"])
    model = build_model(config)
    if reference is None:
        reference = exact_solution(config, model)
    if reference is None and config.output.get("reference"):
        reference = load_reference(config.output["reference"], model.component_names)
    if reference is None:
        raise ConfigError(["no exact solution or reference available for convergence study"])
    errors = []
    for n in meshes:
        _, out, _, _ = simulate(config, n_cells=n)
        errors.append(error_norms(out, reference, component=component).l1)
    rates = [None]
    for (n0, e0), (n1, e1) in zip(zip(meshes, errors), zip(meshes[1:], errors[1:])):
        if e0 > 0 and e1 > 0:
            rates.append(math.log(e0 / e1) / math.log(n1 / n0))
        else:
            rates.append(None)
    return ConvergenceTable(meshes, errors, rates)


def shipped_configs() -> dict:
    """Name -> path of the experiment configs bundled with the package."""
    root = Path(__file__).parent / "configs"
    return {p.stem: p for p in sorted(root.glob("*.yaml"))}
