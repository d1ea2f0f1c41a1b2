"""Experiment configuration: a YAML tree with sections model, problem, solver, output.

Unknown keys are rejected and every violation is reported at once::

    model:   {kind: swlin, viscosity: eddy, h_tilde: 2.0, u_tilde: 1.0, g: 1.0}
    problem: {initial: lswinit, boundary_left: ldir, boundary_right: open,
              x_left: -1.0, x_right: 1.0, t_final: 0.25}
    solver:  {kind: cnd, n_cells: 1000, cfl: 0.45}
    output:  {path: fig2_cnd.csv}
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


MODEL_DEFAULTS = {
    "swlin": {"kind": "swlin", "viscosity": "eddy", "h_tilde": 2.0, "u_tilde": 1.0, "g": 1.0},
    "euler": {"kind": "euler", "viscosity": "ns", "gamma": 1.4, "nu": 1.0, "kappa": 1.0},
}
MODEL_VISCOSITIES = {"swlin": ("eddy", "laplacian"), "euler": ("ns", "laplacian")}

INITIAL_IDS = ("lswinit", "eulinit", "riemann", "constant", "swsmooth")
PROBLEM_KEYS = {
    "initial", "boundary_left", "boundary_right", "x_left", "x_right", "t_final",
    "x0", "left_state", "right_state", "state", "amplitude", "center", "width", "background",
}
BOUNDARY_IDS = ("ldir", "eulbd", "open")

SOLVER_KINDS = ("roe", "cnd", "cnd2", "ec", "viscous")
SOLVER_KEYS = {"kind", "n_cells", "cfl", "limiter", "epsilon", "diffusion", "cfl_diff", "max_steps"}
DIFFUSION_KINDS = ("identity", "matrix", "navier_stokes")
OUTPUT_KEYS = {"path", "reference"}

# problem data ids; states of "euler" models are primitive (rho, u, p)
NAMED_STATES = {
    "ldir": (2.0, 1.0),
    "eulbd": (2.0, 1.0, 2.0),
}


@dataclass
class ExperimentConfig:
    model: dict
    problem: dict
    solver: dict
    output: dict = field(default_factory=dict)
    source: Optional[str] = None

    def to_dict(self) -> dict:
        return {"model": dict(self.model), "problem": dict(self.problem),
                "solver": dict(self.solver), "output": dict(self.output)}

    def echo(self) -> str:
        """One-line JSON echo; JSON is valid YAML so it parses back unchanged."""
        return json.dumps(self.to_dict(), sort_keys=True)

    def with_overrides(self, **sections) -> "ExperimentConfig":
        d = self.to_dict()
        for name, values in sections.items():
            d[name].update(values)
        return validate(d, self.source)


def parse_config(text: str, source: Optional[str] = None) -> ExperimentConfig:
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"malformed config: {exc}"]) from None
    return validate(tree, source)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _state_ok(v, m) -> bool:
    return isinstance(v, (list, tuple)) and len(v) == m and all(_is_num(x) for x in v)


def validate(tree: Any, source: Optional[str] = None) -> ExperimentConfig:
    errors: list[str] = []
    if not isinstance(tree, dict):
        raise ConfigError(["config must be a mapping with sections model, problem, solver, output"])
    tree = copy.deepcopy(tree)
    for key in tree:
        if key not in ("model", "problem", "solver", "output"):
            errors.append(f"unknown section '{key}'")
    for key in ("model", "problem", "solver"):
        if not isinstance(tree.get(key), dict):
            errors.append(f"section '{key}' is required and must be a mapping")
    if errors:
        raise ConfigError(errors)
    output = tree.get("output") or {}
    if not isinstance(output, dict):
        raise ConfigError(["section 'output' must be a mapping"])

    model = _validate_model(tree["model"], errors)
    problem = _validate_problem(tree["problem"], model, errors)
    solver = _validate_solver(tree["solver"], model, errors)
    for key in output:
        if key not in OUTPUT_KEYS:
            errors.append(f"output: unknown key '{key}'")
    for key in OUTPUT_KEYS:
        if key in output and output[key] is not None and not isinstance(output[key], str):
            errors.append(f"output.{key} must be a string path")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(model, problem, solver, dict(output), source)


def _validate_model(section: dict, errors: list) -> dict:
    kind = section.get("kind")
    if kind not in MODEL_DEFAULTS:
        errors.append(f"model.kind must be one of {sorted(MODEL_DEFAULTS)}, got {kind!r}")
        return dict(section)
    out = dict(MODEL_DEFAULTS[kind])
    for key, value in section.items():
        if key not in out:
            errors.append(f"model: unknown key '{key}' for kind {kind}")
            continue
        out[key] = value
    if out["viscosity"] not in MODEL_VISCOSITIES[kind]:
        errors.append(f"model.viscosity must be one of {MODEL_VISCOSITIES[kind]}, got {out['viscosity']!r}")
    for key, value in out.items():
        if key in ("kind", "viscosity"):
            continue
        if not _is_num(value):
            errors.append(f"model.{key} must be a number")
    if kind == "swlin":
        if _is_num(out["h_tilde"]) and out["h_tilde"] <= 0:
            errors.append("model.h_tilde must be positive")
        if _is_num(out["g"]) and out["g"] <= 0:
            errors.append("model.g must be positive")
    else:
        if _is_num(out["gamma"]) and out["gamma"] <= 1:
            errors.append("model.gamma must exceed 1")
        for key in ("nu", "kappa"):
            if _is_num(out[key]) and out[key] < 0:
                errors.append(f"model.{key} must be nonnegative")
    return out


def _validate_problem(section: dict, model: dict, errors: list) -> dict:
    m = 2 if model.get("kind") == "swlin" else 3
    out = {"boundary_left": "open", "boundary_right": "open", "x_left": -1.0, "x_right": 1.0}
    for key, value in section.items():
        if key not in PROBLEM_KEYS:
            errors.append(f"problem: unknown key '{key}'")
        else:
            out[key] = value
    init = out.get("initial")
    if init not in INITIAL_IDS:
        errors.append(f"problem.initial must be one of {INITIAL_IDS}, got {init!r}")
    if init == "lswinit" and model.get("kind") != "swlin":
        errors.append("problem.initial 'lswinit' needs model.kind swlin")
    if init in ("eulinit",) and model.get("kind") != "euler":
        errors.append("problem.initial 'eulinit' needs model.kind euler")
    if init == "swsmooth" and model.get("kind") != "swlin":
        errors.append("problem.initial 'swsmooth' needs model.kind swlin")
    if init == "riemann":
        for key in ("left_state", "right_state"):
            if not _state_ok(out.get(key), m):
                errors.append(f"problem.{key} must be a list of {m} numbers")
        out.setdefault("x0", 0.0)
    if init == "constant" and not _state_ok(out.get("state"), m):
        errors.append(f"problem.state must be a list of {m} numbers")
    if init == "swsmooth":
        out.setdefault("amplitude", 0.2)
        out.setdefault("center", 0.0)
        out.setdefault("width", 0.5)
        out.setdefault("background", [2.0, 1.0])
        if not _state_ok(out["background"], m):
            errors.append(f"problem.background must be a list of {m} numbers")
        if _is_num(out["width"]) and out["width"] <= 0:
            errors.append("problem.width must be positive")
    for side in ("boundary_left", "boundary_right"):
        b = out[side]
        if isinstance(b, str):
            if b not in BOUNDARY_IDS:
                errors.append(f"problem.{side} must be one of {BOUNDARY_IDS} or a state list")
            elif b != "open" and len(NAMED_STATES[b]) != m:
                errors.append(f"problem.{side} '{b}' does not match model dimension {m}")
        elif not _state_ok(b, m):
            errors.append(f"problem.{side} must be one of {BOUNDARY_IDS} or a list of {m} numbers")
    for key in ("x_left", "x_right"):
        if not _is_num(out[key]):
            errors.append(f"problem.{key} must be a number")
    if _is_num(out["x_left"]) and _is_num(out["x_right"]) and out["x_left"] >= out["x_right"]:
        errors.append("problem.x_left must be smaller than problem.x_right")
    t = out.get("t_final")
    if not _is_num(t) or t <= 0:
        errors.append("problem.t_final must be a positive number")
    return out


def _validate_solver(section: dict, model: dict, errors: list) -> dict:
    out = {"cfl": 0.45, "limiter": "minmod"}
    for key, value in section.items():
        if key not in SOLVER_KEYS:
            errors.append(f"solver: unknown key '{key}'")
        else:
            out[key] = value
    kind = out.get("kind")
    if kind not in SOLVER_KINDS:
        errors.append(f"solver.kind must be one of {SOLVER_KINDS}, got {kind!r}")
    n = out.get("n_cells")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        errors.append("solver.n_cells must be a positive integer")
    if not _is_num(out["cfl"]) or not 0 < out["cfl"] < 1:
        errors.append("solver.cfl must lie in (0, 1)")
    if out["limiter"] not in ("minmod", "none"):
        errors.append("solver.limiter must be 'minmod' or 'none'")
    if kind == "viscous":
        eps = out.get("epsilon")
        if not _is_num(eps) or eps <= 0:
            errors.append("solver.epsilon must be a positive number for viscous runs")
        default = "navier_stokes" if model.get("kind") == "euler" and model.get("viscosity") == "ns" \
            else ("identity" if model.get("viscosity") == "laplacian" else "matrix")
        out.setdefault("diffusion", default)
        out.setdefault("cfl_diff", 0.4)
        if out["diffusion"] not in DIFFUSION_KINDS:
            errors.append(f"solver.diffusion must be one of {DIFFUSION_KINDS}")
        elif out["diffusion"] == "navier_stokes" and model.get("kind") != "euler":
            errors.append("solver.diffusion 'navier_stokes' needs model.kind euler")
        if not _is_num(out["cfl_diff"]) or out["cfl_diff"] <= 0:
            errors.append("solver.cfl_diff must be positive")
    else:
        for key in ("epsilon", "diffusion", "cfl_diff"):
            if key in out:
                errors.append(f"solver.{key} only applies to kind 'viscous'")
    if "max_steps" in out and (not isinstance(out["max_steps"], int) or out["max_steps"] < 1):
        errors.append("solver.max_steps must be a positive integer")
    return out
