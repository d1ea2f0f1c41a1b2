"""Command line entry point: ``cndfv {run,batch,converge,compare,exact,check}``.

Exit codes: 0 success, 2 configuration error, 3 input/output error,
4 solver or model error. Failures print ``error[<category>]: <message>``
on stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import runner
from .config import ConfigError, load_config
from .core import ModelError, SolverError, make_grid
from .diagnostics import error_norms

EXIT_CONFIG, EXIT_IO, EXIT_SOLVER = 2, 3, 4


def _progress(quiet):
    if quiet:
        return None

    def cb(step, t, dt, field):
        if step % 500 == 0:
            print(f"  step {step:7d}  t={t:.5f}  dt={dt:.3e}", file=sys.stderr)

    return cb


def _resolve_config(name_or_path: str):
    shipped = runner.shipped_configs()
    if name_or_path in shipped:
        return load_config(shipped[name_or_path])
    return load_config(name_or_path)


def cmd_run(args):
    config = _resolve_config(args.config)
    out = runner.run_experiment(config, output=args.output, callback=_progress(args.quiet))
    if not args.quiet:
        path = args.output or config.output.get("path")
        print(f"{path}: {out.trace.steps} steps, {out.wall_time:.2f}s, "
              f"conservation defect {out.metadata['conservation_defect']}, "
              f"max entropy residual {out.metadata['max_entropy_residual']}")
    return 0


def cmd_batch(args):
    for name in args.configs:
        config = _resolve_config(name)
        out = runner.run_experiment(config)
        if not args.quiet:
            print(f"{name}: {out.trace.steps} steps, {out.wall_time:.2f}s")
    return 0


def cmd_converge(args):
    config = _resolve_config(args.config)
    meshes = [int(v) for v in args.meshes.split(",")]
    table = runner.convergence_study(config, meshes, component=args.component)
    text = table.format()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    if not args.quiet or not args.output:
        print(text, end="")
    return 0


def cmd_compare(args):
    _, a = runner.read_csv(args.first)
    _, b = runner.read_csv(args.second)
    names = [args.component] if args.component else [c for c in a if c != "x" and c in b]
    if not names:
        raise ConfigError(["no common solution columns to compare"])
    fa = runner.field_from_columns(a, names)
    fb = runner.field_from_columns(b, names)
    window = tuple(args.window) if args.window else None
    rep = error_norms(fa, fb, window)
    print(f"l1,l2,linf\n{rep.l1:.17g},{rep.l2:.17g},{rep.linf:.17g}")
    return 0


def cmd_exact(args):
    from .linear_exact import exact_sw_solution

    grid = make_grid(-1.0, 1.0, args.n_cells)
    x = grid.centers
    cols = {}
    for visc in ("laplacian", "eddy"):
        vals = exact_sw_solution(visc, x, args.t)
        cols[f"h_{visc}"] = vals[:, 0]
        cols[f"u_{visc}"] = vals[:, 1]
    text = runner.format_csv({"t": args.t}, x, cols)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0


def cmd_check(args):
    """Randomized entropy-conservation check of the two-point fluxes."""
    from .euler import EulerModel
    from .swlin import SwLinModel

    rng = np.random.default_rng(args.seed)
    n = args.samples
    sw = SwLinModel()
    Ul, Ur = rng.uniform(-5, 5, (n, 2)), rng.uniform(-5, 5, (n, 2))
    res_sw = _ec_residual(sw, Ul, Ur)[0]
    eu = EulerModel()
    W = rng.uniform(0.1, 10, (n, 3))
    W[:, 1] = rng.uniform(-2, 2, n)
    ratio = np.exp(rng.uniform(np.log(0.1), np.log(10), (n, 3)))
    W2 = W * ratio
    W2[:, 1] = rng.uniform(-2, 2, n)
    res_eu = _ec_residual(eu, eu.conserved(W), eu.conserved(W2))[1]
    print(f"seed={args.seed} swlin max abs residual={res_sw:.3e} euler max rel residual={res_eu:.3e}")
    return 0


def _ec_residual(model, Ul, Ur):
    F = model.ec_flux(Ul, Ur)
    dV = model.entropy_vars(Ur) - model.entropy_vars(Ul)
    dPsi = model.entropy_potential(Ur) - model.entropy_potential(Ul)
    res = np.abs(np.sum(dV * F, axis=-1) - dPsi)
    scale = np.sum(np.abs(dV * F), axis=-1) + np.abs(dPsi)
    return float(res.max()), float((res / np.maximum(scale, 1e-300)).max())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cndfv", description=__doc__.splitlines()[0])
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("--config", required=True, help="config path or shipped config name")
    p.add_argument("--output", help="override output.path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="run several configs one after another")
    p.add_argument("configs", nargs="+")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("converge", help="L1 convergence study on nested meshes")
    p.add_argument("--config", required=True)
    p.add_argument("--meshes", default="100,200,400,800")
    p.add_argument("--component", type=int, default=None)
    p.add_argument("--output")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("compare", help="error norms between two run CSVs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--component")
    p.add_argument("--window", type=float, nargs=2, metavar=("A", "B"))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("exact", help="dump the exact shallow water limits")
    p.add_argument("--t", type=float, default=0.25)
    p.add_argument("--n-cells", type=int, default=1000)
    p.add_argument("--output")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("check", help="randomized entropy-conservation check")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"error[config]: {v}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"error[model]: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SolverError as exc:
        print(f"error[solver]: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error[input]: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
