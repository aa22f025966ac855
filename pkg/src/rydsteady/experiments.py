"""Parameter sweeps, figure-reproduction pipelines, file formats, CLI.

All pipelines operate on MHz-level configuration dictionaries (the JSON
schema of :func:`rydsteady.model.spec_from_config`); derived-parameter
rules are re-evaluated at every grid point before solving.  Every output
file gets a ``<name>.meta.json`` sidecar carrying the fully resolved
inputs; :func:`rerun_from_metadata` reproduces the table from that sidecar
alone (bit-identically, apart from the wall-time column).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, dynamics, metrics, model
from .opalg import DensityMatrix

SWEEP_COLUMNS = ("delta_mhz", "gamma_khz", "negativity", "fidelity_psi",
                 "residual", "status", "wall_ms")
TRAJECTORY_COLUMNS = ("t_ms", "p_psi", "p_phi", "p_upsilon", "p_ground",
                      "fidelity_target", "trace")

AXIS_NAMES = ("delta_mhz", "gamma_khz", "omega_mhz")

JOBS_ENV = "RYDSTEADY_JOBS"

FIGURES = ("fig2", "fig3", "fig3-inset", "fig4")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


# ---------------------------------------------------------------------------
# Derived-parameter rules (MHz-level config transforms)
# ---------------------------------------------------------------------------

def _rule_microwave_lock(cfg: dict) -> dict:
    om = cfg["omega_mhz"]
    om = om[0] if isinstance(om, (list, tuple)) else om
    mw = model.microwave_lock_mhz(om, cfg["delta_mhz"])
    out = dict(cfg)
    out["omega_mw_mhz"] = [mw, mw]
    return out


def _rule_cross_resonant(cfg: dict) -> dict:
    out = dict(cfg)
    out["u_table_mhz"] = model.cross_resonant_u_mhz(cfg["delta_mhz"])
    return out


def _rule_same_resonant(cfg: dict) -> dict:
    out = dict(cfg)
    out["u_table_mhz"] = model.same_resonant_u_mhz(cfg["delta_mhz"])
    return out


RULES = {
    "microwave-lock": _rule_microwave_lock,
    "cross-resonant-u": _rule_cross_resonant,
    "same-resonant-u": _rule_same_resonant,
}


def apply_rules(cfg: dict, rules) -> dict:
    for name in rules:
        try:
            cfg = RULES[name](cfg)
        except KeyError:
            raise model.ConfigError(
                f"unknown derived-parameter rule {name!r}; "
                f"known rules: {', '.join(sorted(RULES))}"
            ) from None
    return cfg


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """A steady-state sweep over one or two named parameter grids."""

    base: dict                       # MHz-level configuration
    axes: tuple                      # ((name, values), [(name, values)])
    rules: tuple = ("cross-resonant-u", "microwave-lock")
    metrics: tuple = ("negativity", "fidelity_psi")

    def __post_init__(self):
        base = self.base
        if isinstance(base, model.ModelSpec):
            base = model.spec_to_config(base)
        if not isinstance(base, dict):
            raise TypeError("base must be a configuration dict or ModelSpec")
        model.spec_from_config(base)   # validate early
        object.__setattr__(self, "base", dict(base))
        axes = tuple((str(n), tuple(float(v) for v in vals))
                     for n, vals in self.axes)
        if not 1 <= len(axes) <= 2:
            raise ValueError("sweeps support one or two axes")
        for name, vals in axes:
            if name not in AXIS_NAMES:
                raise ValueError(f"unknown axis {name!r}; expected one of "
                                 f"{AXIS_NAMES}")
            if not vals:
                raise ValueError(f"axis {name!r} has an empty grid")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "rules", tuple(self.rules))
        apply_rules(dict(base), self.rules)   # validate rule names early

    def point_configs(self) -> list[dict]:
        """Resolved per-point configurations in row-major grid order."""
        grids = [vals for _, vals in self.axes]
        names = [name for name, _ in self.axes]
        points = []
        for combo in _rowmajor(grids):
            cfg = dict(self.base)
            for name, value in zip(names, combo):
                cfg[name] = value
            points.append(apply_rules(cfg, self.rules))
        return points

    def metadata(self) -> dict:
        return {
            "kind": "sweep",
            "base_config": self.base,
            "axes": [[name, list(vals)] for name, vals in self.axes],
            "rules": list(self.rules),
            "metrics": list(self.metrics),
            "flavor": self.base.get("flavor", "full"),
            "collapse_variant": self.base.get("collapse_variant"),
            "version": __version__,
        }


def _rowmajor(grids):
    if len(grids) == 1:
        for a in grids[0]:
            yield (a,)
    else:
        for a in grids[0]:
            for b in grids[1]:
                yield (a, b)


@dataclass
class SweepTable:
    """Rows of axis values, metric values, residual and wall time."""

    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def write(self, out_dir, name: str, fmt: str = "csv") -> dict:
        return write_table(self, out_dir, name, fmt)


def _solve_point(cfg: dict) -> dict:
    """One steady-state grid point; never raises (status column instead)."""
    t0 = time.perf_counter()
    row = {
        "delta_mhz": cfg["delta_mhz"],
        "gamma_khz": cfg["gamma_khz"],
        "negativity": math.nan,
        "fidelity_psi": math.nan,
        "residual": math.nan,
        "status": "ok",
        "wall_ms": 0.0,
    }
    try:
        spec = model.spec_from_config(cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            sol = dynamics.steady_state(spec)
        row["residual"] = sol.residual
        if spec.atoms == 2:
            row["negativity"] = metrics.negativity(sol.rho)
            row["fidelity_psi"] = metrics.fidelity_pure(
                sol.rho, model.target_state("Psi"))
        if not sol.unique:
            row["status"] = "degenerate"
    except Exception as exc:   # recorded in-row, sweep never aborts
        row["status"] = f"error: {exc}"
    row["wall_ms"] = (time.perf_counter() - t0) * 1e3
    return row


def run_sweep(sweep: SweepSpec, jobs: int = 1) -> SweepTable:
    """Evaluate steady state + metrics at every grid point.

    Grid points are independent; ``jobs > 1`` runs them on a process pool.
    Output row order is the row-major grid order either way.
    """
    points = sweep.point_configs()
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_solve_point, points))
    else:
        rows = [_solve_point(cfg) for cfg in points]
    return SweepTable(columns=SWEEP_COLUMNS, rows=rows,
                      metadata=sweep.metadata())


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

def _initial_state(name: str, atoms: int):
    if name == "ground-mixture":
        return model.uniform_ground_mixture(atoms)
    return DensityMatrix.from_vector(model.target_state(name, atoms),
                                     (model.N_LEVELS,) * atoms)


def run_trajectory(cfg: dict, *, initial: str, t_final_ms: float,
                   observe_every_ms: float, target: str,
                   stepper: dict | None = None) -> SweepTable:
    """Integrate one trajectory and tabulate it in the trajectory schema.

    ``stepper`` is a plain dict mirroring StepperConfig fields so it can be
    carried in metadata.
    """
    spec = model.spec_from_config(cfg)
    stepper = dict(stepper or {})
    sc = dynamics.StepperConfig(**stepper)
    rho0 = _initial_state(initial, spec.atoms)
    observables = {"fidelity_target": target, "p_ground": "ground"}
    if spec.atoms == 2:
        observables.update({"p_psi": "Psi", "p_phi": "Phi",
                            "p_upsilon": "Upsilon"})
    rec = dynamics.evolve(spec, rho0, t_final_ms * 1e3, sc,
                          observe_every=observe_every_ms * 1e3,
                          observables=observables)
    rows = []
    for i, t in enumerate(rec.times):
        row = {"t_ms": float(t) / 1e3}
        for short in ("p_psi", "p_phi", "p_upsilon"):
            row[short] = (float(rec.observables[short][i])
                          if short in rec.observables else math.nan)
        row["p_ground"] = float(rec.observables["p_ground"][i])
        row["fidelity_target"] = float(rec.observables["fidelity_target"][i])
        row["trace"] = float(rec.observables["trace"][i])
        rows.append(row)
    meta = {
        "kind": "trajectory",
        "config": dict(cfg),
        "initial": initial,
        "target": target,
        "t_final_ms": t_final_ms,
        "observe_every_ms": observe_every_ms,
        "stepper": stepper,
        "engine": rec.meta.get("engine"),
        "steps": rec.meta.get("steps"),
        "version": __version__,
    }
    return SweepTable(columns=TRAJECTORY_COLUMNS, rows=rows, metadata=meta)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(table: SweepTable, out_dir, name: str, fmt: str = "csv") -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    if fmt == "csv":
        data_path = out_dir / f"{name}.csv"
        with open(data_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([_format_cell(row[c]) for c in table.columns])
    elif fmt == "json":
        data_path = out_dir / f"{name}.json"
        with open(data_path, "w") as fh:
            json.dump({"metadata": table.metadata,
                       "columns": list(table.columns),
                       "rows": table.rows}, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    meta_path = out_dir / f"{name}.meta.json"
    with open(meta_path, "w") as fh:
        json.dump(table.metadata, fh, indent=1)
        fh.write("\n")
    paths["data"] = data_path
    paths["meta"] = meta_path
    return paths


def rerun_from_metadata(meta: dict, jobs: int = 1) -> SweepTable:
    """Recompute the table described by a ``.meta.json`` document.

    All physics columns reproduce bit-identically; wall_ms is volatile.
    """
    kind = meta.get("kind")
    if kind == "sweep":
        sweep = SweepSpec(base=meta["base_config"],
                          axes=tuple((n, tuple(v)) for n, v in meta["axes"]),
                          rules=tuple(meta["rules"]),
                          metrics=tuple(meta.get("metrics", ())))
        return run_sweep(sweep, jobs=jobs)
    if kind == "trajectory":
        return run_trajectory(meta["config"], initial=meta["initial"],
                              t_final_ms=meta["t_final_ms"],
                              observe_every_ms=meta["observe_every_ms"],
                              target=meta["target"],
                              stepper=meta.get("stepper"))
    raise ValueError(f"unknown metadata kind {kind!r}")


# ---------------------------------------------------------------------------
# Figure pipelines
# ---------------------------------------------------------------------------

def _merge_overrides(cfg: dict, overrides: dict | None) -> dict:
    if not overrides:
        return cfg
    unknown = sorted(set(overrides) - set(model.CONFIG_KEYS))
    if unknown:
        raise model.ConfigError(
            f"unknown override key(s): {', '.join(unknown)}"
        )
    out = dict(cfg)
    out.update(overrides)
    return out


def reproduce_figure(fig: str, overrides: dict | None = None, *,
                     out_dir=".", fmt: str = "csv", jobs: int = 1,
                     horizon_ms: float | None = None,
                     grid: tuple[int, int] = (10, 10)) -> dict:
    """Regenerate one of the reference data sets.

    fig2       negativity over a delta x gamma steady-state grid
    fig3       steady-state fidelity versus delta at gamma = 1 kHz
    fig3-inset effective-model relaxation of the uniform ground mixture
               (complete per-channel decay set: the truncated effective set
               strands population in decay-free excited superpositions)
    fig4       three-atom singlet trajectory from |gL gL gL>

    Returns {"data": path, "meta": path}.
    """
    if fig not in FIGURES:
        raise ValueError(f"unknown figure id {fig!r}; expected one of {FIGURES}")
    name = fig.replace("-", "_")
    if fig == "fig2":
        base = _merge_overrides(model.two_atom_config(5.0), overrides)
        sweep = SweepSpec(
            base=base,
            axes=(("delta_mhz", tuple(np.linspace(0.5, 5.0, grid[0]))),
                  ("gamma_khz", tuple(np.linspace(1.0, 10.0, grid[1])))),
        )
        table = run_sweep(sweep, jobs=jobs)
    elif fig == "fig3":
        base = _merge_overrides(model.two_atom_config(5.0, gamma_khz=1.0),
                                overrides)
        sweep = SweepSpec(
            base=base,
            axes=(("delta_mhz", tuple(np.linspace(0.5, 5.0, grid[0]))),),
        )
        table = run_sweep(sweep, jobs=jobs)
    elif fig == "fig3-inset":
        cfg = model.two_atom_config(0.5, gamma_khz=1.0, flavor="effective",
                                    collapse_variant="independent")
        cfg = _merge_overrides(cfg, overrides)
        table = run_trajectory(
            cfg, initial="ground-mixture",
            t_final_ms=horizon_ms if horizon_ms is not None else 100.0,
            observe_every_ms=1.0, target="Psi",
            stepper={"kind": "rk4-fixed"},
        )
    else:
        cfg = _merge_overrides(model.three_atom_config(0.5, gamma_khz=1.0),
                               overrides)
        table = run_trajectory(
            cfg, initial="gLgLgL",
            t_final_ms=horizon_ms if horizon_ms is not None else 30.0,
            observe_every_ms=1.0, target="S3",
            stepper={"kind": "rk-adaptive", "rel_tol": 1e-6, "abs_tol": 1e-9},
        )
    return write_table(table, out_dir, name, fmt)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise model.ConfigError(f"configuration file not found: {p}")
    try:
        with open(p) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise model.ConfigError(f"{p}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise model.ConfigError(f"{p}: expected a JSON object")
    return doc


def _parse_axis(text: str) -> tuple[str, tuple]:
    #  name=start:stop:count  or  name=v1,v2,v3
    try:
        name, rest = text.split("=", 1)
    except ValueError:
        raise model.ConfigError(
            f"axis {text!r} must look like name=start:stop:count"
        ) from None
    name = name.strip()
    if ":" in rest:
        parts = rest.split(":")
        if len(parts) != 3:
            raise model.ConfigError(
                f"axis {text!r} must look like name=start:stop:count"
            )
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise model.ConfigError(f"axis {text!r}: count must be >= 1")
        values = tuple(np.linspace(start, stop, count))
    else:
        values = tuple(float(v) for v in rest.split(",") if v)
        if not values:
            raise model.ConfigError(f"axis {text!r} has no values")
    return name, values


def _jobs_default() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _apply_cli_model_flags(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    if getattr(args, "flavor", None):
        cfg["flavor"] = args.flavor
    if getattr(args, "collapse_variant", None):
        cfg["collapse_variant"] = args.collapse_variant
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydsteady",
        description="Steady-state entanglement engine for driven "
                    "dissipative Rydberg atoms",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="JSON model configuration")
        p.add_argument("--out", help="output directory (skip writing if absent)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--flavor", choices=model.FLAVORS)
        p.add_argument("--collapse-variant", dest="collapse_variant",
                       choices=model.COLLAPSE_VARIANTS)
        p.add_argument("--jobs", type=int, default=_jobs_default())

    p_steady = sub.add_parser("steady", help="solve one steady state")
    add_common(p_steady)

    p_evolve = sub.add_parser("evolve", help="integrate one trajectory")
    add_common(p_evolve)
    p_evolve.add_argument("--t-final-ms", type=float, required=True)
    p_evolve.add_argument("--observe-every-ms", type=float, default=None)
    p_evolve.add_argument("--initial", default="ground-mixture",
                          help="'ground-mixture' or a product label like gLgL")
    p_evolve.add_argument("--target", default=None,
                          help="fidelity target state name")
    p_evolve.add_argument("--stepper", choices=("rk4-fixed", "rk-adaptive"),
                          default="rk-adaptive")
    p_evolve.add_argument("--dt-us", type=float, default=None)
    p_evolve.add_argument("--rel-tol", type=float, default=1e-8)
    p_evolve.add_argument("--abs-tol", type=float, default=1e-10)

    p_sweep = sub.add_parser("sweep", help="steady-state parameter sweep")
    add_common(p_sweep)
    p_sweep.add_argument("--axis", action="append", required=True,
                         metavar="NAME=START:STOP:COUNT",
                         help="sweep axis (repeat for a 2-D grid)")
    p_sweep.add_argument("--rules", default="cross-resonant-u,microwave-lock",
                         help="comma-separated derived-parameter rules")

    p_fig = sub.add_parser("figure", help="regenerate a reference data set")
    p_fig.add_argument("fig", choices=FIGURES)
    p_fig.add_argument("--out", default=".")
    p_fig.add_argument("--format", choices=("csv", "json"), default="csv")
    p_fig.add_argument("--flavor", choices=model.FLAVORS)
    p_fig.add_argument("--collapse-variant", dest="collapse_variant",
                       choices=model.COLLAPSE_VARIANTS)
    p_fig.add_argument("--jobs", type=int, default=_jobs_default())
    p_fig.add_argument("--horizon-ms", type=float, default=None)
    p_fig.add_argument("--grid", default="10,10", metavar="ND,NG",
                       help="sweep grid size for fig2/fig3")
    return parser


def _cmd_steady(args) -> int:
    cfg = _apply_cli_model_flags(_load_config(args.config), args)
    model.spec_from_config(cfg)   # config problems exit 2, not 3
    t0 = time.perf_counter()
    row = _solve_point(cfg)
    wall = (time.perf_counter() - t0) * 1e3
    if row["status"].startswith("error"):
        print(f"steady: {row['status']}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"negativity={row['negativity']:.6f} "
          f"fidelity_psi={row['fidelity_psi']:.6f} "
          f"residual={row['residual']:.3e} status={row['status']} "
          f"wall_ms={wall:.0f}")
    if args.out:
        table = SweepTable(columns=SWEEP_COLUMNS, rows=[row],
                           metadata={"kind": "sweep", "base_config": cfg,
                                     "axes": [["delta_mhz", [cfg["delta_mhz"]]]],
                                     "rules": [], "metrics": [],
                                     "version": __version__})
        paths = write_table(table, args.out, "steady", args.format)
        print(f"wrote {paths['data']}")
    return EXIT_OK


def _cmd_evolve(args) -> int:
    cfg = _apply_cli_model_flags(_load_config(args.config), args)
    stepper = {"kind": args.stepper}
    if args.stepper == "rk4-fixed":
        if args.dt_us is not None:
            stepper["dt"] = args.dt_us
    else:
        stepper["rel_tol"] = args.rel_tol
        stepper["abs_tol"] = args.abs_tol
    atoms = cfg.get("atoms", 2)
    target = args.target or ("S3" if atoms == 3 else "Psi")
    observe = args.observe_every_ms
    if observe is None:
        observe = max(args.t_final_ms / 200.0, 1e-6)
    t0 = time.perf_counter()
    table = run_trajectory(cfg, initial=args.initial,
                           t_final_ms=args.t_final_ms,
                           observe_every_ms=observe, target=target,
                           stepper=stepper)
    wall = (time.perf_counter() - t0) * 1e3
    last = table.rows[-1]
    print(f"t_ms={last['t_ms']:.3f} fidelity_{target.lower()}="
          f"{last['fidelity_target']:.6f} trace={last['trace']:.9f} "
          f"steps={table.metadata['steps']} wall_ms={wall:.0f}")
    if args.out:
        paths = write_table(table, args.out, "trajectory", args.format)
        print(f"wrote {paths['data']}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _apply_cli_model_flags(_load_config(args.config), args)
    axes = tuple(_parse_axis(a) for a in args.axis)
    rules = tuple(r.strip() for r in args.rules.split(",") if r.strip())
    sweep = SweepSpec(base=cfg, axes=axes, rules=rules)
    t0 = time.perf_counter()
    table = run_sweep(sweep, jobs=args.jobs)
    wall = (time.perf_counter() - t0) * 1e3
    ok = sum(1 for r in table.rows if r["status"] == "ok")
    neg = table.column("negativity")
    best = float(np.nanmax(neg)) if ok else math.nan
    print(f"points={len(table.rows)} ok={ok} max_negativity={best:.6f} "
          f"wall_ms={wall:.0f}")
    if args.out:
        paths = write_table(table, args.out, "sweep", args.format)
        print(f"wrote {paths['data']}")
    return EXIT_OK


def _cmd_figure(args) -> int:
    overrides = {}
    if args.flavor:
        overrides["flavor"] = args.flavor
    if args.collapse_variant:
        overrides["collapse_variant"] = args.collapse_variant
    try:
        grid = tuple(int(x) for x in args.grid.split(","))
        if len(grid) == 1:
            grid = (grid[0], grid[0])
        if len(grid) != 2 or min(grid) < 1:
            raise ValueError
    except ValueError:
        raise model.ConfigError(
            f"--grid {args.grid!r} must look like ND,NG"
        ) from None
    t0 = time.perf_counter()
    paths = reproduce_figure(args.fig, overrides or None, out_dir=args.out,
                             fmt=args.format, jobs=args.jobs,
                             horizon_ms=args.horizon_ms, grid=grid)
    wall = (time.perf_counter() - t0) * 1e3
    print(f"{args.fig}: wrote {paths['data']} (+ {paths['meta'].name}) "
          f"wall_ms={wall:.0f}")
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"steady": _cmd_steady, "evolve": _cmd_evolve,
                "sweep": _cmd_sweep, "figure": _cmd_figure}
    try:
        return handlers[args.command](args)
    except model.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (dynamics.SolverError,) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(cli_main())
