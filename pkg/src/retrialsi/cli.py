"""Config-driven scenario runner: wires the solvers together and emits CSV reports.

Subcommands: solve, table, sweep, timeseries, stationary, simulate,
validate-config.  Exit codes: 0 ok, 2 configuration error, 3 numerical
accuracy error.  All reports are UTF-8, comma-separated CSV with LF line
endings; rounded values use round-half-even.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import AccuracyError, ConfigError, DomainError, NumericalError
from .generator import build_generator
from .inversion import DEFAULT_CHAIN_ORDER, transient_via_ilt
from .laplace import stationary_fvt, stationary_nullspace
from .measures import marginal_orbit, marginal_recovering, moment_orbit, moment_recovering
from .model import (
    ContactGraph,
    Mode,
    ModelConfig,
    load_graph,
    rate_function,
    ring_with_hub,
)
from .reference import REFERENCE_FIRST_MOMENTS, REFERENCE_TOLERANCE
from .transient import (
    ProbabilityVector,
    Provenance,
    TransientSolution,
    delta_vector,
    monte_carlo_estimate,
    simulate_gillespie,
    transient_grid,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

METHODS = ("ilt", "uniformization", "monte_carlo")
OUTPUT_KINDS = ("state_probs", "marginals", "moments", "stationary", "table_grid", "theta_sweep")

DEFAULT_TABLE_N = (10, 20, 40)
DEFAULT_TABLE_C = (5, 10, 15, 20)
DEFAULT_TABLE_TIMES = (0.5, 2.0, 5.0, 10.0, 20.0)
DEFAULT_SWEEP_THETAS = (0.0, 1.0, 5.0)


@dataclass(frozen=True)
class SolverSettings:
    method: str = "ilt"
    order: int = DEFAULT_CHAIN_ORDER  # config key "K"
    eps: float = 1e-10
    replicas: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    model: ModelConfig
    solver: SolverSettings
    times: np.ndarray | None
    outputs: tuple[str, ...]
    graph: ContactGraph | None = None
    graph_path: str | None = None
    table_n: tuple[int, ...] = DEFAULT_TABLE_N
    table_c: tuple[int, ...] = DEFAULT_TABLE_C
    table_times: tuple[float, ...] = DEFAULT_TABLE_TIMES
    sweep_thetas: tuple[float, ...] = DEFAULT_SWEEP_THETAS
    sweep_times: np.ndarray | None = None
    raw: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def grid(self) -> np.ndarray:
        """Configured time grid, defaulting to the mode's plotting range."""
        if self.times is not None:
            return self.times
        stop = 9.0 if self.model.mode is Mode.HOMOGENEOUS else 14.0
        return np.round(np.arange(0.0, stop + 1e-9, 0.5), 10)


def _parse_times(value, label):
    if value is None:
        return None
    if isinstance(value, dict):
        missing = {"start", "stop", "step"} - set(value)
        if missing:
            raise ConfigError(f"{label}: missing keys {sorted(missing)}")
        start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        if step <= 0:
            raise ConfigError(f"{label}.step: must be > 0, got {step}")
        if stop < start:
            raise ConfigError(f"{label}: stop {stop} precedes start {start}")
        return np.round(np.arange(start, stop + step / 2.0, step), 12)
    if isinstance(value, (list, tuple)):
        if len(value) == 0:
            raise ConfigError(f"{label}: must not be empty")
        grid = np.asarray([float(v) for v in value])
        if np.any(grid < 0):
            raise ConfigError(f"{label}: times must be nonnegative")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ConfigError(f"{label}: times must be strictly increasing")
        return grid
    raise ConfigError(f"{label}: expected a list or {{start, stop, step}}")


def load_scenario(path, method_override=None, seed_override=None) -> ScenarioConfig:
    """Parse and validate a YAML scenario document."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: invalid YAML: {exc}") from exc
    if not isinstance(mapping, dict):
        raise ConfigError("config: top level must be a mapping")
    return scenario_from_mapping(
        mapping, base_dir=path.parent,
        method_override=method_override, seed_override=seed_override,
    )


def scenario_from_mapping(mapping: dict, base_dir=".",
                          method_override=None, seed_override=None) -> ScenarioConfig:
    model_map = mapping.get("model")
    if not isinstance(model_map, dict):
        raise ConfigError("model: required mapping is missing")

    try:
        model = ModelConfig(
            N=int(model_map.get("N", 0)),
            c=int(model_map.get("c", 0)),
            alpha=float(model_map.get("alpha", 0.0)),
            mu=float(model_map.get("mu", 0.0)),
            theta=float(model_map.get("theta", 0.0)),
            mode=str(model_map.get("mode", "homogeneous")).lower(),
            tagged_node=(
                int(model_map["tagged_node"]) if "tagged_node" in model_map
                else (2 if str(model_map.get("mode", "")).lower() == "heterogeneous" else None)
            ),
            closure=str(model_map.get("closure", "mean_field")).lower(),
            initial_state=tuple(model_map.get("initial_state", (0, 0))),
        )
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc

    graph = None
    graph_path = mapping.get("graph_path")
    if model.mode is Mode.HETEROGENEOUS:
        if not graph_path:
            raise ConfigError("graph_path: required when mode is heterogeneous")
        resolved = Path(base_dir) / graph_path
        try:
            graph = load_graph(resolved.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"graph_path: cannot read {resolved}: {exc}") from exc

    solver_map = mapping.get("solver") or {}
    if not isinstance(solver_map, dict):
        raise ConfigError("solver: must be a mapping")
    method = str(method_override or solver_map.get("method", "ilt")).lower()
    if method not in METHODS:
        raise ConfigError(f"solver.method: must be one of {METHODS}, got {method!r}")
    try:
        solver = SolverSettings(
            method=method,
            order=int(solver_map.get("K", DEFAULT_CHAIN_ORDER)),
            eps=float(solver_map.get("eps", 1e-10)),
            replicas=int(solver_map.get("replicas", 100_000)),
            seed=int(seed_override if seed_override is not None else solver_map.get("seed", 0)),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc

    times = _parse_times(mapping.get("times"), "times")

    outputs_raw = mapping.get("outputs", ["moments"])
    if not isinstance(outputs_raw, (list, tuple)) or len(outputs_raw) == 0:
        raise ConfigError("outputs: at least one output kind is required")
    outputs = tuple(str(o).lower() for o in outputs_raw)
    unknown = [o for o in outputs if o not in OUTPUT_KINDS]
    if unknown:
        raise ConfigError(f"outputs: unknown kinds {unknown}; valid: {OUTPUT_KINDS}")

    table_map = mapping.get("table") or {}
    sweep_map = mapping.get("sweep") or {}
    sweep_times = _parse_times(sweep_map.get("times"), "sweep.times")

    raw = {k: v for k, v in mapping.items()}
    raw.setdefault("solver", {})
    raw["solver"] = {**solver_map, "method": method, "seed": solver.seed}

    return ScenarioConfig(
        model=model,
        solver=solver,
        times=times,
        outputs=outputs,
        graph=graph,
        graph_path=graph_path,
        table_n=tuple(int(n) for n in table_map.get("N", DEFAULT_TABLE_N)),
        table_c=tuple(int(c) for c in table_map.get("c", DEFAULT_TABLE_C)),
        table_times=tuple(float(t) for t in table_map.get("times", DEFAULT_TABLE_TIMES)),
        sweep_thetas=tuple(float(t) for t in sweep_map.get("thetas", DEFAULT_SWEEP_THETAS)),
        sweep_times=sweep_times,
        raw=raw,
    )


# --- solving ---------------------------------------------------------------


def _solve_grid(model: ModelConfig, graph, solver: SolverSettings,
                times: np.ndarray) -> TransientSolution:
    """Distribution on a time grid under the configured method.

    A leading t = 0 is served directly by the initial distribution (the
    inverse transform needs t > 0; the other methods accept 0 anyway).
    """
    rate = rate_function(model, graph)
    gen = build_generator(model, rate)
    p0 = delta_vector(model.space, model.initial_state, Provenance.ILT)
    if solver.method == "uniformization":
        return transient_grid(gen, p0, times, eps=solver.eps)
    if solver.method == "monte_carlo":
        return monte_carlo_estimate(model, rate, times, solver.replicas, solver.seed).solution

    positive = times[times > 0]
    sol = transient_via_ilt(gen, p0, positive, order=solver.order)
    if positive.size == times.size:
        return sol
    vectors = [ProbabilityVector(p0.values, 0.0, Provenance.ILT, model.space)] + sol.vectors
    return TransientSolution(times, vectors, sol.metadata)


# --- report writing ---------------------------------------------------------


def _metadata(scenario: ScenarioConfig, command: str) -> dict:
    s = scenario.solver
    meta = {
        "generator": "retrialsi",
        "version": __version__,
        "command": command,
        "config_hash": scenario.config_hash,
        "method": s.method,
        "K": s.order,
        "eps": s.eps,
        "replicas": s.replicas,
        "seed": s.seed,
    }
    if scenario.model.mode is Mode.HETEROGENEOUS:
        meta["mode"] = "heterogeneous"
        meta["graph"] = scenario.graph_path or "ring_with_hub"
        meta["tagged_node"] = scenario.model.tagged_node
        meta["closure"] = scenario.model.closure.value
    meta["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _write_csv(path: Path, columns, rows, meta: dict | None, comments=()):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if meta:
            for key, value in meta.items():
                f.write(f"# {key}: {value}\n")
        for line in comments:
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
    return path


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_state_probs(scenario, sol, out_dir, meta):
    space = scenario.model.space
    rows = []
    for t, vec in zip(sol.times, sol.vectors):
        for idx, p in enumerate(vec.values):
            i, j = space.state_at(idx)
            rows.append((_fmt(t), i, j, _fmt(p)))
    return [_write_csv(out_dir / "state_probs.csv", ("t", "i", "j", "probability"), rows, meta)]


def _write_marginals(scenario, sol, out_dir, meta, prefix="marginals"):
    rec_rows, orb_rows = [], []
    for t, vec in zip(sol.times, sol.vectors):
        for i, p in enumerate(marginal_recovering(vec)):
            rec_rows.append((_fmt(t), i, _fmt(p)))
        for j, p in enumerate(marginal_orbit(vec)):
            orb_rows.append((_fmt(t), j, _fmt(p)))
    return [
        _write_csv(out_dir / f"{prefix}_recovering.csv", ("t", "i", "probability"), rec_rows, meta),
        _write_csv(out_dir / f"{prefix}_orbit.csv", ("t", "j", "probability"), orb_rows, meta),
    ]


def _write_moments(scenario, sol, out_dir, meta, name="moments.csv"):
    rows = [
        (_fmt(t), _fmt(moment_recovering(vec)), _fmt(moment_orbit(vec)))
        for t, vec in zip(sol.times, sol.vectors)
    ]
    return [_write_csv(out_dir / name, ("t", "E_I", "E_R"), rows, meta)]


def _write_stationary(scenario, out_dir, meta):
    gen = build_generator(scenario.model, rate_function(scenario.model, scenario.graph))
    pi = stationary_nullspace(gen)
    p0 = delta_vector(scenario.model.space, scenario.model.initial_state)
    fvt = stationary_fvt(gen, p0)
    if meta is not None:
        meta = {
            **meta,
            "fvt_max_diff": float(np.abs(pi.values - fvt.vector.values).max()),
            "fvt_converged": fvt.converged,
        }
    space = scenario.model.space
    rows = []
    for idx, p in enumerate(pi.values):
        i, j = space.state_at(idx)
        rows.append((i, j, _fmt(p)))
    return [_write_csv(out_dir / "stationary.csv", ("i", "j", "probability"), rows, meta)]


def _table_cells(scenario: ScenarioConfig):
    """Compute (E_I, E_R) for every valid (N, c) pair on the table time grid.

    Heterogeneous grids span several population sizes, so they run on the
    documented fixture family ring_with_hub(N) rather than the single
    configured graph.
    """
    cells = {}
    heterogeneous = scenario.model.mode is Mode.HETEROGENEOUS
    times = np.asarray(scenario.table_times)
    for n in scenario.table_n:
        graph = ring_with_hub(n) if heterogeneous else None
        for c in scenario.table_c:
            if not 1 <= c < n:
                continue
            model = dataclasses.replace(scenario.model, N=n, c=c, initial_state=(0, 0))
            sol = _solve_grid(model, graph, scenario.solver, times)
            for t, vec in zip(sol.times, sol.vectors):
                cells[(c, float(t), n)] = (moment_recovering(vec), moment_orbit(vec))
    return cells


def _write_table(scenario, out_dir, meta):
    if scenario.model.mode is Mode.HETEROGENEOUS and meta is not None:
        meta = {**meta, "heterogeneous_fixture": "ring_with_hub(N)"}
    cells = _table_cells(scenario)
    columns = ["c", "t"] + [f"N={n}" for n in scenario.table_n]
    rounded_rows, tidy_rows = [], []
    for c in scenario.table_c:
        for t in scenario.table_times:
            row = [c, _fmt(t)]
            for n in scenario.table_n:
                cell = cells.get((c, float(t), n))
                row.append("" if cell is None else f"({cell[0]:.2f}, {cell[1]:.2f})")
                if cell is not None:
                    tidy_rows.append((n, c, _fmt(t), _fmt(cell[0]), _fmt(cell[1])))
            rounded_rows.append(row)
    paths = [
        _write_csv(out_dir / "table_grid.csv", columns, rounded_rows, meta),
        _write_csv(out_dir / "table_grid_unrounded.csv",
                   ("N", "c", "t", "E_I", "E_R"), tidy_rows, meta),
    ]
    paths.append(_write_match_report(scenario, cells, out_dir, meta))
    return paths


def _write_match_report(scenario, cells, out_dir, meta):
    """Compare the computed grid against the published reference values."""
    rows = []
    compared = matched = 0
    for (c, t, n), ref in sorted(REFERENCE_FIRST_MOMENTS.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        ours = cells.get((c, t, n))
        if ours is None:
            rows.append((c, _fmt(t), n, _fmt(ref[0]), _fmt(ref[1]), "", "", "not computed (requires c < N)"))
            continue
        compared += 1
        ok = abs(ours[0] - ref[0]) <= REFERENCE_TOLERANCE and abs(ours[1] - ref[1]) <= REFERENCE_TOLERANCE
        matched += ok
        rows.append((c, _fmt(t), n, _fmt(ref[0]), _fmt(ref[1]),
                     f"{ours[0]:.2f}", f"{ours[1]:.2f}", "match" if ok else "mismatch"))
    comments = (
        "reference values assume the parameter set alpha=5, mu=0.4, theta=2 (not restated by the source)",
        f"matched {matched} of {compared} compared cells at tolerance {REFERENCE_TOLERANCE}",
    )
    return _write_csv(out_dir / "reference_match.csv",
                      ("c", "t", "N", "ref_E_I", "ref_E_R", "E_I", "E_R", "status"),
                      rows, meta, comments=comments)


def _write_sweep(scenario, out_dir, meta):
    thetas = []
    dupes = []
    for th in scenario.sweep_thetas:
        if th in thetas:
            dupes.append(th)
        else:
            thetas.append(th)
    if dupes:
        print(f"warning: duplicate theta values deduplicated: {dupes}", file=sys.stderr)
    if any(th < 0 for th in thetas):
        raise ConfigError("sweep.thetas: must be nonnegative")
    times = scenario.sweep_times if scenario.sweep_times is not None else scenario.grid()

    paths = []
    modes = [(Mode.HOMOGENEOUS, None, "sweep_homogeneous.csv")]
    if scenario.graph is not None and scenario.model.tagged_node is not None:
        modes.append((Mode.HETEROGENEOUS, scenario.graph, "sweep_heterogeneous.csv"))
    for mode, graph, name in modes:
        rows = []
        for th in thetas:
            model = dataclasses.replace(scenario.model, theta=th, mode=mode)
            sol = _solve_grid(model, graph, scenario.solver, times)
            for t, vec in zip(sol.times, sol.vectors):
                rows.append((_fmt(th), _fmt(t),
                             _fmt(moment_recovering(vec)), _fmt(moment_orbit(vec))))
        paths.append(_write_csv(out_dir / name, ("theta", "t", "E_I", "E_R"), rows, meta))
    return paths


def run_scenario(scenario: ScenarioConfig, out_dir, no_metadata=False, command="solve"):
    """Produce every configured report; returns the list of files written."""
    out_dir = Path(out_dir)
    meta = None if no_metadata else _metadata(scenario, command)
    grid = scenario.grid()
    if grid.size == 0:
        raise ConfigError("times: the time grid is empty")

    needs_solution = {"state_probs", "marginals", "moments"} & set(scenario.outputs)
    sol = None
    if needs_solution:
        sol = _solve_grid(scenario.model, scenario.graph, scenario.solver, grid)

    written = []
    for kind in scenario.outputs:
        if kind == "state_probs":
            written += _write_state_probs(scenario, sol, out_dir, meta)
        elif kind == "marginals":
            written += _write_marginals(scenario, sol, out_dir, meta)
        elif kind == "moments":
            written += _write_moments(scenario, sol, out_dir, meta)
        elif kind == "stationary":
            written += _write_stationary(scenario, out_dir, meta)
        elif kind == "table_grid":
            written += _write_table(scenario, out_dir, meta)
        elif kind == "theta_sweep":
            written += _write_sweep(scenario, out_dir, meta)
    return written


# --- command handlers --------------------------------------------------------


def _scenario_from_args(args) -> ScenarioConfig:
    return load_scenario(args.config, method_override=args.method, seed_override=args.seed)


def _cmd_solve(args):
    scenario = _scenario_from_args(args)
    for path in run_scenario(scenario, args.out, args.no_metadata, command="solve"):
        print(path)
    return EXIT_OK


def _cmd_table(args):
    scenario = _scenario_from_args(args)
    meta = None if args.no_metadata else _metadata(scenario, "table")
    for path in _write_table(scenario, Path(args.out), meta):
        print(path)
    return EXIT_OK


def _cmd_sweep(args):
    scenario = _scenario_from_args(args)
    meta = None if args.no_metadata else _metadata(scenario, "sweep")
    for path in _write_sweep(scenario, Path(args.out), meta):
        print(path)
    return EXIT_OK


def _cmd_timeseries(args):
    scenario = _scenario_from_args(args)
    meta = None if args.no_metadata else _metadata(scenario, "timeseries")
    grid = scenario.grid()
    if grid.size == 0:
        raise ConfigError("times: the time grid is empty")
    sol = _solve_grid(scenario.model, scenario.graph, scenario.solver, grid)
    out = Path(args.out)
    if args.kind == "marginals":
        paths = _write_marginals(scenario, sol, out, meta, prefix="timeseries_marginals")
    else:
        paths = _write_moments(scenario, sol, out, meta, name="timeseries_moments.csv")
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_stationary(args):
    scenario = _scenario_from_args(args)
    meta = None if args.no_metadata else _metadata(scenario, "stationary")
    for path in _write_stationary(scenario, Path(args.out), meta):
        print(path)
    return EXIT_OK


def _cmd_simulate(args):
    scenario = _scenario_from_args(args)
    horizon = float(scenario.grid().max())
    if horizon <= 0:
        raise ConfigError("times: simulation horizon must be positive")
    trajectory = simulate_gillespie(
        scenario.model, rate_function(scenario.model, scenario.graph),
        horizon, scenario.solver.seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "trajectory.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if not args.no_metadata:
            for key, value in _metadata(scenario, "simulate").items():
                f.write(f"# {key}: {value}\n")
            f.write(f"# rng: {trajectory.rng}\n")
        trajectory.write_csv(f)
    print(path)
    return EXIT_OK


def _cmd_validate(args):
    scenario = _scenario_from_args(args)
    print(f"ok: config hash {scenario.config_hash}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retrialsi",
        description="Transient analysis of the retrial-SI chain from a scenario config.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario YAML document")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--method", choices=METHODS, default=None, help="override solver method")
        p.add_argument("--seed", type=int, default=None, help="override solver seed")
        p.add_argument("--no-metadata", action="store_true",
                       help="omit metadata headers for byte-stable output")
        p.set_defaults(func=func)
        return p

    add("solve", _cmd_solve, "run every configured output kind")
    add("table", _cmd_table, "first-moment (N, c, t) grid plus reference match report")
    add("sweep", _cmd_sweep, "retrial-rate sweep of the first moments")
    ts = add("timeseries", _cmd_timeseries, "tidy time series for plotting")
    ts.add_argument("--kind", choices=("marginals", "moments"), default="moments")
    add("stationary", _cmd_stationary, "stationary distribution (nullspace method)")
    add("simulate", _cmd_simulate, "dump one stochastic trajectory")
    add("validate-config", _cmd_validate, "parse and validate the config, then exit")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, NumericalError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
