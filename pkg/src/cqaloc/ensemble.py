"""Seeded annealing sweeps over graph ensembles, aggregation, and figure tables."""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .chain import chain_aggregate, chain_ensemble, make_disorder
from .eigensolver import GroundState, NotConverged, SolverConfig, ground_state
from .graphs import RegularGraph, derive_seed, generate_ensemble, read_jsonl
from .hamiltonian import ColorShiftSector, build_parts
from .observables import effective_field_stats, pair_concurrences, theoretical_estimates
from .stats import binned, grouped

Observer = Callable[[int, RegularGraph, GroundState], None]

DEFAULT_S_GRID = tuple(round(0.01 * k, 2) for k in range(99))


class ConfigError(ValueError):
    pass


class SweepError(RuntimeError):
    def __init__(self, graph_id: int, s: float, cause: Exception):
        super().__init__(f"graph {graph_id} at s={s}: {cause}")
        self.graph_id, self.s, self.cause = graph_id, s, cause


@dataclass(frozen=True)
class GraphSpec:
    n: int
    c: int
    count: int
    seed: int


@dataclass
class SweepConfig:
    graphs: GraphSpec | str | Path | Sequence[RegularGraph]
    q: int = 4
    driver: str = "nn"
    J: float = 1.0
    s_grid: Sequence[float] = DEFAULT_S_GRID
    probe_node: int = 0
    probe_color: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: str | Path | None = None
    workers: int = 1
    use_sector: bool = True
    strict: bool = False

    def __post_init__(self):
        grid = [float(s) for s in self.s_grid]
        if not grid:
            raise ConfigError("s_grid is empty")
        if any(not 0 <= s <= 1 for s in grid):
            raise ConfigError("s_grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("s_grid must be strictly increasing")
        self.s_grid = tuple(grid)
        if self.driver not in ("nn", "fc"):
            raise ConfigError(f"driver must be nn or fc, got {self.driver!r}")
        if self.q < 2:
            raise ConfigError("need at least two colors")
        if not 0 <= self.probe_color < self.q:
            raise ConfigError(f"probe color {self.probe_color} outside [0, {self.q})")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if isinstance(self.graphs, GraphSpec):
            gs = self.graphs
            if gs.count < 1:
                raise ConfigError("graph count must be at least 1")
            if (gs.n * gs.c) % 2:
                raise ConfigError(f"no {gs.c}-regular graph on {gs.n} nodes: n*c is odd")
            if not 1 <= gs.c < gs.n:
                raise ConfigError(f"degree {gs.c} infeasible for n={gs.n}")
            if not 0 <= self.probe_node < gs.n:
                raise ConfigError(f"probe node {self.probe_node} outside [0, {gs.n})")

    def resolve_graphs(self) -> list[RegularGraph]:
        if isinstance(self.graphs, GraphSpec):
            g = self.graphs
            graphs = generate_ensemble(g.n, g.c, g.count, g.seed)
        elif isinstance(self.graphs, (str, Path)):
            graphs = read_jsonl(self.graphs)
        else:
            graphs = list(self.graphs)
        if not graphs:
            raise ConfigError("no graphs to sweep")
        for g in graphs:
            if not 0 <= self.probe_node < g.n_nodes:
                raise ConfigError(f"probe node {self.probe_node} outside graph of {g.n_nodes} nodes")
        return graphs

    def describe(self) -> dict:
        graphs = asdict(self.graphs) if isinstance(self.graphs, GraphSpec) else (
            str(self.graphs) if isinstance(self.graphs, (str, Path)) else f"{len(self.graphs)} inline graphs"
        )
        solver = {k: v for k, v in asdict(self.solver).items() if k != "warm_start"}
        return {
            "graphs": graphs,
            "q": self.q,
            "driver": self.driver,
            "J": self.J,
            "s_grid": list(self.s_grid),
            "probe_node": self.probe_node,
            "probe_color": self.probe_color,
            "solver": solver,
            "use_sector": self.use_sector,
        }


@dataclass
class SweepRecord:
    graph_id: int
    degree: int
    s: float
    energy: float
    residual: float
    eff_mean: float
    eff_fluctuation: float
    ratio_linear: float
    ratio_disorder: float
    c_ch: float
    pair_concurrences: tuple[float, ...]
    converged: bool = True

    def row(self) -> list:
        return [
            self.graph_id, self.degree, self.s, self.energy, self.residual, self.eff_mean,
            self.eff_fluctuation, self.ratio_linear, self.ratio_disorder, self.c_ch,
            *self.pair_concurrences, int(self.converged),
        ]


def record_header(q: int) -> list[str]:
    return [
        "graph_id", "degree", "s", "energy", "residual", "eff_mean", "eff_fluctuation",
        "ratio_linear", "ratio_disorder", "c_ch", *[f"pair_c_{a}" for a in range(q)], "converged",
    ]


def fmt(x) -> str:
    """Decimal notation, 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if x == 0:
        return "0"
    return np.format_float_positional(x, precision=12, unique=False, fractional=False, trim="-")


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])


def write_records(path: str | Path, records: Sequence[SweepRecord], q: int) -> None:
    write_csv(path, record_header(q), [r.row() for r in records])


def read_records(path: str | Path) -> list[SweepRecord]:
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        pairs = tuple(float(r[k]) for k in sorted((k for k in r if k.startswith("pair_c_")), key=lambda k: int(k[7:])))
        out.append(SweepRecord(
            graph_id=int(r["graph_id"]), degree=int(r["degree"]), s=float(r["s"]),
            energy=float(r["energy"]), residual=float(r["residual"]), eff_mean=float(r["eff_mean"]),
            eff_fluctuation=float(r["eff_fluctuation"]), ratio_linear=float(r["ratio_linear"]),
            ratio_disorder=float(r["ratio_disorder"]), c_ch=float(r["c_ch"]),
            pair_concurrences=pairs, converged=bool(int(r["converged"])),
        ))
    return out


def _failed(graph_id: int, degree: int, s: float, q: int) -> SweepRecord:
    nan = math.nan
    return SweepRecord(graph_id, degree, s, nan, nan, nan, nan, nan, nan, nan, (nan,) * q, False)


def _extrapolate(history: list[tuple[float, np.ndarray]], s: float) -> np.ndarray | None:
    """Linear prediction of the next ground state from the last two solved points."""
    if not history:
        return None
    if len(history) == 1:
        return history[0][1]
    (s0, x0), (s1, x1) = history
    return x1 + (x1 - x0) * ((s - s1) / (s1 - s0))


def sweep_graph(
    graph_id: int, g: RegularGraph, cfg: SweepConfig, observer: Observer | None = None
) -> list[SweepRecord]:
    """Warm-started sweep of one graph over the whole s grid.

    ``observer(graph_id, graph, state)`` is called with every converged
    full-space ground state.
    """
    parts = build_parts(g, cfg.q, cfg.driver, cfg.J)
    space = ColorShiftSector(parts, cfg.driver) if cfg.use_sector else parts
    q, node, color = cfg.q, cfg.probe_node, cfg.probe_color
    records = []
    history: list[tuple[float, np.ndarray]] = []
    for s in cfg.s_grid:
        solver = replace(cfg.solver, warm_start=_extrapolate(history, s))
        try:
            sol = ground_state(space.matvec(s), space.dim, solver, s=s)
        except NotConverged as exc:
            if cfg.strict:
                raise SweepError(graph_id, s, exc) from exc
            records.append(_failed(graph_id, g.degree, s, q))
            continue
        history = [*history[-1:], (s, sol.amplitudes)]
        gs = GroundState(s, sol.energy, space.expand(sol.amplitudes), sol.residual, sol.iterations)
        if observer is not None:
            observer(graph_id, g, gs)
        eff = effective_field_stats(gs, g, node, color, q, cfg.J)
        pairs = pair_concurrences(gs, node, q)
        records.append(SweepRecord(
            graph_id=graph_id, degree=g.degree, s=s, energy=gs.energy, residual=gs.residual,
            eff_mean=eff.mean, eff_fluctuation=eff.fluctuation, ratio_linear=eff.ratio_linear,
            ratio_disorder=eff.ratio_disorder, c_ch=0.5 * float(pairs.sum()),
            pair_concurrences=tuple(float(p) for p in pairs),
        ))
    return records


def _sweep_task(args):
    return sweep_graph(*args)


def run_cqa_sweep(
    cfg: SweepConfig, manifest: str | Path | None = None, observer: Observer | None = None
) -> list[SweepRecord]:
    """Sweep every graph of the configuration; records come back in graph_id order.

    Graphs are independent tasks (optionally spread over ``cfg.workers``
    processes; an observer forces a serial run). A solve that fails to
    converge yields a record with ``converged=False`` unless ``cfg.strict``
    is set.
    """
    graphs = cfg.resolve_graphs()
    tasks = [(k, g, cfg) for k, g in enumerate(graphs)]
    if cfg.workers > 1 and len(tasks) > 1 and observer is None:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_sweep_task, tasks))
    else:
        chunks = [sweep_graph(*t, observer=observer) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    if cfg.output is not None:
        write_records(cfg.output, records, cfg.q)
        manifest = manifest or Path(str(cfg.output) + ".manifest.json")
    if manifest is not None:
        write_manifest(manifest, {"sweep": cfg.describe(), "failures": failures(records)})
    return records


def failures(records: Sequence[SweepRecord]) -> list[dict]:
    return [{"graph_id": r.graph_id, "s": r.s} for r in records if not r.converged]


def aggregate(records: Sequence[SweepRecord], group: str = "by_s") -> list[dict]:
    """Mean and population std of c_ch grouped per s or per log bin of ratio_disorder.

    Non-converged records are skipped. Output rows carry ``key`` (s or bin
    center), ``mean_c_ch``, ``std_c_ch``, ``mean_eff_fluctuation``,
    ``mean_ratio_disorder`` and ``n``.
    """
    ok = [r for r in records if r.converged]
    if not ok:
        raise ValueError("no records to aggregate")
    cols = {
        "c_ch": [r.c_ch for r in ok],
        "eff_fluctuation": [r.eff_fluctuation for r in ok],
        "ratio_disorder": [r.ratio_disorder for r in ok],
    }
    if group == "by_s":
        rows = grouped([r.s for r in ok], cols)
    elif group == "by_ratio_bins":
        rows = binned([r.ratio_disorder for r in ok], cols)
    else:
        raise ValueError(f"unknown grouping {group!r}")
    return rows


AGG_COLUMNS = ["key", "mean_c_ch", "std_c_ch", "mean_eff_fluctuation", "mean_ratio_disorder", "n"]
CHAIN_COLUMNS = ["key", "x", "mean_c_ds", "std_c_ds", "mean_delta_eff", "n"]


def write_aggregate(path: str | Path, rows: Sequence[dict], columns: Sequence[str] = AGG_COLUMNS) -> None:
    write_csv(path, list(columns), [[r[c] for c in columns] for r in rows])


def write_manifest(path: str | Path, payload: dict) -> None:
    body = {"artifact": "cqaloc", "version": __version__, **payload}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(body, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6-like")


def _cqa_panel(out: Path, tag: str, n: int, q: int, c: int, driver: str, count: int, seed: int,
               s_grid: Sequence[float], workers: int, manifest: dict) -> list[SweepRecord]:
    cfg = SweepConfig(GraphSpec(n, c, count, derive_seed(seed, 1000 * n + 10 * q + c)), q=q,
                      driver=driver, s_grid=s_grid, workers=workers)
    records = run_cqa_sweep(cfg)
    write_records(out / f"{tag}_records.csv", records, q)
    write_aggregate(out / f"{tag}_by_s.csv", aggregate(records, "by_s"))
    write_aggregate(out / f"{tag}_by_ratio.csv", aggregate(records, "by_ratio_bins"))
    manifest["panels"][tag] = {**cfg.describe(), "failures": failures(records)}
    return records


def reproduce_figure(fig: str, out_dir: str | Path, ensemble: int = 1000, seed: int = 0,
                     s_grid: Sequence[float] | None = None, workers: int = 1) -> Path:
    """Write the data tables behind one figure, plus ``manifest.json``, into ``out_dir``."""
    if fig not in FIGURES:
        raise ValueError(f"unknown figure {fig!r}; choose from {', '.join(FIGURES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = tuple(s_grid) if s_grid is not None else DEFAULT_S_GRID
    manifest = {"figure": fig, "ensemble": ensemble, "seed": seed, "panels": {}}

    if fig == "fig2":
        grid = tuple(s for s in grid if s > 0)
        rows = []
        for c in (2, 3, 4):
            records = _cqa_panel(out, f"fig2_c{c}", 6, 4, c, "nn", 1, seed, grid, 1, manifest)
            rows += [[c, r.s, r.ratio_linear, r.eff_fluctuation, r.eff_mean] for r in records]
        write_csv(out / "fig2.csv", ["c", "s", "ratio_linear", "eff_fluctuation", "eff_mean"], rows)
    elif fig in ("fig3", "fig4"):
        drivers = ("nn",) if fig == "fig3" else ("nn", "fc")
        for drv in drivers:
            for c in (2, 3, 4):
                _cqa_panel(out, f"{fig}_{drv}_c{c}", 8, 4, c, drv, ensemble, seed, grid, workers, manifest)
    elif fig == "fig6-like":
        for n, q, degrees in ((8, 5, (2, 3, 4)), (9, 4, (2, 4))):
            for c in degrees:
                _cqa_panel(out, f"fig6_n{n}_q{q}_c{c}", n, q, c, "nn", ensemble, seed, grid, workers, manifest)
    else:
        for kind in ("uniform", "discrete"):
            for q in (4, 100):
                for c in (2, 3, 4):
                    tag = f"fig5_{kind}_q{q}_c{c}"
                    chain_seed = derive_seed(seed, 7 * q + c) if kind == "discrete" else seed
                    records = chain_ensemble(make_disorder(kind, c, q), q, grid, ensemble, chain_seed)
                    write_csv(out / f"{tag}_records.csv", ["sample_id", "s", "delta_eff_empirical", "c_ds"],
                              [[r.sample_id, r.s, r.delta_eff_empirical, r.c_ds] for r in records])
                    by_s = chain_aggregate(records, "by_s")
                    d1 = theoretical_estimates(c, q)["delta1"]
                    for row in by_s:
                        s = row["key"]
                        row["x"] = d1 * s / (1 - s) if s < 1 else math.nan
                    write_aggregate(out / f"{tag}_by_s.csv", by_s, CHAIN_COLUMNS)
                    by_ratio = chain_aggregate(records, "by_ratio_bins")
                    for row in by_ratio:
                        row["x"] = row["key"]
                    write_aggregate(out / f"{tag}_by_ratio.csv", by_ratio, CHAIN_COLUMNS)
                    manifest["panels"][tag] = {"disorder": kind, "q": q, "c": c, "samples": ensemble,
                                               "seed": chain_seed, "s_grid": list(grid)}
    write_manifest(out / "manifest.json", manifest)
    return out


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
