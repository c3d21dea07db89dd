from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .chain import chain_aggregate, chain_ensemble, make_disorder
from .eigensolver import SolverConfig
from .ensemble import (
    CHAIN_COLUMNS,
    FIGURES,
    ConfigError,
    SweepConfig,
    aggregate,
    reproduce_figure,
    run_cqa_sweep,
    write_aggregate,
    write_csv,
    write_manifest,
)
from .graphs import GraphError, generate_ensemble, write_jsonl


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse ``A:B:STEP`` into an inclusive, evenly spaced grid."""
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B:STEP, got {text!r}") from None
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    count = int(round((b - a) / step)) + 1
    return tuple(float(np.round(a + k * step, 12)) for k in range(count))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cqaloc", description="Constrained quantum annealing localization lab")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-graphs", help="write random regular graphs as JSON lines")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--degree", type=int, required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", type=Path, required=True)

    s = sub.add_parser("sweep", help="ground-state sweep of H(s) for each graph")
    s.add_argument("--graphs", type=Path, required=True)
    s.add_argument("--colors", type=int, default=4)
    s.add_argument("--driver", choices=("nn", "fc"), default="nn")
    s.add_argument("--s-grid", type=parse_grid, default=parse_grid("0:0.98:0.01"))
    s.add_argument("--probe-node", type=int, default=0)
    s.add_argument("--probe-color", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--seed", type=int, default=0, help="Lanczos start-vector seed")
    s.add_argument("--threads", type=int, default=1, help="worker processes (graph-level)")
    s.add_argument("--full-space", action="store_true", help="solve in the full q**N space")
    s.add_argument("--out", type=Path, required=True)

    c = sub.add_parser("chain-sweep", help="disordered-ring control ensemble")
    c.add_argument("--sites", type=int, required=True)
    c.add_argument("--degree", type=int, required=True)
    c.add_argument("--disorder", choices=("uniform", "discrete"), required=True)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--s-grid", type=parse_grid, default=parse_grid("0:0.98:0.01"))
    c.add_argument("--out", type=Path, required=True)

    f = sub.add_parser("figure", help="data tables for one figure")
    f.add_argument("--id", choices=FIGURES, required=True)
    f.add_argument("--ensemble", type=int, default=1000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--s-grid", type=parse_grid, default=None)
    f.add_argument("--threads", type=int, default=1)
    f.add_argument("--out", type=Path, required=True)
    return p


def _aggregate_path(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix + out.suffix)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-graphs":
            graphs = generate_ensemble(args.nodes, args.degree, args.count, args.seed)
            write_jsonl(graphs, args.out)
        elif args.command == "sweep":
            cfg = SweepConfig(
                graphs=args.graphs, q=args.colors, driver=args.driver, s_grid=args.s_grid,
                probe_node=args.probe_node, probe_color=args.probe_color,
                solver=SolverConfig(tolerance=args.tol, seed=args.seed), output=args.out,
                workers=args.threads, use_sector=not args.full_space,
            )
            records = run_cqa_sweep(cfg)
            write_aggregate(_aggregate_path(args.out, "_by_s"), aggregate(records, "by_s"))
            write_aggregate(_aggregate_path(args.out, "_by_ratio"), aggregate(records, "by_ratio_bins"))
            bad = sum(not r.converged for r in records)
            if bad:
                print(f"warning: {bad} solves did not converge (see manifest)", file=sys.stderr)
        elif args.command == "chain-sweep":
            spec = make_disorder(args.disorder, args.degree, args.sites)
            records = chain_ensemble(spec, args.sites, args.s_grid, args.samples, args.seed)
            write_csv(args.out, ["sample_id", "s", "delta_eff_empirical", "c_ds"],
                      [[r.sample_id, r.s, r.delta_eff_empirical, r.c_ds] for r in records])
            for group, suffix in (("by_s", "_by_s"), ("by_ratio_bins", "_by_ratio")):
                rows = chain_aggregate(records, group)
                for row in rows:
                    row["x"] = row["key"]
                write_aggregate(_aggregate_path(args.out, suffix), rows, CHAIN_COLUMNS)
            write_manifest(Path(str(args.out) + ".manifest.json"), {
                "chain": {"sites": args.sites, "degree": args.degree, "disorder": args.disorder,
                          "spec": repr(spec), "samples": args.samples, "seed": args.seed,
                          "s_grid": list(args.s_grid)},
            })
        else:
            reproduce_figure(args.id, args.out, ensemble=args.ensemble, seed=args.seed,
                             s_grid=args.s_grid, workers=args.threads)
    except (ConfigError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
