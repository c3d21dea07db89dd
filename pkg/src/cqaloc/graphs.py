"""Random regular graphs used as coloring instances.

Graphs are stored as a frozen edge tuple with 0-based node labels and
``i < j`` for every edge. Persistence is JSON lines, one graph per line.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class OddDegreeSum(GraphError):
    pass


class InfeasibleDegree(GraphError):
    pass


class GenerationStalled(GraphError):
    pass


MAX_RESTARTS = 10_000


@dataclass(frozen=True)
class RegularGraph:
    n_nodes: int
    degree: int
    edges: tuple[tuple[int, int], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, node: int) -> list[int]:
        out = []
        for i, j in self.edges:
            if i == node:
                out.append(j)
            elif j == node:
                out.append(i)
        return sorted(out)

    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    def to_json(self) -> str:
        edges = [[int(i), int(j)] for i, j in sorted(self.edges)]
        return json.dumps({"n": self.n_nodes, "c": self.degree, "edges": edges})

    @classmethod
    def from_json(cls, line: str) -> "RegularGraph":
        obj = json.loads(line)
        try:
            n, c, raw = int(obj["n"]), int(obj["c"]), obj["edges"]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph record: {exc}") from None
        edges = []
        for e in raw:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} is not a pair")
            i, j = int(e[0]), int(e[1])
            if i > j:
                raise GraphError(f"edge {e!r} is not ordered i < j")
            edges.append((i, j))
        if edges != sorted(edges):
            raise GraphError("edges are not sorted lexicographically")
        g = cls(n, c, tuple(edges))
        problems = validate(g)
        if problems:
            raise GraphError("; ".join(problems))
        return g


def validate(g: RegularGraph) -> list[str]:
    """Return the list of violated invariants; empty means the graph is valid."""
    problems = []
    if g.n_nodes < 1:
        problems.append(f"n_nodes={g.n_nodes} is not positive")
    if g.degree < 1:
        problems.append(f"degree={g.degree} is not positive")
    if (g.n_nodes * g.degree) % 2:
        problems.append(f"n_nodes*degree={g.n_nodes * g.degree} is odd")

    seen = set()
    counts = [0] * max(g.n_nodes, 0)
    for e in g.edges:
        i, j = e
        if i == j:
            problems.append(f"self-loop at node {i}")
        if not (0 <= min(i, j) and max(i, j) < g.n_nodes):
            problems.append(f"edge ({i},{j}) has a node out of range")
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            problems.append(f"duplicate edge {key}")
        seen.add(key)
        counts[i] += 1
        if j != i:
            counts[j] += 1
    for node, k in enumerate(counts):
        if k != g.degree:
            problems.append(f"node {node} has degree {k}, expected {g.degree}")
    return problems


def generate_regular(n: int, c: int, seed: int, max_restarts: int = MAX_RESTARTS) -> RegularGraph:
    """Sample a simple c-regular graph on n nodes with the pairing model.

    Stubs are shuffled and paired; any self-loop or repeated edge discards
    the whole pairing and starts over.
    """
    if (n * c) % 2:
        raise OddDegreeSum(f"n*c = {n}*{c} is odd")
    if c >= n:
        raise InfeasibleDegree(f"degree {c} must be smaller than n={n}")
    if n < 3 or c < 1:
        raise InfeasibleDegree(f"need n >= 3 and c >= 1, got n={n}, c={c}")

    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), c)
    for _ in range(max_restarts):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = sorted({(int(i), int(j)) for i, j in pairs})
        if len(edges) != len(pairs):
            continue
        return RegularGraph(n, c, tuple(edges))
    raise GenerationStalled(f"no simple {c}-regular graph on {n} nodes after {max_restarts} restarts")


def derive_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit child seed for the index-th item of an ensemble."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generate_ensemble(n: int, c: int, count: int, seed: int) -> list[RegularGraph]:
    return [generate_regular(n, c, derive_seed(seed, k)) for k in range(count)]


def count_conflicts(g: RegularGraph, colors: Sequence[int]) -> int:
    """Number of edges whose two endpoints carry the same color."""
    if len(colors) != g.n_nodes:
        raise ValueError(f"coloring has length {len(colors)}, graph has {g.n_nodes} nodes")
    return sum(1 for i, j in g.edges if colors[i] == colors[j])


def write_jsonl(graphs: Iterable[RegularGraph], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for g in graphs:
            fh.write(g.to_json() + "\n")


def read_jsonl(path: str | Path) -> list[RegularGraph]:
    graphs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                graphs.append(RegularGraph.from_json(line))
            except (GraphError, json.JSONDecodeError) as exc:
                raise GraphError(f"{path}:{lineno}: {exc}") from None
    return graphs
