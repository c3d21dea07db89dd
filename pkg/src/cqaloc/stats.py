"""Grouped mean / population std and log-space binning shared by the sweeps."""
from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

BINS_PER_DECADE = 20


def log_bin_index(x: float, per_decade: int = BINS_PER_DECADE) -> int | None:
    if not (x > 0 and math.isfinite(x)):
        return None
    return math.floor(math.log10(x) * per_decade)


def log_bin_center(k: int, per_decade: int = BINS_PER_DECADE) -> float:
    return 10 ** ((k + 0.5) / per_decade)


def grouped(keys: Sequence, columns: dict[str, Sequence[float]]) -> list[dict]:
    """Mean and population std of every column within each key, keys ascending.

    Rows with a None key are dropped. For each column ``col`` the output has
    ``mean_col`` and ``std_col``; ``n`` is the group size.
    """
    buckets: dict = defaultdict(list)
    for row, k in enumerate(keys):
        if k is not None:
            buckets[k].append(row)
    out = []
    for k in sorted(buckets):
        rows = buckets[k]
        entry = {"key": k, "n": len(rows)}
        for name, values in columns.items():
            vals = np.asarray([values[r] for r in rows], dtype=float)
            entry[f"mean_{name}"] = float(vals.mean())
            entry[f"std_{name}"] = float(vals.std())
        out.append(entry)
    return out


def binned(xs: Iterable[float], columns: dict[str, Sequence[float]], per_decade: int = BINS_PER_DECADE) -> list[dict]:
    keys = [log_bin_index(x, per_decade) for x in xs]
    out = grouped(keys, columns)
    for entry in out:
        entry["bin"] = entry["key"]
        entry["key"] = log_bin_center(entry["bin"], per_decade)
    return out


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log10(y) against log10(x)."""
    lx, ly = np.log10(np.asarray(x, dtype=float)), np.log10(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
