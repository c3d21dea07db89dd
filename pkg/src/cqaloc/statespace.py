"""Constrained basis: one up-spin (one color) per node.

A basis state is the integer ``sum_i color[i] * q**i`` (node 0 is the least
significant digit), so the subspace has exactly ``q**N`` states.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np


class SpinAddress(NamedTuple):
    node: int
    color: int


def encode(colors: Sequence[int], q: int) -> int:
    b = 0
    for i in reversed(range(len(colors))):
        c = int(colors[i])
        if not 0 <= c < q:
            raise ValueError(f"color {c} at node {i} outside [0, {q})")
        b = b * q + c
    return b


def decode(b: int, n: int, q: int) -> list[int]:
    if not 0 <= b < q**n:
        raise ValueError(f"index {b} outside [0, {q}**{n})")
    out = []
    for _ in range(n):
        b, c = divmod(b, q)
        out.append(c)
    return out


def sigma_z(b: int, spin: SpinAddress, q: int) -> int:
    return 1 if (b // q**spin.node) % q == spin.color else -1


def hop(b: int, node: int, from_color: int, to_color: int, q: int) -> int | None:
    """Move node's up-spin from ``from_color`` to ``to_color``; None if it is not there."""
    if from_color == to_color:
        raise ValueError("hop needs two distinct colors")
    place = q**node
    if (b // place) % q != from_color:
        return None
    return b + (to_color - from_color) * place


@lru_cache(maxsize=16)
def basis_digits(n: int, q: int) -> np.ndarray:
    """Colors of every basis state, shape ``(q**n, n)``; row b decodes index b."""
    idx = np.arange(q**n, dtype=np.int64)
    digits = np.empty((q**n, n), dtype=np.int8)
    for i in range(n):
        idx, digits[:, i] = np.divmod(idx, q)
    digits.setflags(write=False)
    return digits


def encode_rows(digits: np.ndarray, q: int) -> np.ndarray:
    weights = q ** np.arange(digits.shape[1], dtype=np.int64)
    return digits.astype(np.int64) @ weights
