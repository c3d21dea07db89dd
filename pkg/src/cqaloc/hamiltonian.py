"""Problem diagonal, driver matrix and H(s) = s*Hp + (1-s)*Hd in the constrained basis."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .graphs import RegularGraph
from .statespace import basis_digits, encode_rows

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class DriverTopology:
    kind: Literal["nn", "fc"]
    q: int

    def __post_init__(self):
        if self.kind not in ("nn", "fc"):
            raise ValueError(f"driver kind must be 'nn' or 'fc', got {self.kind!r}")
        if self.q < 2:
            raise ValueError("need at least two colors")

    def pairs(self) -> list[tuple[int, int]]:
        """Distinct unordered color pairs (a, b), a < b, coupled by the driver."""
        if self.kind == "fc":
            return [(a, b) for a in range(self.q) for b in range(a + 1, self.q)]
        # periodic ring; for q=2 both bonds are the same coupling
        return sorted({tuple(sorted((a, (a + 1) % self.q))) for a in range(self.q)})


def problem_diagonal(g: RegularGraph, q: int, J: float = 1.0) -> np.ndarray:
    """Diagonal of J * sum_{(ij) in E} sum_a sz_{i,a} sz_{j,a} over all q**N basis states.

    A monochromatic edge contributes q (all q products are +1); any other edge
    contributes q - 4 (two products flip sign).
    """
    digits = basis_digits(g.n_nodes, q)
    diag = np.zeros(len(digits))
    for i, j in g.edges:
        same = digits[:, i] == digits[:, j]
        diag += np.where(same, q, q - 4)
    return J * diag


def driver_matrix(n: int, topo: DriverTopology, J: float = 1.0) -> sp.csr_matrix:
    """Sparse -J * sum_i sum_(a,b) (sx sx + sy sy); every hop has amplitude -2J."""
    q = topo.q
    digits = basis_digits(n, q)
    dim = q**n
    rows, cols = [], []
    idx = np.arange(dim, dtype=np.int64)
    for i in range(n):
        place = q**i
        for a, b in topo.pairs():
            src = idx[digits[:, i] == a]
            dst = src + (b - a) * place
            rows += [src, dst]
            cols += [dst, src]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.full(len(rows), -2.0 * J)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))
    mat.sort_indices()
    return mat


@dataclass
class HamiltonianParts:
    """Factored H(s): the problem diagonal and the s-independent driver."""

    problem_diagonal: np.ndarray
    driver: sp.csr_matrix
    J: float
    n_nodes: int
    q: int

    @property
    def dim(self) -> int:
        return len(self.problem_diagonal)

    def apply_total(self, s: float, v: np.ndarray) -> np.ndarray:
        return apply_total(self, s, v)

    def matvec(self, s: float):
        return lambda v: apply_total(self, s, v)

    def expand(self, v: np.ndarray) -> np.ndarray:
        return v


def build_parts(g: RegularGraph, q: int, kind: str = "nn", J: float = 1.0) -> HamiltonianParts:
    return HamiltonianParts(
        problem_diagonal=problem_diagonal(g, q, J),
        driver=_cached_driver(g.n_nodes, kind, q, J),
        J=J,
        n_nodes=g.n_nodes,
        q=q,
    )


@lru_cache(maxsize=4)
def _cached_driver(n: int, kind: str, q: int, J: float) -> sp.csr_matrix:
    return driver_matrix(n, DriverTopology(kind, q), J)


def apply_total(parts, s: float, v: np.ndarray) -> np.ndarray:
    if v.shape != (parts.dim,):
        raise ValueError(f"vector has shape {v.shape}, expected ({parts.dim},)")
    return s * (parts.problem_diagonal * v) + (1.0 - s) * (parts.driver @ v)


def dense_total(parts, s: float) -> np.ndarray:
    if parts.dim > DENSE_LIMIT:
        raise ValueError(f"dimension {parts.dim} exceeds dense limit {DENSE_LIMIT}")
    return s * np.diag(parts.problem_diagonal) + (1.0 - s) * parts.driver.toarray()


class ColorShiftSector:
    """H(s) restricted to states invariant under the global color shift a -> a+1 mod q.

    Shifting every node's color commutes with both the problem term and either
    driver topology. For s < 1 the ground state is unique with positive
    amplitudes, so it lies in this sector; working there shrinks the
    dimension by a factor q. Sector states are indexed by the colorings with
    node 0 at color 0 and expand to full vectors as ``phi[orbit(b)] / sqrt(q)``.
    """

    def __init__(self, parts: HamiltonianParts, kind: str = "nn"):
        n, q = parts.n_nodes, parts.q
        self.n_nodes, self.q, self.J = n, q, parts.J
        self.orbit = _orbit_index(n, q)
        reps = np.arange(0, q**n, q, dtype=np.int64)
        self.problem_diagonal = parts.problem_diagonal[reps]
        self.driver = _cached_sector_driver(n, kind, q, parts.J)

    @property
    def dim(self) -> int:
        return len(self.problem_diagonal)

    def apply_total(self, s: float, v: np.ndarray) -> np.ndarray:
        return apply_total(self, s, v)

    def matvec(self, s: float):
        return lambda v: apply_total(self, s, v)

    def expand(self, phi: np.ndarray) -> np.ndarray:
        return phi[self.orbit] / np.sqrt(self.q)

    def restrict(self, psi: np.ndarray) -> np.ndarray:
        """Project a full vector onto the sector (orbit sums scaled to preserve the norm)."""
        out = np.zeros(self.dim)
        np.add.at(out, self.orbit, psi)
        return out / np.sqrt(self.q)


@lru_cache(maxsize=4)
def _orbit_index(n: int, q: int) -> np.ndarray:
    digits = basis_digits(n, q)
    canon = (digits - digits[:, :1]) % q
    orbit = encode_rows(canon, q) // q
    orbit.setflags(write=False)
    return orbit


@lru_cache(maxsize=4)
def _cached_sector_driver(n: int, kind: str, q: int, J: float) -> sp.csr_matrix:
    topo = DriverTopology(kind, q)
    digits = basis_digits(n, q)[::q]
    m = len(digits)
    rows, cols = [], []
    own = np.arange(m, dtype=np.int64)
    for i in range(n):
        for a, b in topo.pairs():
            for src_c, dst_c in ((a, b), (b, a)):
                sel = digits[:, i] == src_c
                hopped = digits[sel].astype(np.int64)
                hopped[:, i] = dst_c
                canon = (hopped - hopped[:, :1]) % q
                rows.append(own[sel])
                cols.append(encode_rows(canon, q) // q)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    mat = sp.csr_matrix((np.full(len(rows), -2.0 * J), (rows, cols)), shape=(m, m))
    mat.sum_duplicates()
    mat.sort_indices()
    return mat
