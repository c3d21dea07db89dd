"""One particle on a periodic tight-binding ring with random on-site potentials.

The ring mimics a single node's color chain with the neighbouring chains
frozen into a static field. Its Hamiltonian in the one-particle sector is

    -2(1-s)J * (hopping between a and a+1 mod q) + 2sJ * diag(h)

and ``chain_concurrence`` is the ring analogue of the intra-chain concurrence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .observables import theoretical_estimates
from .stats import binned, grouped


@dataclass(frozen=True)
class UniformDisorder:
    mu: float
    half_width: float

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("half_width must be non-negative")

    @classmethod
    def matched(cls, c: int, q: int, J: float = 1.0) -> "UniformDisorder":
        """Uniform potential with the mean and spread of the s=1 effective field."""
        est = theoretical_estimates(c, q, J)
        return cls(mu=-c * (0.5 - 1.0 / q) * J, half_width=math.sqrt(3) * est["delta1"])


@dataclass(frozen=True)
class DiscreteDisorder:
    """h = (1/2) * sum of c independent spins, each +1 with probability 1/q."""

    c: int
    q: int

    def __post_init__(self):
        if self.c < 1 or self.q < 2:
            raise ValueError("need c >= 1 and q >= 2")


DisorderSpec = UniformDisorder | DiscreteDisorder


@dataclass
class ChainInstance:
    potentials: np.ndarray
    s: float
    J: float = 1.0

    @property
    def q(self) -> int:
        return len(self.potentials)


def make_disorder(kind: str, c: int, q: int, J: float = 1.0) -> DisorderSpec:
    if kind == "uniform":
        return UniformDisorder.matched(c, q, J)
    if kind == "discrete":
        return DiscreteDisorder(c, q)
    raise ValueError(f"unknown disorder kind {kind!r}")


def s_for_ratio(x: float, c: int, q: int, J: float = 1.0) -> float:
    """The s at which delta1 * s / (1 - s) equals ``x``."""
    if x < 0:
        raise ValueError("ratio must be non-negative")
    d1 = theoretical_estimates(c, q, J)["delta1"]
    return x / (d1 + x)


def sample_potential(spec: DisorderSpec, q: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, UniformDisorder):
        return rng.uniform(spec.mu - spec.half_width, spec.mu + spec.half_width, size=q)
    if isinstance(spec, DiscreteDisorder):
        ups = rng.random((q, spec.c)) < 1.0 / spec.q
        return 0.5 * np.where(ups, 1.0, -1.0).sum(axis=1)
    raise TypeError(f"unsupported disorder spec {spec!r}")


def ring_adjacency(q: int) -> np.ndarray:
    adj = np.zeros((q, q))
    for a in range(q):
        b = (a + 1) % q
        if a != b:
            adj[a, b] = adj[b, a] = 1.0
    return adj


def chain_matrix(inst: ChainInstance) -> np.ndarray:
    s, J = inst.s, inst.J
    return -2 * (1 - s) * J * ring_adjacency(inst.q) + np.diag(2 * s * J * np.asarray(inst.potentials))


def _positive(psi: np.ndarray) -> np.ndarray:
    return psi if psi.sum() >= 0 else -psi


def chain_ground_state(inst: ChainInstance) -> np.ndarray:
    if inst.q < 2:
        raise ValueError("a ring needs at least two sites")
    _, vecs = np.linalg.eigh(chain_matrix(inst))
    return _positive(vecs[:, 0])


def chain_concurrence(psi: np.ndarray) -> float:
    """(1/2) * sum_a 2|psi_a||psi_{a+1}| over ring bonds, equal to 1 for a uniform state."""
    a = np.abs(np.asarray(psi))
    return float(np.sum(a * np.roll(a, -1)))


def _batched_ground_states(h: np.ndarray, s_grid: np.ndarray, J: float) -> np.ndarray:
    q = len(h)
    mats = (
        -2 * (1 - s_grid)[:, None, None] * J * ring_adjacency(q)
        + 2 * s_grid[:, None, None] * J * np.eye(q) * h[None, None, :]
    )
    _, vecs = np.linalg.eigh(mats)
    return vecs[:, :, 0]


@dataclass
class ChainRecord:
    sample_id: int
    s: float
    delta_eff_empirical: float
    c_ds: float


def chain_ensemble(
    spec: DisorderSpec,
    q: int,
    s_grid: Sequence[float],
    n_samples: int,
    master_seed: int,
    J: float = 1.0,
) -> list[ChainRecord]:
    """Ground-state concurrence of ``n_samples`` disordered rings along ``s_grid``.

    Each sample draws one potential set from its own stream
    ``default_rng([master_seed, sample_id])`` and keeps it for every s.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    s_arr = np.asarray(s_grid, dtype=float)
    records = []
    for k in range(n_samples):
        rng = np.random.default_rng([master_seed, k])
        h = sample_potential(spec, q, rng)
        spread = float(np.std(h))
        vecs = _batched_ground_states(h, s_arr, J)
        for s, psi in zip(s_arr, vecs):
            records.append(ChainRecord(k, float(s), float(s) * spread, chain_concurrence(psi)))
    return records


def chain_aggregate(records: Sequence[ChainRecord], group: str = "by_s") -> list[dict]:
    """Mean and std of C^ds per s, or per log-space bin of delta_eff/(1-s)."""
    if not records:
        raise ValueError("no records to aggregate")
    cols = {
        "c_ds": [r.c_ds for r in records],
        "delta_eff": [r.delta_eff_empirical for r in records],
    }
    if group == "by_s":
        return grouped([r.s for r in records], cols)
    if group == "by_ratio_bins":
        ratio = [r.delta_eff_empirical / (1 - r.s) if r.s < 1 else math.nan for r in records]
        return binned(ratio, cols)
    raise ValueError(f"unknown grouping {group!r}")
