"""Effective-field statistics and pairwise concurrence of a constrained ground state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import GroundState
from .graphs import RegularGraph
from .statespace import SpinAddress, basis_digits

SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


class InvalidDensityMatrix(ValueError):
    pass


@dataclass(frozen=True)
class EffectiveFieldStats:
    s: float
    mean: float
    fluctuation: float
    second_moment: float
    delta1: float
    ratio_linear: float = math.nan
    ratio_disorder: float = math.nan


@dataclass(frozen=True)
class XFormRDM:
    """Two-spin density matrix with only the populations and the |up,dn><dn,up| coherence.

    ``x, u, v, y`` are the probabilities of up-up, up-down, down-up and
    down-down; ``z`` is the real coherence between up-down and down-up.
    """

    x: float
    u: float
    v: float
    y: float
    z: float

    def to_matrix(self) -> np.ndarray:
        rho = np.diag([self.x, self.u, self.v, self.y]).astype(complex)
        rho[1, 2] = rho[2, 1] = self.z
        return rho


def _n_nodes(dim: int, q: int) -> int:
    n = round(math.log(dim, q)) if dim > 1 else 0
    if q**n != dim:
        raise ValueError(f"vector length {dim} is not a power of q={q}")
    return n


def theoretical_estimates(c: int, q: int, J: float = 1.0) -> dict[str, float]:
    """Effective-field mean, second moment and fluctuation expected at s=1
    for a degree-c regular graph when every color is equally populated."""
    r = (q - 2) / q
    mean = -c * J * (q - 2) / (2 * q)
    second = c * J**2 / 4 * (1 + (c - 1) * r**2)
    delta1 = J / 2 * math.sqrt(c * (1 - r**2))
    return {"mean_s1": mean, "second_moment_s1": second, "delta1": delta1}


def effective_field_values(g: RegularGraph, node: int, color: int, q: int, s: float, J: float = 1.0) -> np.ndarray:
    """Eigenvalue of the effective-field operator on every basis state (it is diagonal)."""
    digits = basis_digits(g.n_nodes, q)
    field = np.zeros(len(digits))
    for j in g.neighbors(node):
        field += np.where(digits[:, j] == color, 1.0, -1.0)
    return s * (J / 2) * field


def effective_field_stats(
    gs: GroundState, g: RegularGraph, node: int = 0, color: int = 0, q: int = 4, J: float = 1.0
) -> EffectiveFieldStats:
    if not (0 <= node < g.n_nodes and 0 <= color < q):
        raise IndexError(f"probe ({node}, {color}) out of range")
    psi = gs.amplitudes
    if len(psi) != q**g.n_nodes:
        raise ValueError("ground state does not match the graph size")
    s = float(gs.s or 0.0)
    prob = psi * psi
    h = effective_field_values(g, node, color, q, s, J)
    mean = float(prob @ h)
    second = float(prob @ (h * h))
    fluct = math.sqrt(max(second - mean * mean, 0.0))
    delta1 = theoretical_estimates(g.degree, q, J)["delta1"]
    ratio_linear = fluct / (s * delta1) if s > 0 and delta1 > 0 else math.nan
    ratio_disorder = fluct / (1 - s) if s < 1 else math.nan
    return EffectiveFieldStats(s, mean, fluct, second, delta1, ratio_linear, ratio_disorder)


def two_spin_rdm(gs: GroundState, a1: SpinAddress, a2: SpinAddress, q: int) -> XFormRDM:
    """Reduced density matrix of spins ``a1`` and ``a2`` in the X form."""
    a1, a2 = SpinAddress(*a1), SpinAddress(*a2)
    if a1 == a2:
        raise ValueError("two_spin_rdm needs two distinct spins")
    psi = np.asarray(gs.amplitudes)
    n = _n_nodes(len(psi), q)
    for a in (a1, a2):
        if not (0 <= a.node < n and 0 <= a.color < q):
            raise IndexError(f"spin {a} out of range")
    tensor = psi.reshape((q,) * n) if n else psi

    if a1.node == a2.node:
        # node i is axis n-1-i (node 0 is the fastest-varying digit)
        axis = n - 1 - a1.node
        pa = np.take(tensor, a1.color, axis=axis)
        pb = np.take(tensor, a2.color, axis=axis)
        u = float(np.sum(pa * pa))
        v = float(np.sum(pb * pb))
        z = float(np.sum(pa * pb))
        return XFormRDM(0.0, u, v, max(1.0 - u - v, 0.0), z)

    digits = basis_digits(n, q)
    up1 = digits[:, a1.node] == a1.color
    up2 = digits[:, a2.node] == a2.color
    prob = psi * psi
    x = float(prob[up1 & up2].sum())
    u = float(prob[up1 & ~up2].sum())
    v = float(prob[~up1 & up2].sum())
    y = float(prob[~up1 & ~up2].sum())
    # Exchanging the two spins would leave one node with no up-spin and the
    # other with two, so no pair of constrained basis states connects them.
    return XFormRDM(x, u, v, y, 0.0)


def concurrence(rdm: XFormRDM) -> float:
    return 2.0 * max(abs(rdm.z) - math.sqrt(max(rdm.x * rdm.y, 0.0)), 0.0)


def concurrence_general(rho: np.ndarray, atol: float = 1e-10) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidDensityMatrix(f"expected a 4x4 matrix, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise InvalidDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > atol:
        raise InvalidDensityMatrix(f"trace is {np.trace(rho).real}, not 1")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise InvalidDensityMatrix("matrix is not positive semidefinite")
    rho_tilde = SIGMA_YY @ rho.conj() @ SIGMA_YY
    lam = np.sort(np.clip(np.linalg.eigvals(rho @ rho_tilde).real, 0, None))[::-1]
    root = np.sqrt(lam)
    return float(max(root[0] - root[1] - root[2] - root[3], 0.0))


def pair_concurrences(gs: GroundState, node: int, q: int) -> np.ndarray:
    """Concurrence of each cyclically adjacent color pair (a, a+1 mod q) in one chain."""
    return np.array(
        [concurrence(two_spin_rdm(gs, (node, a), (node, (a + 1) % q), q)) for a in range(q)]
    )


def intra_chain_concurrence(gs: GroundState, node: int, q: int) -> float:
    return 0.5 * float(pair_concurrences(gs, node, q).sum())
