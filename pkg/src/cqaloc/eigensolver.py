"""Lanczos ground-state solver with full reorthogonalization, plus a dense oracle."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

DENSE_LIMIT = 4096

Matvec = Callable[[np.ndarray], np.ndarray]


class NotConverged(RuntimeError):
    def __init__(self, max_iterations: int, best_residual: float):
        super().__init__(
            f"Lanczos did not reach the residual tolerance in {max_iterations} iterations "
            f"(best residual {best_residual:.3e})"
        )
        self.max_iterations = max_iterations
        self.best_residual = best_residual


class NonFiniteEncountered(FloatingPointError):
    pass


@dataclass
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 500
    reorthogonalization: str = "full"
    seed: int = 0
    warm_start: np.ndarray | None = field(default=None, repr=False)
    krylov_dim: int = 80

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.reorthogonalization not in ("full", "none"):
            raise ValueError("reorthogonalization must be 'full' or 'none'")
        if self.krylov_dim < 2:
            raise ValueError("krylov_dim must be at least 2")


@dataclass
class GroundState:
    s: float | None
    energy: float
    amplitudes: np.ndarray = field(repr=False)
    residual: float
    iterations: int = 0


def _fix_sign(x: np.ndarray) -> np.ndarray:
    total = x.sum()
    if abs(total) > 1e-12 * np.sqrt(len(x)):
        return x if total > 0 else -x
    k = np.flatnonzero(np.abs(x) > 1e-14)
    return x if len(k) == 0 or x[k[0]] > 0 else -x


def _orthogonalize(w: np.ndarray, basis: np.ndarray) -> None:
    # classical Gram-Schmidt, repeated once when the first pass cancels heavily
    if len(basis):
        before = np.linalg.norm(w)
        w -= basis.T @ (basis @ w)
        if np.linalg.norm(w) < 0.7071 * before:
            w -= basis.T @ (basis @ w)


def _start_vector(dim: int, cfg: SolverConfig, locked: np.ndarray) -> np.ndarray:
    if cfg.warm_start is not None:
        x = np.array(cfg.warm_start, dtype=float)
        if x.shape != (dim,):
            raise ValueError(f"warm start has shape {x.shape}, expected ({dim},)")
    else:
        x = np.random.default_rng(cfg.seed).standard_normal(dim)
    _orthogonalize(x, locked)
    nrm = np.linalg.norm(x)
    if not np.isfinite(nrm):
        raise NonFiniteEncountered("start vector is not finite")
    if nrm < 1e-12:
        x = np.random.default_rng(cfg.seed).standard_normal(dim)
        _orthogonalize(x, locked)
        nrm = np.linalg.norm(x)
    return x / nrm


def _lowest_pair(
    matvec: Matvec, dim: int, cfg: SolverConfig, locked: np.ndarray
) -> tuple[float, np.ndarray, float, int]:
    """Restarted Lanczos for the lowest eigenpair in the complement of ``locked``."""
    full = cfg.reorthogonalization == "full"
    room = dim - len(locked)
    x = _start_vector(dim, cfg, locked)
    used = 0
    best = np.inf
    while True:
        m = max(1, min(cfg.krylov_dim, room, cfg.max_iterations - used))
        V = np.empty((m, dim))
        alpha, beta = [], []
        V[0] = x
        k = 0
        while True:
            w = matvec(V[k])
            used += 1
            if not np.all(np.isfinite(w)):
                raise NonFiniteEncountered("operator produced non-finite values")
            a = float(V[k] @ w)
            w -= a * V[k]
            if k > 0:
                w -= beta[k - 1] * V[k - 1]
            if full:
                _orthogonalize(w, V[: k + 1])
            _orthogonalize(w, locked)
            b = float(np.linalg.norm(w))
            alpha.append(a)
            if k == 0:
                theta, y = np.array([a]), np.ones((1, 1))
            else:
                theta, y = eigh_tridiagonal(
                    np.array(alpha), np.array(beta), select="i", select_range=(0, 0)
                )
            estimate = b * abs(y[-1, 0])
            k += 1
            breakdown = b < 1e-13 * max(1.0, abs(a))
            if estimate <= 0.1 * cfg.tolerance or breakdown or k == m:
                break
            beta.append(b)
            V[k] = w / b

        x = V[:k].T @ y[:, 0]
        _orthogonalize(x, locked)
        x /= np.linalg.norm(x)
        hx = matvec(x)
        energy = float(x @ hx)
        residual = float(np.linalg.norm(hx - energy * x))
        best = min(best, residual)
        if residual <= cfg.tolerance:
            return energy, _fix_sign(x), residual, used
        if used >= cfg.max_iterations:
            raise NotConverged(cfg.max_iterations, best)
        if breakdown:
            # invariant subspace without the requested accuracy; perturb and restart
            rng = np.random.default_rng(cfg.seed + used)
            x = x + 1e-6 * rng.standard_normal(dim)
            _orthogonalize(x, locked)
            x /= np.linalg.norm(x)


def ground_state(
    matvec: Matvec, dim: int, cfg: SolverConfig | None = None, s: float | None = None
) -> GroundState:
    """Lowest eigenpair of a symmetric operator given only its action on vectors.

    The Krylov basis is fully reorthogonalized and restarted from the current
    Ritz vector every ``cfg.krylov_dim`` steps. Convergence is declared on
    the true residual ``||H x - E x||``, never on the Ritz estimate alone.
    """
    cfg = cfg or SolverConfig()
    if dim < 1:
        raise ValueError("dimension must be positive")
    energy, x, residual, used = _lowest_pair(matvec, dim, cfg, np.empty((0, dim)))
    return GroundState(s, energy, x, residual, used)


def low_spectrum(
    matvec: Matvec, dim: int, k: int, cfg: SolverConfig | None = None
) -> np.ndarray:
    """The k lowest eigenvalues, found one at a time with the converged vectors locked out.

    Locking (rather than reading several Ritz values from one Krylov space)
    recovers degenerate levels, which a single starting vector cannot see.
    """
    cfg = cfg or SolverConfig()
    if not 1 <= k <= min(8, dim):
        raise ValueError(f"k must be in [1, min(8, dim)], got {k}")
    locked = np.empty((0, dim))
    values = []
    for level in range(k):
        sub = replace(cfg, seed=cfg.seed + level, warm_start=cfg.warm_start if level == 0 else None)
        energy, x, _, _ = _lowest_pair(matvec, dim, sub, locked)
        values.append(energy)
        locked = np.vstack([locked, x])
    return np.sort(np.array(values))


def dense_ground_state(matrix: np.ndarray, s: float | None = None) -> GroundState:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    if matrix.shape[0] > DENSE_LIMIT:
        raise ValueError(f"dimension {matrix.shape[0]} exceeds dense limit {DENSE_LIMIT}")
    w, v = eigh(matrix, subset_by_index=[0, 0])
    x = _fix_sign(v[:, 0].copy())
    residual = float(np.linalg.norm(matrix @ x - w[0] * x))
    return GroundState(s, float(w[0]), x, residual, 0)


def is_symmetric(matvec: Matvec, dim: int, seed: int = 0, trials: int = 3) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        u, v = rng.standard_normal(dim), rng.standard_normal(dim)
        lhs, rhs = u @ matvec(v), matvec(u) @ v
        if abs(lhs - rhs) > 1e-9 * (1 + abs(lhs)):
            return False
    return True


def sweep_bound(diag_max: float, J: float, row_degree: int, ds: float) -> float:
    """Upper bound on |E(s+ds) - E(s)| from ||H(s+ds) - H(s)|| <= ds*(||diag||_inf + 2J*rowdeg)."""
    return abs(ds) * (abs(diag_max) + 2.0 * abs(J) * row_degree)

