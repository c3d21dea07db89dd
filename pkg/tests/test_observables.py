import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqaloc.eigensolver import GroundState, SolverConfig, dense_ground_state, ground_state
from cqaloc.graphs import RegularGraph, generate_regular
from cqaloc.hamiltonian import build_parts, dense_total
from cqaloc.observables import (
    InvalidDensityMatrix,
    XFormRDM,
    concurrence,
    concurrence_general,
    effective_field_stats,
    intra_chain_concurrence,
    pair_concurrences,
    theoretical_estimates,
    two_spin_rdm,
)
from cqaloc.statespace import basis_digits

from oracles import two_qubit_rdm, wootters

SINGLE = RegularGraph(1, 0, ())


def _gs(g, q, kind, s):
    parts = build_parts(g, q, kind)
    return ground_state(parts.matvec(s), parts.dim, SolverConfig(), s=s)


def _enumerated_estimates(c, q, J):
    # neighbours' colors independent and uniform over q
    vals, weights = [], []
    for colors in itertools.product(range(q), repeat=c):
        vals.append(J / 2 * sum(1 if k == 0 else -1 for k in colors))
        weights.append(q**-c)
    vals, weights = np.array(vals), np.array(weights)
    mean = weights @ vals
    second = weights @ vals**2
    return mean, second, math.sqrt(second - mean**2)


@pytest.mark.parametrize("c, q, J", [(3, 4, 1.0), (2, 4, 1.0), (4, 5, 0.5), (2, 3, 2.0), (4, 2, 1.0)])
def test_theoretical_estimates_by_enumeration(c, q, J):
    est = theoretical_estimates(c, q, J)
    mean, second, delta = _enumerated_estimates(c, q, J)
    assert est["mean_s1"] == pytest.approx(mean, abs=1e-12)
    assert est["second_moment_s1"] == pytest.approx(second, abs=1e-12)
    assert est["delta1"] == pytest.approx(delta, abs=1e-12)


def test_theoretical_estimate_values():
    est = theoretical_estimates(3, 4, 1)
    assert (est["mean_s1"], est["second_moment_s1"], est["delta1"]) == pytest.approx((-0.75, 1.125, 0.75))
    est = theoretical_estimates(2, 4, 1)
    assert est["mean_s1"] == pytest.approx(-0.5)
    assert est["delta1"] == pytest.approx(0.6124, abs=1e-4)
    est = theoretical_estimates(5, 2, 3.0)
    assert (est["mean_s1"], est["second_moment_s1"], est["delta1"]) == pytest.approx((0, 5 * 9 / 4, 1.5 * math.sqrt(5)))


def test_effective_field_at_zero():
    g = generate_regular(6, 3, seed=0)
    eff = effective_field_stats(_gs(g, 4, "nn", 0.0), g, 0, 0, 4)
    assert eff.mean == 0 and eff.fluctuation == 0
    assert math.isnan(eff.ratio_linear)
    assert eff.ratio_disorder == 0


def test_effective_field_small_s_limit():
    for c in (2, 3, 4):
        g = generate_regular(6, c, seed=c)
        eff = effective_field_stats(_gs(g, 4, "nn", 0.01), g, 0, 0, 4)
        assert abs(eff.ratio_linear - 1) < 0.05


def test_effective_field_mean_symmetric_state():
    g = generate_regular(6, 3, seed=21)
    eff = effective_field_stats(_gs(g, 4, "nn", 0.5), g, 0, 0, 4)
    assert eff.mean == pytest.approx(-0.375, abs=1e-8)
    assert eff.ratio_disorder == pytest.approx(eff.fluctuation / 0.5)
    assert eff.ratio_linear == pytest.approx(eff.fluctuation / (0.5 * 0.75))


def test_fluctuation_against_pair_moments():
    g = generate_regular(6, 4, seed=5)
    q, s, J = 4, 0.7, 1.3
    parts = build_parts(g, q, "fc", J)
    gs = ground_state(parts.matvec(s), parts.dim, SolverConfig(), s=s)
    eff = effective_field_stats(gs, g, 2, 1, q, J)
    prob = gs.amplitudes**2
    digits = basis_digits(6, q)
    sz = {j: np.where(digits[:, j] == 1, 1.0, -1.0) for j in g.neighbors(2)}
    mean = s * J / 2 * sum(prob @ sz[j] for j in sz)
    second = (s * J / 2) ** 2 * sum(prob @ (sz[j] * sz[k]) for j in sz for k in sz)
    assert eff.mean == pytest.approx(mean, abs=1e-12)
    assert eff.second_moment == pytest.approx(second, abs=1e-12)
    assert abs(eff.fluctuation**2 - (second - mean**2)) < 1e-12


def test_probe_range():
    g = generate_regular(4, 3, seed=0)
    gs = _gs(g, 3, "nn", 0.3)
    with pytest.raises(IndexError):
        effective_field_stats(gs, g, 4, 0, 3)
    with pytest.raises(IndexError):
        effective_field_stats(gs, g, 0, 3, 3)


def test_rdm_uniform_chain():
    g = generate_regular(4, 2, seed=0)
    rdm = two_spin_rdm(_gs(g, 4, "nn", 0.0), (1, 2), (1, 3), 4)
    assert (rdm.x, rdm.u, rdm.v, rdm.y, rdm.z) == pytest.approx((0, 0.25, 0.25, 0.5, 0.25))
    assert concurrence(rdm) == pytest.approx(0.5)


def test_rdm_rejects_same_spin():
    gs = _gs(SINGLE, 4, "nn", 0.0)
    with pytest.raises(ValueError):
        two_spin_rdm(gs, (0, 1), (0, 1), 4)


def _random_state(dim, rng):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("n, q", [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)])
def test_rdm_against_partial_trace(n, q):
    rng = np.random.default_rng(n * 10 + q)
    g = generate_regular(3, 2, seed=0) if n == 3 else RegularGraph(2, 1, ((0, 1),))
    states = [_random_state(q**n, rng), _gs(g, q, "nn", 0.6).amplitudes]
    spins = [(i, a) for i in range(n) for a in range(q)]
    for psi in states:
        gs = GroundState(0.6, 0.0, psi, 0.0)
        for s1, s2 in itertools.combinations(spins, 2):
            rdm = two_spin_rdm(gs, s1, s2, q)
            ref = two_qubit_rdm(psi, n, q, s1, s2)
            np.testing.assert_allclose(rdm.to_matrix(), ref, atol=1e-12)
            assert rdm.x + rdm.u + rdm.v + rdm.y == pytest.approx(1, abs=1e-12)
            assert abs(rdm.z) <= math.sqrt(rdm.u * rdm.v) + 1e-12
            c = concurrence(rdm)
            assert abs(c - concurrence_general(ref)) < 1e-8
            assert abs(c - wootters(ref)) < 1e-8
            if s1[0] != s2[0]:
                assert rdm.z == 0 and c == 0 and wootters(ref) < 1e-12


def test_concurrence_examples():
    assert concurrence(XFormRDM(0, 0.5, 0.5, 0, 0.5)) == 1
    assert concurrence(XFormRDM(0.1, 0.4, 0.3, 0.2, 0.0)) == 0
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    assert concurrence_general(bell) == pytest.approx(1)
    prod = np.kron([[1, 0], [0, 0]], [[0.5, 0.5], [0.5, 0.5]])
    assert concurrence_general(prod) == pytest.approx(0, abs=1e-8)


@pytest.mark.parametrize(
    "rho",
    [np.eye(4), np.diag([0.5, 0.5, 0.5, -0.5]), np.triu(np.full((4, 4), 0.25)) + np.eye(4) * 0.0, np.eye(3) / 3],
)
def test_concurrence_general_rejects(rho):
    with pytest.raises(InvalidDensityMatrix):
        concurrence_general(rho)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=4, max_size=4), st.floats(-1, 1))
def test_dual_route_random_x_states(w, t):
    x, u, v, y = np.array(w) / sum(w)
    rdm = XFormRDM(x, u, v, y, t * math.sqrt(u * v))
    assert abs(concurrence(rdm) - concurrence_general(rdm.to_matrix())) < 1e-8


@pytest.mark.parametrize("kind", ["nn", "fc"])
def test_intra_chain_at_zero(kind):
    g = generate_regular(6, 3, seed=3)
    gs = _gs(g, 4, kind, 0.0)
    np.testing.assert_allclose(pair_concurrences(gs, 0, 4), 0.5, atol=1e-10)
    assert intra_chain_concurrence(gs, 0, 4) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("s", [0.0, 0.4, 0.9, 0.99])
def test_isolated_chain_stays_uniform(s):
    parts = build_parts(SINGLE, 4, "nn")
    gs = dense_ground_state(dense_total(parts, s), s=s)
    assert intra_chain_concurrence(gs, 0, 4) == pytest.approx(1, abs=1e-12)


def test_localized_chain():
    psi = np.zeros(16)
    psi[1 + 4 * 2] = 1.0  # node0 color1, node1 color2
    gs = GroundState(1.0, 0.0, psi, 0.0)
    assert intra_chain_concurrence(gs, 0, 4) == 0
    assert intra_chain_concurrence(gs, 1, 4) == 0


@pytest.mark.parametrize("kind", ["nn", "fc"])
def test_intra_chain_bounded_along_sweep(kind):
    g = generate_regular(5, 2, seed=8)
    for s in np.linspace(0, 0.99, 12):
        c = intra_chain_concurrence(_gs(g, 3, kind, s), 0, 3)
        assert -1e-12 <= c <= 1 + 1e-9
