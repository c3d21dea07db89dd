import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqaloc.graphs import (
    GenerationStalled,
    GraphError,
    InfeasibleDegree,
    OddDegreeSum,
    RegularGraph,
    count_conflicts,
    generate_ensemble,
    generate_regular,
    read_jsonl,
    validate,
    write_jsonl,
)

K4 = RegularGraph(4, 3, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


def test_unique_cubic_graph_on_four_nodes():
    g = generate_regular(4, 3, seed=99)
    assert g.edges == K4.edges


def test_odd_degree_sum_rejected():
    with pytest.raises(OddDegreeSum):
        generate_regular(5, 3, seed=0)


def test_degree_too_large_rejected():
    with pytest.raises(InfeasibleDegree):
        generate_regular(4, 4, seed=0)


def test_generation_stall_is_bounded():
    # a 4-regular graph on 6 nodes exists, but one restart is rarely enough
    with pytest.raises(GenerationStalled):
        for seed in range(50):
            generate_regular(6, 4, seed=seed, max_restarts=1)


def test_cycle_like_graph_degrees():
    g = generate_regular(8, 2, seed=1)
    assert validate(g) == []
    assert all(len(g.neighbors(i)) == 2 for i in range(8))


@pytest.mark.parametrize(
    "edges, fragment",
    [
        (((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), None),
        (((2, 2), (0, 1), (0, 3), (1, 2), (1, 3), (2, 3)), "self-loop"),
        (((0, 1), (0, 1), (0, 3), (1, 2), (1, 3), (2, 3)), "duplicate"),
    ],
)
def test_validate_reports(edges, fragment):
    problems = validate(RegularGraph(4, 3, edges))
    if fragment is None:
        assert problems == []
    else:
        assert any(fragment in p for p in problems)


def test_validate_degree_violation():
    g = RegularGraph(4, 2, ((0, 1), (0, 2), (0, 3), (1, 2)))
    problems = validate(g)
    assert any("node 0 has degree 3" in p for p in problems)


def test_conflicts():
    assert count_conflicts(K4, [0, 0, 1, 2]) == 1
    assert count_conflicts(K4, [0, 0, 0, 0]) == 6
    assert count_conflicts(K4, [0, 1, 2, 3]) == 0
    with pytest.raises(ValueError):
        count_conflicts(K4, [0, 1])


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([(6, 2), (6, 3), (6, 4), (8, 2), (8, 3), (8, 4), (9, 2), (9, 4), (10, 3)]),
    st.integers(0, 2**63 - 1),
)
def test_generator_properties(nc, seed):
    n, c = nc
    g = generate_regular(n, c, seed)
    assert validate(g) == []
    assert generate_regular(n, c, seed).to_json() == g.to_json()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=8, max_size=8), st.permutations(range(4)), st.integers(0, 1000))
def test_conflicts_label_invariant(colors, perm, seed):
    g = generate_regular(8, 3, seed)
    relabeled = [perm[c] for c in colors]
    k = count_conflicts(g, colors)
    assert k == count_conflicts(g, relabeled)
    assert 0 <= k <= g.n_edges


def test_jsonl_roundtrip(tmp_path):
    graphs = generate_ensemble(8, 3, 5, seed=7)
    path = tmp_path / "g.jsonl"
    write_jsonl(graphs, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    first = json.loads(lines[0])
    assert set(first) == {"n", "c", "edges"}
    assert first["edges"] == sorted(first["edges"])
    assert read_jsonl(path) == graphs


@pytest.mark.parametrize(
    "line",
    [
        '{"n": 4, "c": 3, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3]]}',
        '{"n": 4, "c": 3, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[3,2]]}',
        '{"n": 4, "c": 3, "edges": [[0,2],[0,1],[0,3],[1,2],[1,3],[2,3]]}',
        '{"n": 4, "edges": []}',
    ],
)
def test_parser_rejects_invalid(tmp_path, line):
    path = tmp_path / "bad.jsonl"
    path.write_text(line + "\n")
    with pytest.raises(GraphError):
        read_jsonl(path)


def test_ensemble_is_deterministic_and_distinct():
    a = generate_ensemble(8, 3, 10, seed=3)
    assert a == generate_ensemble(8, 3, 10, seed=3)
    assert len({g.edges for g in a}) > 1


def test_brute_force_conflict_minimum_matches_colorability():
    # K4 needs four colors: three colors always leave a conflict
    best3 = min(count_conflicts(K4, c) for c in itertools.product(range(3), repeat=4))
    best4 = min(count_conflicts(K4, c) for c in itertools.product(range(4), repeat=4))
    assert (best3, best4) == (1, 0)
