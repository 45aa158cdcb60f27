import random

import pytest

from tpcollapse.coxeter import bruhat_interval, build_system, longest_element
from tpcollapse.posets import GradedPoset, boolean_algebra, check_cw_conditions, closure_poset, export_dot, mobius

from oracles import mobius_by_zeta


def non_example():
    """Five vertices, six edges, one 2-cell glued along e31 e12 e23 e34 e45 e53."""
    edges = {"e12": ["v1", "v2"], "e23": ["v2", "v3"], "e13": ["v1", "v3"],
             "e34": ["v3", "v4"], "e45": ["v4", "v5"], "e35": ["v3", "v5"]}
    cells = {f"v{k}": [] for k in range(1, 6)} | edges | {"sigma": list(edges)}
    dims = {c: 0 if c.startswith("v") else 1 if c.startswith("e") else 2 for c in cells}
    return closure_poset(cells, dims)


def chain(n):
    return GradedPoset([str(k) for k in range(n)], list(range(n)), [(k, k + 1) for k in range(n - 1)])


def test_mobius_examples():
    p = chain(3)
    assert mobius(p, 1, 1) == 1
    assert mobius(p, 0, 2) == 0
    a2 = build_system("A2")
    q = bruhat_interval(a2.identity, longest_element(a2))
    assert mobius(q, q.index("e"), q.index("s1s2s1")) == -1
    with pytest.raises(ValueError):
        mobius(q, q.index("s1"), q.index("s2"))


def _random_poset(rng, n):
    rank = sorted(rng.randint(0, 4) for _ in range(n))
    covers = [(a, b) for a in range(n) for b in range(n) if rank[b] == rank[a] + 1 and rng.random() < 0.4]
    return GradedPoset([str(k) for k in range(n)], rank, covers)


def test_mobius_matches_zeta_inversion():
    rng = random.Random(7)
    a3 = build_system("A3")
    posets = [_random_poset(rng, rng.randint(2, 20)) for _ in range(30)]
    posets += [boolean_algebra(5), bruhat_interval(a3.identity, longest_element(a3)), non_example()]
    for p in posets:
        assert len(p) <= 64
        zeta = [[p.leq(a, b) for b in p.elements] for a in p.elements]
        mu = mobius_by_zeta(zeta)
        for a, b in p.comparable_pairs():
            assert mobius(p, a, b) == mu[a][b]


def test_boolean_algebra_passes():
    p = boolean_algebra(3)
    assert len(p) == 8
    assert all(r.passed for r in check_cw_conditions(p))


def test_non_example_fails_thinness_at_v3_sigma():
    graded, thin, eulerian, connected = check_cw_conditions(non_example())
    assert graded.passed and connected.passed
    assert not thin.passed and not eulerian.passed
    assert [(u, v) for u, v, _ in thin.counterexamples] == [("v3", "sigma")]
    assert thin.counterexamples[0][2] == "6 elements"
    assert thin.as_dict()["pass"] is False


@pytest.mark.parametrize("name", ["A3", "B3"])
def test_bruhat_intervals_are_cw_posets(name):
    sys = build_system(name)
    top = longest_element(sys)
    reports = check_cw_conditions(bruhat_interval(sys.identity, top))
    assert [r.name for r in reports] == ["graded", "thin", "eulerian", "connected"]
    assert all(r.passed for r in reports)


def test_eulerian_implies_thin():
    rng = random.Random(11)
    for _ in range(60):
        p = _random_poset(rng, rng.randint(3, 14))
        graded, thin, eulerian, _ = check_cw_conditions(p)
        if graded.passed and eulerian.passed:
            assert thin.passed


def test_disconnected_interval_detected():
    # two disjoint chains between bottom and top, rank gap 3
    labels = ["0", "a1", "a2", "b1", "b2", "1"]
    covers = [(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)]
    p = GradedPoset(labels, [0, 1, 2, 1, 2, 3], covers)
    connected = check_cw_conditions(p)[3]
    assert [(u, v) for u, v, _ in connected.counterexamples] == [("0", "1")]


def test_graded_check_flags_rank_jump():
    p = GradedPoset(["a", "b"], [0, 2], [(0, 1)])
    assert not check_cw_conditions(p)[0].passed


def test_export_dot():
    one = GradedPoset(["x"], [0], [])
    text = export_dot(one)
    assert text.startswith("digraph hasse {") and 'n0 [label="x"]' in text
    empty = export_dot(GradedPoset([], [], []))
    assert empty == "digraph hasse {\n  rankdir=BT;\n}\n"
    a2 = build_system("A2")
    q = bruhat_interval(a2.identity, longest_element(a2))
    dot = export_dot(q)
    assert dot.count("[label=") == 6 and dot.count("->") == 8
    assert dot == export_dot(q)


def test_from_order_transitive_reduction():
    p = GradedPoset.from_order(["a", "b", "c"], [0, 1, 2], lambda x, y: x < y)
    assert p.covers == [(0, 1), (1, 2)]
    assert p.leq(0, 2)
    assert p.interval(0, 2) == [0, 1, 2]
