import itertools
import json
import random
from pathlib import Path

import pytest

from tpcollapse.collapse import (CollapseKey, collapse_key, compare_with_bruhat, enumerate_faces, quotient_poset,
                                 run_collapse, verify_conditions)
from tpcollapse.coxeter import all_reduced_words, build_system, longest_element, lower_interval
from tpcollapse.hecke import Face, omittable_pairs
from tpcollapse.posets import check_cw_conditions

from oracles import commutation_class

DATA = Path(__file__).parent / "data"


def classes_as_sets(trace):
    return [{f.support for f in members} for members in trace.classes]


def collapsed(trace, support):
    return any(f.support in trace.collapsed for f in trace.classes[trace.class_of[support]])


def test_enumerate_faces():
    a2 = build_system("A2")
    faces = enumerate_faces(a2, (1, 2, 1))
    assert len(faces) == 7
    assert [a.face.support for a in faces if not a.reduced] == [(1, 3)]
    assert [a.reduced for a in enumerate_faces(a2, (2,))] == [True]
    faces = enumerate_faces(a2, (1, 2, 1, 2))
    assert len(faces) == 15
    assert sorted(a.face.support for a in faces if not a.reduced) == [
        (1, 2, 3, 4), (1, 2, 4), (1, 3), (1, 3, 4), (2, 4)]


def test_collapse_key_examples():
    a2, a1 = build_system("A2"), build_system("A1")
    assert collapse_key(a2, (1, 2, 1, 2), Face.full((1, 2, 1, 2))) == CollapseKey(4, 3, 1, 3)
    assert collapse_key(a1, (1, 1), Face.full((1, 1))) == CollapseKey(2, 1, 0, 1)
    assert collapse_key(a2, (1, 2, 1), Face((1, 2, 1), (1, 3))) == CollapseKey(3, 2, 0, 1)
    assert collapse_key(a2, (1, 2, 1), Face.full((1, 2, 1))) is None
    assert CollapseKey(3, 2, 0, 1).pair == (1, 3)
    with pytest.raises(ValueError):
        collapse_key(a2, (1, 2), Face.full((1, 2)), mode="fast")


def test_a2_longest_word():
    a2 = build_system("A2")
    trace = run_collapse(a2, (1, 2, 1))
    assert len(trace.steps) == 1
    step = trace.steps[0]
    assert step.face.support == (1, 3) and step.deletion_pair == (1, 3)
    assert [(a.support, b.support) for a, b in step.identified_pairs] == [((3,), (1,))]
    assert classes_as_sets(trace) == [{(1,), (3,)}, {(2,)}, {(1, 2)}, {(1, 3)}, {(2, 3)}, {(1, 2, 3)}]
    assert len(trace.survivors) == 5
    assert trace.same_class((1,), (3,))


def test_commutation_mode_example():
    a3 = build_system("A3")
    trace = run_collapse(a3, (1, 3, 1), mode="commutation")
    assert [s.face.support for s in trace.steps] == [(1, 2, 3)]
    assert trace.same_class((1, 2), (2, 3)) and trace.same_class((1,), (3,))


def test_single_stutter():
    a1 = build_system("A1")
    trace = run_collapse(a1, (1, 1))
    assert len(trace.steps) == 1
    assert len(trace.survivors) == 1
    assert trace.same_class((1,), (2,))
    assert verify_conditions(trace).ok
    assert not compare_with_bruhat(trace)


def test_trivial_word_quotient():
    a1 = build_system("A1")
    trace = run_collapse(a1, (1,))
    p = quotient_poset(trace)
    assert len(p) == 2 and p.labels == ["e", "s1"]
    assert not compare_with_bruhat(trace, p)


def test_quotient_a2():
    a2 = build_system("A2")
    p = quotient_poset(run_collapse(a2, (1, 2, 1)))
    assert len(p) == 6
    assert sorted(p.rank) == [0, 1, 1, 2, 2, 3]
    assert all(r.passed for r in check_cw_conditions(p))
    with pytest.raises(ValueError):
        quotient_poset(run_collapse(a2, (1, 2, 1), mode="commutation"))


def test_quotient_a3_longest_word():
    a3 = build_system("A3")
    trace = run_collapse(a3, (1, 2, 1, 3, 2, 1))
    assert len(trace.survivors) == 23
    p = quotient_poset(trace)
    assert not compare_with_bruhat(trace, p)
    assert all(r.passed for r in check_cw_conditions(p))


def test_survivor_map_matches_demazure_of_every_member():
    b3 = build_system("B3")
    trace = run_collapse(b3, (1, 2, 3, 2, 1, 3))
    for k, w in trace.survivor_map.items():
        assert all(trace.element_of[f.support] == w for f in trace.classes[k])


def test_identified_pairs_exchange_pair_positions():
    a3 = build_system("A3")
    trace = run_collapse(a3, (2, 1, 3, 2, 3, 1))
    for step in trace.steps:
        l, r = step.deletion_pair
        for a, b in step.identified_pairs:
            assert r in a.support and l not in a.support
            assert set(b.support) == set(a.support) - {r} | {l}


def _random_words(sys, count, seed):
    rng = random.Random(seed)
    words = [w for u in lower_interval(longest_element(sys)) for w in all_reduced_words(u) if len(w) <= 7]
    picked = rng.sample(words, min(count, len(words)))
    return picked + [tuple(rng.randint(1, sys.rank) for _ in range(rng.randint(1, 7))) for _ in range(count)]


@pytest.mark.parametrize("name", ["A3", "B3", "G2"])
def test_full_mode_invariants(name):
    sys = build_system(name)
    for word in _random_words(sys, 12, name):
        trace = run_collapse(sys, word)
        for a in trace.faces:
            assert collapsed(trace, a.face.support) == (not a.reduced)
        for k in trace.survivors:
            assert any(a.reduced for a in trace.faces if a.face.support == trace.classes[k][0].support)
        assert verify_conditions(trace).ok
        assert not compare_with_bruhat(trace)


@pytest.mark.parametrize("name", ["A3", "B3", "A4"])
def test_commutation_mode_matches_closure_oracle(name):
    sys = build_system(name)
    for word in _random_words(sys, 10, name + "c"):
        trace = run_collapse(sys, word, mode="commutation")
        for a in trace.faces:
            assert collapsed(trace, a.face.support) == bool(omittable_pairs(sys, a.face))
        alive = [f for k in trace.survivors for f in trace.classes[k]]
        for f, g in itertools.combinations(alive, 2):
            same = commutation_class(sys, f.letters) == commutation_class(sys, g.letters)
            assert trace.same_class(f.support, g.support) == same


@pytest.mark.parametrize("name", ["A3", "B3"])
def test_prefix_trace_agrees_on_reduced_faces(name):
    sys = build_system(name)
    for word in _random_words(sys, 10, name + "p"):
        if len(word) < 2:
            continue
        whole, prefix = run_collapse(sys, word), run_collapse(sys, word[:-1])
        supports = [a.face.support for a in prefix.faces]
        reduced = [a.face.support for a in prefix.faces if a.reduced]
        for f, g in itertools.combinations(reduced, 2):
            assert whole.same_class(f, g) == prefix.same_class(f, g)
        for f, g in itertools.combinations(supports, 2):
            if prefix.same_class(f, g):
                assert whole.same_class(f, g)


@pytest.mark.parametrize("name", ["A3", "B3"])
def test_codimension_one_faces_of_survivors_are_distinct(name):
    sys = build_system(name)
    for word in _random_words(sys, 10, name + "i"):
        trace = run_collapse(sys, word)
        for k in trace.survivors:
            rep = next(f for f in trace.classes[k] if trace.element_of[f.support].length == len(f.support))
            if len(rep.support) < 2:
                continue
            below = [trace.class_of[tuple(p for p in rep.support if p != q)] for q in rep.support]
            assert len(set(below)) == len(below)


def test_identified_faces_share_demazure_product():
    b3 = build_system("B3")
    for word in [(1, 2, 3, 2, 1, 2), (3, 2, 3, 1, 2, 3, 2)]:
        trace = run_collapse(b3, word)
        for step in trace.steps:
            for a, b in step.identified_pairs:
                assert trace.element_of[a.support] == trace.element_of[b.support]


def test_off_schedule_sweeps_are_flagged_not_fatal():
    b3 = build_system("B3")
    trace = run_collapse(b3, (1, 2, 3, 2, 1, 2, 3))
    flagged = [f for s in trace.steps for f in s.off_schedule]
    assert flagged
    assert all(any(f == g for s in trace.steps for g in s.also_collapsed) for f in flagged)
    assert verify_conditions(trace).ok


@pytest.mark.parametrize("name,word", [("A2", (1, 2, 1)), ("A3", (1, 2, 1, 3, 2, 1)), ("B2", (1, 2, 1, 2))])
def test_golden_traces(name, word):
    trace = run_collapse(build_system(name), word)
    golden = DATA / f"trace_{name}_{''.join(map(str, word))}.json"
    assert trace.to_json() == golden.read_text()
    assert json.loads(trace.to_json())["word"] == list(word)
