import itertools

import pytest

from tpcollapse.coxeter import (CoxeterError, all_reduced_words, bruhat_interval, bruhat_leq, build_system,
                                evaluate_word, is_reduced, longest_element, lower_interval, parse_word,
                                prefix_reflections, read_coxeter_file, reduced_word)

from oracles import all_words, bruhat_order_by_reflections, cayley_lengths, product


def elem(sys, word):
    return evaluate_word(sys, word)[0]


def test_named_systems():
    a2 = build_system("A2")
    assert a2.rank == 2 and a2.m(1, 2) == 3
    assert build_system("G2").m(1, 2) == 6
    assert build_system("B3").m(2, 3) == 4
    assert build_system("C3").cartan == tuple(zip(*build_system("B3").cartan))


@pytest.mark.parametrize("name,roots,order", [
    ("A3", 6, 24), ("B3", 9, 48), ("C3", 9, 48), ("D4", 12, 192), ("G2", 6, 12), ("F4", 24, None),
    ("E6", 36, None), ("E8", 120, None),
])
def test_positive_root_counts(name, roots, order):
    sys = build_system(name)
    assert len(sys.positive_roots) == roots
    assert longest_element(sys).length == roots
    if order:
        assert len(lower_interval(longest_element(sys))) == order


@pytest.mark.parametrize("matrix,message", [
    ([[1, 5], [5, 1]], "non-crystallographic unsupported"),
    ([[1, 3], [2, 1]], "symmetric"),
    ([[2, 3], [3, 1]], "m(i,i)"),
    ([[1, 4, 2], [4, 1, 4], [2, 4, 1]], "infinite"),
    ([[1, 3, 3], [3, 1, 3], [3, 3, 1]], "infinite"),
])
def test_rejected_matrices(matrix, message):
    with pytest.raises(CoxeterError, match=message.replace("(", r"\(").replace(")", r"\)")):
        build_system(matrix)


def test_matrix_input_matches_named():
    assert build_system([[1, 3, 2], [3, 1, 4], [2, 4, 1]]).coxeter_matrix == build_system("B3").coxeter_matrix


def test_coxeter_file(tmp_path):
    f = tmp_path / "g2.txt"
    f.write_text("2\n1 6\n6 1\n")
    assert read_coxeter_file(f).m(1, 2) == 6
    f.write_text("3\n1 5 2\n5 1 3\n2 3 1\n")
    with pytest.raises(CoxeterError, match="non-crystallographic unsupported"):
        read_coxeter_file(f)
    f.write_text("2\n1 3\n")
    with pytest.raises(CoxeterError):
        read_coxeter_file(f)


def test_parse_word():
    assert parse_word("1,2,1") == (1, 2, 1)
    assert parse_word(" ") == ()
    with pytest.raises(CoxeterError):
        parse_word("1,,2")


def test_evaluate_examples():
    a2, a3 = build_system("A2"), build_system("A3")
    w, red = evaluate_word(a2, (1, 2, 1))
    assert (w.length, red) == (3, True)
    w, red = evaluate_word(a2, (1, 1))
    assert w.is_identity and not red
    # brute force: s1s2s1s2 = s2s1, of length 2
    w, red = evaluate_word(a3, (1, 2, 1, 2))
    assert (w.length, red) == (2, False)
    assert w == product(a3, (2, 1))
    with pytest.raises(CoxeterError):
        evaluate_word(a2, (3,))


@pytest.mark.parametrize("name", ["A3", "B3"])
def test_reducedness_matches_cayley_lengths(name):
    sys = build_system(name)
    lengths = cayley_lengths(sys)
    for word in all_words(sys.rank, 6):
        w, red = evaluate_word(sys, word)
        assert w.length == lengths[w]
        assert red == (len(word) == lengths[w])


def test_group_element_basics():
    b3 = build_system("B3")
    for w in lower_interval(longest_element(b3)):
        assert w * w.inverse() == b3.identity
        assert w.inverse().length == w.length
        assert elem(b3, reduced_word(w)) == w
        assert w.word() == reduced_word(w)


def test_prefix_reflections():
    a2 = build_system("A2")
    s1, s2 = a2.generator(1), a2.generator(2)
    assert prefix_reflections(a2, (1, 2, 1)) == [s1, s1 * s2 * s1, s2]
    assert prefix_reflections(a2, (1, 2)) == [s1, s1 * s2 * s1]
    assert prefix_reflections(a2, (2,)) == [s2]


@pytest.mark.parametrize("name", ["A3", "B3", "G2"])
def test_prefix_reflections_distinct_on_reduced_words(name):
    sys = build_system(name)
    for w in lower_interval(longest_element(sys)):
        for word in all_reduced_words(w)[:4]:
            refl = prefix_reflections(sys, word)
            assert len(set(refl)) == len(refl)
            for t in refl:
                assert t * t == sys.identity and not t.is_identity


def test_prefix_reflections_nonreduced_fallback():
    # x1 x2 x1 x1: the last letter repeats the one before it
    a2 = build_system("A2")
    refl = prefix_reflections(a2, (1, 2, 1, 1))
    assert refl[3] == refl[2]


def test_bruhat_examples():
    a2, a3 = build_system("A2"), build_system("A3")
    assert bruhat_leq(a2.identity, elem(a2, (1, 2, 1)))
    assert not bruhat_leq(elem(a2, (1, 2)), elem(a2, (2, 1)))
    # s2 is the middle letter of s1 s2 s1, hence below it
    assert bruhat_leq(elem(a3, (2,)), elem(a3, (1, 2, 1)))
    assert bruhat_leq(elem(a3, (2,)), elem(a3, (1, 2, 1)), exhaustive=True)
    assert not bruhat_leq(elem(a3, (3,)), elem(a3, (1, 2, 1)))


@pytest.mark.parametrize("name", ["A3", "B3"])
def test_bruhat_matches_reflection_order(name):
    sys = build_system(name)
    order = bruhat_order_by_reflections(sys)
    elements = lower_interval(longest_element(sys))
    for u, w in itertools.product(elements, repeat=2):
        assert bruhat_leq(u, w) == ((u, w) in order)


def test_bruhat_independent_of_reduced_word():
    a3 = build_system("A3")
    elements = lower_interval(longest_element(a3))
    for w in elements:
        words = all_reduced_words(w)
        for u in elements:
            answers = {bruhat_leq(u, w, word=word) for word in words}
            answers.add(bruhat_leq(u, w, exhaustive=True))
            assert len(answers) == 1


def test_all_reduced_words():
    a3 = build_system("A3")
    words = all_reduced_words(longest_element(a3))
    assert len(words) == 16
    assert all(is_reduced(a3, w) and len(w) == 6 for w in words)


def test_intervals():
    a2, a3 = build_system("A2"), build_system("A3")
    p = bruhat_interval(a2.identity, elem(a2, (1, 2, 1)))
    assert len(p) == 6
    assert [p.rank.count(r) for r in range(4)] == [1, 2, 2, 1]
    w = elem(a3, (1, 3))
    assert len(bruhat_interval(w, w)) == 1
    assert len(bruhat_interval(a3.identity, longest_element(a3))) == 24
    with pytest.raises(CoxeterError):
        bruhat_interval(elem(a2, (1,)), elem(a2, (2,)))


def test_intervals_graded_by_length():
    b3 = build_system("B3")
    top = longest_element(b3)
    for u in lower_interval(top)[::7]:
        p = bruhat_interval(u, top)
        assert all(p.rank[b] == p.rank[a] + 1 for a, b in p.covers)
        assert all(p.rank[i] == z.length - u.length for i, z in enumerate(p.payload))
