import itertools

import pytest
from hypothesis import given, strategies as st

from hotspot.streams import DigitStream, EndOfStream, Explicit, Periodic, Ramp
from hotspot.words import (
    CylinderUnion,
    Relation,
    Word,
    canonicalize,
    complement_decomposition,
    format_word,
    member_at,
    parse_word,
    relate,
)

from oracles import relation_by_sets

words = st.lists(st.integers(1, 5), max_size=6).map(Word)


def test_word_rejects_zero_and_non_integers():
    with pytest.raises(ValueError):
        Word([1, 0])
    with pytest.raises(ValueError):
        Word([1.5])
    with pytest.raises(ValueError):
        parse_word("0,2")
    with pytest.raises(ValueError):
        parse_word("1,,x")


@pytest.mark.parametrize("text, word", [("3,4", (3, 4)), ("ε", ()), ("", ()), (" 7 ", (7,))])
def test_parse_and_format(text, word):
    assert parse_word(text) == Word(word)
    assert parse_word(format_word(Word(word))) == Word(word)


def test_empty_word_formats_as_epsilon():
    assert format_word(Word()) == "ε"
    assert str(Word((3, 4))) == "3,4"


@pytest.mark.parametrize(
    "a, b, rel",
    [
        ((1,), (1, 2), Relation.A_CONTAINS_B),
        ((1, 2), (1, 3), Relation.DISJOINT),
        ((2,), (2,), Relation.EQUAL),
        ((1, 2), (1,), Relation.B_CONTAINS_A),
        ((), (5, 5), Relation.A_CONTAINS_B),
    ],
)
def test_relate_examples(a, b, rel):
    assert relate(Word(a), Word(b)) is rel


@given(words, words)
def test_relate_matches_set_comparison(a, b):
    assert relate(a, b).value == relation_by_sets(a, b)


@given(words, words)
def test_relate_swap_symmetry(a, b):
    swap = {Relation.A_CONTAINS_B: Relation.B_CONTAINS_A, Relation.B_CONTAINS_A: Relation.A_CONTAINS_B}
    r = relate(a, b)
    assert relate(b, a) is swap.get(r, r)


@pytest.mark.parametrize(
    "xi, m, expected, residual",
    [
        ((1,), 3, [(2,), (3,)], True),
        ((2, 2), 2, [(1,), (2, 1)], True),
        ((), 4, [], False),
    ],
)
def test_complement_examples(xi, m, expected, residual):
    members, flag = complement_decomposition(Word(xi), m)
    assert [tuple(w) for w in members] == expected
    assert flag is residual


def test_complement_two_level_by_enumeration():
    # every depth-2 word over {1,2} outside [2,2] lies in exactly one member
    members, _ = complement_decomposition(Word((2, 2)), 2)
    for w in itertools.product((1, 2), repeat=2):
        owners = [m for m in members if w[: len(m)] == tuple(m)]
        assert len(owners) == (0 if w == (2, 2) else 1)


def test_complement_skips_prefixes_above_cutoff():
    members, flag = complement_decomposition(Word((5, 1)), 2)
    assert [tuple(w) for w in members] == [(1,), (2,)]
    assert flag


@pytest.mark.parametrize("depth", [0, 1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_complement_partitions_points_exhaustively(depth, m):
    for xi in itertools.product(range(1, m + 1), repeat=depth):
        members, _ = complement_decomposition(Word(xi), m)
        for a, b in itertools.combinations(members, 2):
            assert relate(a, b) is Relation.DISJOINT
        for c in members:
            assert relate(c, Word(xi)) is Relation.DISJOINT
        for x in itertools.product(range(1, m + 1), repeat=max(depth, 1)):
            inside = member_at(DigitStream(Explicit(x)), Word(xi), 0)
            owners = sum(1 for c in members if x[: len(c)] == tuple(c))
            assert inside != (owners == 1)
            assert owners <= 1


@pytest.mark.parametrize(
    "given_, expected",
    [
        ([(1,), (1, 2)], [(1,)]),
        ([(1, 2), (1, 3), (2,)], [(1, 2), (1, 3), (2,)]),
        ([], []),
        ([(2, 1), (1,), (2, 1, 5), (1, 1)], [(1,), (2, 1)]),
    ],
)
def test_canonicalize_examples(given_, expected):
    assert [tuple(w) for w in canonicalize(given_)] == expected


@given(st.lists(st.lists(st.integers(1, 3), max_size=3), max_size=8))
def test_canonicalize_idempotent_and_preserves_union(raw):
    cu = canonicalize(raw)
    assert canonicalize(cu.members) == cu
    assert list(cu.members) == sorted(cu.members)
    for a, b in itertools.combinations(cu.members, 2):
        assert relate(a, b) is Relation.DISJOINT
    for x in itertools.product((1, 2, 3), repeat=3):
        before = any(x[: len(w)] == tuple(w) for w in raw)
        assert cu.covers_point(x) == before


def test_member_at_examples():
    ramp = DigitStream(Ramp())
    assert member_at(ramp, Word((3, 4)), 2)
    assert not member_at(ramp, Word((3, 4)), 1)
    assert member_at(DigitStream(Periodic((1, 2))), Word(), 17)


def test_member_at_reports_exhaustion():
    s = DigitStream(Explicit((1, 2, 3)))
    assert member_at(s, Word((2, 3)), 1)
    with pytest.raises(EndOfStream):
        member_at(s, Word((3, 4)), 2)


def test_cylinder_union_helpers():
    cu = canonicalize([(2,), (1, 3)])
    assert (2,) in cu and len(cu) == 2
    assert cu.max_depth() == 2
    assert cu.to_strings() == ["1,3", "2"]
    assert CylinderUnion().max_depth() == 0
