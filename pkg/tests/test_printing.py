from itertools import islice

import pytest

from zipparse.analysis import analyse, is_ll1
from zipparse.bench import A, B, anbn_grammar
from zipparse.oracle import oracle_language
from zipparse.printing import MissingInverse, enumerate_sequences, grammar_kinds, pretty_print
from zipparse.syntax import Disjunction, Elem, Epsilon, Failure, Sequence, Tag, Token
from zipparse.zippy import focus

INT = Tag("int", int)
a, b = Token(A, "a"), Token(B, "b")


def test_anbn_enumeration():
    x = anbn_grammar()
    got = list(islice(enumerate_sequences(x), 4))
    assert got == [(), (A, B), (A, A, B, B), (A, A, A, B, B, B)]
    assert set(enumerate_sequences(x, max_len=8)) == oracle_language(x, max_len=8)


def test_trivial_enumerations():
    assert list(enumerate_sequences(Failure(INT))) == []
    assert list(enumerate_sequences(Elem(A))) == [(A,)]


def test_equal_lengths_follow_kind_order():
    s = Disjunction(Elem(B), Elem(A))
    assert list(enumerate_sequences(s)) == [(B,), (A,)]
    assert list(enumerate_sequences(s, kinds=[A, B])) == [(A,), (B,)]
    assert grammar_kinds(s) == [B, A]


def test_non_ll1_grammars_use_the_bounded_fallback():
    s = Disjunction(Sequence(Elem(A), Elem(B)), Sequence(Elem(A), Elem(A)))
    analyse(s)
    assert not is_ll1(s)
    assert list(enumerate_sequences(s, kinds=[A, B])) == [(A, A), (A, B)]


def test_anbn_pretty_print():
    x = anbn_grammar()
    assert next(iter(pretty_print(x, 2))) == (a, a, b, b)
    assert list(pretty_print(x, 0, max_len=6)) == [()]


def test_epsilon_pretty_print():
    assert list(pretty_print(Epsilon(1, INT), 1, max_len=3)) == [()]
    assert list(pretty_print(Epsilon(1, INT), 2, max_len=3)) == []


def test_unreachable_value_gives_an_empty_stream():
    assert list(pretty_print(anbn_grammar(), -1, max_len=10)) == []


def test_missing_inverse_names_the_node():
    s = Elem(A).map(lambda t: 1, INT, name="one")
    with pytest.raises(MissingInverse) as info:
        list(pretty_print(s, 1, max_len=2))
    assert "one" in str(info.value)


def test_shortest_output_comes_first():
    # value 5 via five A tokens or one B token
    s = Disjunction(
        Elem(B).map(lambda t: 5, INT, lambda v: [b] if v == 5 else [], "five"),
        Sequence(Elem(A), Elem(A)).map(lambda p: 5, INT, lambda v: [(a, a)] if v == 5 else [], "pair"),
    )
    out = list(pretty_print(s, 5, max_len=4))
    assert out == [(b,), (a, a)]
    for ts in out:
        assert focus(s).parse(ts).value == 5
