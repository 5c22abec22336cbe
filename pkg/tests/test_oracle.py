import pytest

from zipparse.bench import A, B, anbn_grammar
from zipparse.oracle import Oracle, OracleExplosion, oracle_language, oracle_matches
from zipparse.syntax import Disjunction, Elem, Epsilon, Grammar, Sequence, Tag, Token

# the oracle builds tokens from the grammar samples
a, b = Token(A, "A"), Token(B, "B")
INT = Tag("int", int)


def test_anbn_matches():
    x = anbn_grammar()
    got = oracle_matches(x, max_len=5)
    assert got == {((), 0), ((a, b), 1), ((a, a, b, b), 2)}


def test_anbn_non_derivable_statements():
    got = dict(oracle_matches(anbn_grammar(), max_len=5))
    assert got[(a, a, b, b)] != 17
    for bad in [(a, b, a, b), (a, a, b), (a, a, b, b, b)]:
        assert bad not in got


def test_language_mode_ignores_values():
    x = anbn_grammar()
    assert oracle_language(x, max_len=4) == {(), (A, B), (A, A, B, B)}


def test_same_length_cycles_reach_the_fixpoint():
    # x = map(+1, seq(eps, x)) | eps 0 is ambiguous: infinitely many values
    g = Grammar()
    x = g.var("x", INT)
    g.define(x, Sequence(Epsilon(0, INT), x).map(lambda p: p[1] + 1, INT) | Epsilon(0, INT))
    with pytest.raises(OracleExplosion):
        Oracle(x, cap=50).extend(0)


def test_value_cap_is_configurable():
    s = Disjunction(Epsilon(1, INT), Epsilon(2, INT))
    assert oracle_matches(s, max_len=0) == {((), 1), ((), 2)}
    with pytest.raises(OracleExplosion):
        oracle_matches(s, max_len=0, cap=1)


def test_tables_are_per_node():
    e = Elem(A)
    s = Sequence(e, e)
    o = Oracle(s)
    assert o.table(e, 1) == {(a,): {a}}
    assert o.table(s, 2)
