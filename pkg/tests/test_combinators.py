import pytest

from zipparse.analysis import analyse, is_ll1
from zipparse.combinators import (
    HOLE,
    INFIX_LEFT,
    INFIX_RIGHT,
    POSTFIX,
    PREFIX,
    Level,
    many,
    many1,
    one_of,
    operator_table,
    opt,
    rep1sep,
    repsep,
    tagged_disjunction,
)
from zipparse.oracle import oracle_matches
from zipparse.printing import pretty_print
from zipparse.syntax import Disjunction, Elem, Epsilon, Failure, Kind, Map, Sequence, Token, Var, walk
from zipparse.zippy import Parsed, focus

A, C = Kind("A"), Kind("C")
NUM, PLUS, MINUS, BANG = Kind("NUM"), Kind("PLUS"), Kind("MINUS"), Kind("BANG")
PRIMITIVES = {Elem, Epsilon, Failure, Disjunction, Sequence, Map, Var}


def num(n):
    return Token(NUM, n)


plus, minus, bang = Token(PLUS, "+"), Token(MINUS, "-"), Token(BANG, "!")


def value_of(s, tokens):
    r = focus(s).parse(tokens)
    assert isinstance(r, Parsed), r
    return r.value


def only_oracle_value(s, tokens):
    # the oracle draws one sample token per kind, so it sees the samples
    values = {v for ts, v in oracle_matches(s, max_len=len(tokens)) if ts == tuple(tokens)}
    assert len(values) == 1
    return values.pop()


def test_many_collects_values():
    s = many(Elem(A))
    t1, t2 = Token(A, "A"), Token(A, "A")
    assert value_of(s, [t1, t2]) == (t1, t2)
    assert value_of(s, [t1, t2]) == only_oracle_value(s, [t1, t2])
    assert value_of(s, []) == ()


def test_many1_rejects_empty():
    s = many1(Elem(A))
    assert not isinstance(focus(s).parse([]), Parsed)
    assert value_of(s, [Token(A, "x")]) == (Token(A, "x"),)


def test_repsep_drops_separators():
    s = repsep(Elem(A), Elem(C))
    ts = [Token(A, "A"), Token(C, "C"), Token(A, "A")]
    assert value_of(s, ts) == (Token(A, "A"), Token(A, "A"))
    assert value_of(s, ts) == only_oracle_value(s, ts)
    assert value_of(s, []) == ()
    assert value_of(rep1sep(Elem(A), Elem(C)), ts[:1]) == (Token(A, "A"),)


def test_opt():
    s = opt(Elem(A))
    assert value_of(s, []) is None
    assert value_of(s, [Token(A, "x")]) == Token(A, "x")


def test_tagged_disjunction():
    s = tagged_disjunction({"a": Elem(A), "c": Elem(C)})
    assert value_of(s, [Token(C, "c")]) == ("c", Token(C, "c"))
    assert type(tagged_disjunction([])) is Failure


def test_infix_left_folds_to_the_left():
    s = operator_table(Elem(NUM), [Level([PLUS], INFIX_LEFT)], "sum")
    v = value_of(s, [num(1), plus, num(2), plus, num(3)])
    assert v == (plus, (plus, num(1), num(2)), num(3))


def test_infix_right_folds_to_the_right():
    s = operator_table(Elem(NUM), [Level([PLUS], INFIX_RIGHT)], "pow")
    v = value_of(s, [num(1), plus, num(2), plus, num(3)])
    assert v == (plus, num(1), (plus, num(2), num(3)))


def test_prefix_and_postfix():
    s = operator_table(Elem(NUM), [Level([MINUS], PREFIX)], "neg")
    assert value_of(s, [minus, minus, num(1)]) == (minus, (minus, num(1)))
    s = operator_table(Elem(NUM), [Level([BANG], POSTFIX)], "fact")
    assert value_of(s, [num(3), bang, bang]) == (bang, (bang, num(3)))


def test_levels_bind_tightest_first():
    TIMES = Kind("TIMES")
    times = Token(TIMES, "*")
    s = operator_table(Elem(NUM), [Level([TIMES], INFIX_LEFT), Level([PLUS], INFIX_LEFT)], "arith")
    v = value_of(s, [num(1), plus, num(2), times, num(3)])
    assert v == (plus, num(1), (times, num(2), num(3)))


def test_custom_fold():
    s = operator_table(Elem(NUM), [Level([PLUS], INFIX_LEFT, fold=lambda op, l, r: f"({l}+{r})")], "str")
    assert value_of(s, [num(1), plus, num(2)]) == f"({num(1)}+{num(2)})"


def test_empty_level_list_returns_the_atom():
    atom = Elem(NUM)
    assert operator_table(atom, []) is atom


def test_unknown_fixity():
    with pytest.raises(ValueError):
        Level([PLUS], "circumfix")


@pytest.mark.parametrize(
    "build",
    [
        lambda: many(Elem(A)),
        lambda: many1(Elem(A)),
        lambda: repsep(Elem(A), Elem(C)),
        lambda: opt(Elem(A)),
        lambda: tagged_disjunction({"a": Elem(A), "c": Elem(C)}),
        lambda: one_of([A, C]),
        lambda: operator_table(
            Elem(NUM),
            [Level([MINUS], PREFIX), Level([BANG], POSTFIX), Level([PLUS], INFIX_LEFT), Level([A], INFIX_RIGHT)],
        ),
    ],
)
def test_expansions_use_only_primitives_and_are_ll1(build):
    s = build()
    assert {type(n) for n in walk([s])} <= PRIMITIVES
    analyse(s)
    assert is_ll1(s)


def test_separator_holes_print_as_samples():
    s = repsep(Elem(A), Elem(C))
    a = Token(A, "x")
    (first,) = [ts for ts, _ in zip(pretty_print(s, (a, a), samples={C: Token(C, ",")}), range(1))]
    assert first == (a, Token(C, ","), a)
    assert repr(HOLE) == "HOLE"


def test_operator_values_print_back():
    s = operator_table(Elem(NUM), [Level([MINUS], PREFIX), Level([PLUS], INFIX_LEFT)], "calc")
    tokens = [minus, num(1), plus, num(2), plus, minus, num(3)]
    v = value_of(s, tokens)
    printed = next(iter(pretty_print(s, v)))
    assert list(printed) == tokens
