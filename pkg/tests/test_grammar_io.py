import os

import pytest

from zipparse.analysis import analyse, first_set, is_ll1, is_nullable, snf_set
from zipparse.bench import anbn_grammar
from zipparse.grammar_io import (
    FormatError,
    Labeled,
    Leaf,
    TreeList,
    TreePair,
    Unit,
    dump_grammar,
    emit_diagnostics,
    emit_tree,
    format_tokens,
    load_grammar,
    load_tokens,
    parse_grammar,
    parse_tokens,
    parse_tree,
)
from zipparse.syntax import Kind, Token
from zipparse.zippy import Parsed, focus

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")
GRAMMARS = sorted(f for f in os.listdir(FIXTURES) if f.endswith(".grammar"))


def fixture(name):
    return os.path.join(FIXTURES, name)


def test_anbn_file_matches_the_library_grammar():
    loaded = load_grammar(fixture("anbn.grammar"))
    lib = anbn_grammar()
    analyse(loaded.env)
    analyse(lib)
    A, B = loaded.kind("A"), loaded.kind("B")
    for query in (first_set, snf_set, is_nullable, is_ll1):
        assert query(loaded.start) == query(lib)
    assert first_set(loaded.start) == {A}

    def depth(tree):
        n = 0
        while isinstance(tree, Labeled):
            n += 1
            tree = tree.value.right.left
        return n

    a, b = Token(A, "a"), Token(B, "b")
    for n in range(5):
        ts = [a] * n + [b] * n
        got, want = focus(loaded.start).parse(ts), focus(lib).parse(ts)
        assert isinstance(got, Parsed) and isinstance(want, Parsed)
        assert depth(got.value) == want.value == n
    for bad in ([a, b, a, b], [a, a, b], [b]):
        assert type(focus(loaded.start).parse(bad)) is type(focus(lib).parse(bad))


def test_anbn_tree_shape():
    loaded = load_grammar(fixture("anbn.grammar"))
    A, B = loaded.kind("A"), loaded.kind("B")
    a, b = Token(A, "a"), Token(B, "b")
    tree = focus(loaded.start).parse([a, b]).value
    assert tree == Labeled("more", TreePair(Leaf(a), TreePair(Unit("done"), Leaf(b))))


@pytest.mark.parametrize("name", GRAMMARS)
def test_grammar_files_round_trip(name):
    with open(fixture(name)) as fh:
        gf = parse_grammar(fh.read())
    again = parse_grammar(dump_grammar(gf))
    assert again == gf
    assert dump_grammar(again) == dump_grammar(gf)


@pytest.mark.parametrize(
    "text, message, line",
    [
        ("kinds A;\nx = elem(A);\n", "start", None),
        ("kinds A;\nstart y;\nx = elem(A);\n", "y", 2),
        ("kinds A;\nstart x;\nx = elem(Z);\n", "Z", 3),
        ("kinds A;\nstart x;\nx = var(q);\n", "q", 3),
        ("kinds A;\nstart x;\nx = elem(A);\nx = elem(A);\n", "x", 4),
        ("kinds A A;\nstart x;\nx = elem(A);\n", "A", 1),
        ("kinds A;\nstart x;\nx = seq(elem(A)\n", "", 4),
        ("", "start", None),
    ],
)
def test_validation_errors_have_locations(text, message, line):
    with pytest.raises(FormatError) as info:
        parse_grammar(text, "g.grammar")
    err = info.value
    assert message in err.message
    if line is not None:
        assert err.line == line
        assert str(err).startswith(f"g.grammar:{line}:")


def test_token_files():
    A, B = Kind("A"), Kind("B")
    assert parse_tokens("A\ta\nB\tb\n", [A, B]) == [Token(A, "a"), Token(B, "b")]
    assert parse_tokens("", [A]) == []
    with pytest.raises(FormatError) as info:
        parse_tokens("Z\tz\n", [A])
    assert info.value.line == 1 and "unknown kind" in info.value.message
    with pytest.raises(FormatError, match="malformed"):
        parse_tokens("A a\n", [A])
    ts = [Token(A, "a b"), Token(B, "")]
    assert parse_tokens(format_tokens(ts), [A, B]) == ts
    assert load_tokens(fixture("empty.tokens"), [A]) == []


def test_trees_round_trip():
    leaf = Leaf(Token(Kind("NUM"), "1"))
    for tree in [
        Labeled("num", leaf),
        TreePair(Unit("x"), TreeList("items", (leaf, Unit("")))),
        TreeList("empty", ()),
    ]:
        assert parse_tree(emit_tree(tree)) == tree
    with pytest.raises(FormatError):
        parse_tree('{"mystery": 1}')


def test_diagnostics_for_anbn():
    text = emit_diagnostics(load_grammar(fixture("anbn.grammar")))
    assert "first(x) = {A}" in text and "ll1: true" in text
    assert text.endswith("conflicts: none\n")


@pytest.mark.parametrize(
    "name, line",
    [
        ("first_conflict.grammar", "- first-first on A in rule s"),
        ("nullable_conflict.grammar", "- nullable-nullable in rule s"),
        ("snf_conflict.grammar", "- snf-first on A in rule s"),
    ],
)
def test_diagnostics_name_conflicts(name, line):
    text = emit_diagnostics(load_grammar(fixture(name)))
    assert "ll1: false" in text
    assert line in text
    assert "example:" in text


def test_deep_trees_round_trip_without_recursion():
    tree = Unit("end")
    # deeper than the default recursion limit; indented output grows quadratically
    for _ in range(3_000):
        tree = Labeled("more", tree)
    text = emit_tree(tree)
    assert emit_tree(parse_tree(text)) == text
