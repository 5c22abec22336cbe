import json
import random

import pytest

from zipparse.bench import (
    A,
    B,
    anbn_grammar,
    gen_anbn,
    gen_json,
    gen_json_tokens,
    gen_nested,
    measure,
    random_grammar,
    suite_input,
)
from zipparse.jsonlang import json_grammar, lex, to_python
from zipparse.syntax import Kind, Token, walk
from zipparse.zippy import Parsed, focus


def test_gen_anbn():
    assert gen_anbn(2) == [Token(A, "a"), Token(A, "a"), Token(B, "b"), Token(B, "b")]


def test_gen_nested():
    assert gen_nested(3) == "[[[]]]"


def test_generators_are_reproducible():
    assert gen_json(7, 5000) == gen_json(7, 5000)
    assert gen_json(7, 5000) != gen_json(8, 5000)
    assert len(gen_json(7, 5000)) >= 5000
    assert gen_json(1, 0) == "[]"
    assert len(lex(gen_json_tokens(3, 1000))) >= 1000


def test_generated_json_parses():
    text = gen_json(0, 10**5)
    r = focus(json_grammar()).parse(lex(text))
    assert isinstance(r, Parsed)
    assert to_python(r.value) == json.loads(text)


def test_suite_input():
    s, tokens = suite_input("anbn", 100)
    assert s.name == "x" and len(tokens) == 100
    s, tokens = suite_input("json", 500, seed=2)
    assert len(tokens) >= 500
    with pytest.raises(ValueError):
        suite_input("xml", 10)


def test_measure_records_runs_and_counters():
    m = measure("zippy", anbn_grammar(), gen_anbn(100), reps=3, warmup=1)
    assert len(m.millis) == 3 and m.overflow is None
    assert set(m.allocations) <= {"Epsilon"}
    assert m.layers["plug_created"] <= m.layers["pierce_layers"]
    assert m.median > 0 and m.mean > 0


def test_measure_records_the_depth_guard():
    m = measure("simple", anbn_grammar(), gen_anbn(300), reps=2, warmup=0, depth_limit=200)
    assert m.overflow is not None and m.millis == []


def test_random_grammar_is_seeded():
    kinds = [Kind("a"), Kind("b")]
    s1 = random_grammar(random.Random(5), 10, kinds)
    s2 = random_grammar(random.Random(5), 10, kinds)
    assert [type(n) for n in walk([s1])] == [type(n) for n in walk([s2])]
