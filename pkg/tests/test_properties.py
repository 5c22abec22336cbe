"""Property tests over seeded random grammars and generated inputs."""

import itertools

from hypothesis import HealthCheck, assume, given, settings, strategies as st

from zipparse.analysis import (
    analyse,
    analyse_new,
    first_set,
    is_ll1,
    is_nullable,
    nullable_value,
    productive,
    snf_set,
)
from zipparse.jsonlang import JSON_KINDS, json_grammar
from zipparse.oracle import Oracle, OracleExplosion
from zipparse.printing import enumerate_sequences, pretty_print
from zipparse.simple import derive_simple, run_simple
from zipparse.syntax import ALLOCATIONS, Sequence, Token, walk
from zipparse.zippy import STATS, Parsed, focus, locate

from helpers import SAMPLES, deep, make_case, sequences

seeds = st.integers(min_value=0, max_value=10**6)
SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


def ll1_case(seed):
    case = make_case(seed)
    assume(case.ll1 and len(case.env) <= 12)
    return case


def language(oracle, node, n):
    try:
        return oracle.language(n, node)
    except OracleExplosion:
        assume(False)


@SETTINGS
@given(seeds, st.data())
def test_derivation_preserves_ll1_and_matches_the_oracle_derivative(seed, data):
    case = ll1_case(seed)
    kinds = sorted(first_set(case.root), key=lambda k: k.index)
    assume(kinds)
    t = SAMPLES[data.draw(st.sampled_from(kinds))]
    zs = focus(case.root).derive(t)
    zipped = zs.unfocus()
    simple = deep(derive_simple, t, case.root)
    analyse(zipped)
    assert is_ll1(zipped) and is_ll1(simple)

    oracle = Oracle(case.root, SAMPLES, values=False)
    whole = language(oracle, case.root, 5)
    expected = {w[1:] for w in whole if w and w[0] is t.kind}
    for residual in (zipped, simple):
        got = Oracle(residual, SAMPLES, values=False).language(4)
        assert got == expected


@SETTINGS
@given(seeds, st.data())
def test_locate_and_result_agree_with_the_unfocused_syntax(seed, data):
    case = ll1_case(seed)
    fs = focus(case.root)
    steps = data.draw(st.lists(st.sampled_from(case.kinds), max_size=3))
    for k in steps:
        nxt = fs.derive(SAMPLES[k])
        if nxt is None:
            break
        fs = nxt
    whole = fs.unfocus()
    analyse(whole)
    assert fs.result() == nullable_value(whole)
    assert fs.accepts_empty() == is_nullable(whole)
    assert fs.first() == first_set(whole)
    for k in case.kinds:
        found = locate(k, fs)
        if found is None:
            assert k not in first_set(whole)
        else:
            assert k in first_set(found.focal)


@SETTINGS
@given(seeds)
def test_zippy_parses_allocate_only_epsilon_nodes(seed):
    case = ll1_case(seed)
    for ts in sequences(case.kinds, 4):
        ALLOCATIONS.clear()
        STATS.reset()
        focus(case.root).parse(ts)
        assert set(ALLOCATIONS) <= {"Epsilon"}
        stats = STATS.snapshot()
        assert stats["plug_created"] <= stats["pierce_layers"]


@SETTINGS
@given(seeds)
def test_enumeration_is_complete_and_ordered(seed):
    case = make_case(seed)
    bound = 5
    oracle = Oracle(case.root, SAMPLES, values=False)
    want = language(oracle, case.root, bound)
    got = list(enumerate_sequences(case.root, max_len=bound))
    assert len(got) == len(set(got))
    assert set(got) == want
    lengths = [len(g) for g in got]
    assert lengths == sorted(lengths)


@SETTINGS
@given(seeds)
def test_pretty_printing_round_trips(seed):
    case = ll1_case(seed)
    for ts in sequences(case.kinds, 3):
        r = focus(case.root).parse(ts)
        if not isinstance(r, Parsed):
            continue
        printed = list(itertools.islice(pretty_print(case.root, r.value, max_len=6, samples=SAMPLES), 5))
        assert printed, ts
        assert len(printed[0]) <= len(ts)
        for out in printed:
            assert focus(case.root).parse(out).value == r.value
        lengths = [len(p) for p in printed]
        assert lengths == sorted(lengths)


@SETTINGS
@given(seeds)
def test_incremental_analysis_matches_a_fresh_network(seed):
    case = make_case(seed)
    nodes = list(walk([case.root]))
    for left, right in itertools.islice(itertools.product(nodes, nodes), 30):
        node = analyse_new(Sequence(left, right))
        twin = Sequence(left, right)
        analyse(twin)
        for query in (productive, is_nullable, first_set, snf_set, is_ll1):
            assert query(node) == query(twin)


def test_json_engines_agree_with_the_oracle():
    value = json_grammar()
    analyse(value)
    samples = {k: Token(k, k.name) for k in JSON_KINDS}
    matches = Oracle(value, samples).matches(6)
    table = {}
    for ts, v in matches:
        assert ts not in table
        table[ts] = v
    assert set(enumerate_sequences(value, max_len=6)) == {tuple(t.kind for t in ts) for ts in table}
    accepted = 0
    for n in range(5):
        for kinds in itertools.product(JSON_KINDS, repeat=n):
            ts = [samples[k] for k in kinds]
            z, s = focus(value).parse(ts), run_simple(value, ts, thread=False)
            assert type(z) is type(s)
            if isinstance(z, Parsed):
                accepted += 1
                assert z.value == s.value == table[tuple(ts)]
            else:
                assert tuple(ts) not in table
    assert accepted == sum(1 for ts in table if len(ts) < 5)
    for ts, v in table.items():
        assert focus(value).parse(ts).value == v == run_simple(value, ts, thread=False).value


@SETTINGS
@given(seeds)
def test_snf_of_ll1_grammars_contains_every_witnessed_kind(seed):
    case = ll1_case(seed)
    oracle = Oracle(case.root, SAMPLES, values=False)
    for node in case.env.nodes:
        lang = language(oracle, node, 5)
        witnessed = {w[i] for w in lang for i in range(len(w)) if w[:i] in lang}
        assert witnessed <= snf_set(node)
