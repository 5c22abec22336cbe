"""Shared test utilities: a seeded corpus of small random grammars."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator

from zipparse.analysis import analyse, is_ll1
from zipparse.bench import random_grammar
from zipparse.simple import call_with_deep_stack
from zipparse.syntax import Environment, Kind, Syntax, Token

KINDS = [Kind("a"), Kind("b"), Kind("c")]
SAMPLES = {k: Token(k, k.name) for k in KINDS}


@dataclass
class Case:
    seed: int
    root: Syntax
    env: Environment
    kinds: list
    ll1: bool


def make_case(seed: int, max_nodes: int = 12) -> Case:
    rng = random.Random(seed)
    kinds = KINDS[: rng.randrange(1, 4)]
    root = random_grammar(rng, rng.randrange(3, max_nodes + 1), kinds, rng.randrange(1, 3))
    env = Environment([root], SAMPLES)
    analyse(env)
    return Case(seed, root, env, kinds, is_ll1(root))


def corpus(min_ll1: int, max_nodes: int = 12, start_seed: int = 0) -> list[Case]:
    """Grammars with at most ``max_nodes`` nodes, generated from consecutive
    seeds until ``min_ll1`` of them are LL(1)."""
    out: list[Case] = []
    ll1 = 0
    seed = start_seed
    while ll1 < min_ll1:
        case = make_case(seed, max_nodes)
        seed += 1
        if len(case.env) > max_nodes:
            continue
        out.append(case)
        ll1 += case.ll1
    return out


def sequences(kinds: list, max_len: int) -> Iterator[tuple]:
    for n in range(max_len + 1):
        for ks in itertools.product(kinds, repeat=n):
            yield tuple(SAMPLES[k] for k in ks)


def deep(fn, *args):
    """Run ``fn`` on a thread with a large stack (for the recursive engine)."""
    return call_with_deep_stack(fn, *args, depth=100_000)


def shape(node: Syntax, depth: int = 12):
    """A structural fingerprint: identifiers by name, leaves by content."""
    from zipparse.syntax import Disjunction, Elem, Epsilon, Failure, Map, Sequence, Var

    t = type(node)
    if t is Var:
        return ("var", node.name)
    if t is Elem:
        return ("elem", node.kind.name)
    if t is Epsilon:
        return ("eps", node.value)
    if t is Failure:
        return ("fail",)
    if depth == 0:
        return ("...",)
    if t is Map:
        return ("map", node.transform.name, shape(node.inner, depth - 1))
    if t is Sequence:
        return ("seq", shape(node.left, depth - 1), shape(node.right, depth - 1))
    if t is Disjunction:
        return ("disj", shape(node.left, depth - 1), shape(node.right, depth - 1))
    raise TypeError(t)
