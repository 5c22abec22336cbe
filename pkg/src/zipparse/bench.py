"""Input generators, reference grammars and the timing harness."""

from __future__ import annotations

import gc
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence as Seq

from .analysis import ensure_analysed
from .jsonlang import json_grammar, lex
from .simple import DEFAULT_DEPTH_LIMIT, DepthLimitExceeded, run_simple
from .syntax import ALLOCATIONS, Disjunction, Environment, Elem, Epsilon, Failure, Grammar, Kind, Sequence, Syntax, Tag, Token, Var
from .zippy import STATS, Parsed, focus

__all__ = [
    "A",
    "B",
    "anbn_grammar",
    "gen_anbn",
    "gen_nested",
    "gen_json",
    "gen_json_tokens",
    "suite_input",
    "Measurement",
    "measure",
    "random_grammar",
    "random_environment",
]

A = Kind("A")
B = Kind("B")
COUNT = Tag("int", int)
ANY = Tag("Any")


def _succ(p: tuple) -> int:
    return p[0][1] + 1


def _unsucc(n: int, a: Token = Token(A, "a"), b: Token = Token(B, "b")) -> list:
    return [((a, n - 1), b)] if isinstance(n, int) and n > 0 else []


def anbn_grammar() -> Var:
    """``x = ((A x) B -> n + 1) | eps 0``, valued by the nesting count."""
    g = Grammar()
    x = g.var("x", COUNT)
    g.define(x, Sequence(Sequence(Elem(A), x), Elem(B)).map(_succ, COUNT, _unsucc, "succ") | Epsilon(0, COUNT))
    g.freeze(x)
    return x


def gen_anbn(n: int) -> list[Token]:
    a, b = Token(A, "a"), Token(B, "b")
    return [a] * n + [b] * n


def gen_nested(depth: int) -> str:
    return "[" * depth + "]" * depth


_WORDS = ["alpha", "beta", "gamma", "delta", "omega", "zeta", "kappa", "sigma"]


def _object(rng: random.Random, i: int) -> str:
    name = rng.choice(_WORDS) + str(rng.randrange(1000))
    tags = ", ".join(f'"{rng.choice(_WORDS)}"' for _ in range(rng.randrange(4)))
    scores = ", ".join(str(rng.randrange(-500, 500)) for _ in range(rng.randrange(1, 5)))
    flag = rng.choice(["true", "false", "null"])
    return f'{{"id": {i}, "name": "{name}", "tags": [{tags}], "scores": [{scores}], "active": {flag}}}'


def gen_json(seed: int, target_bytes: int) -> str:
    """One array of objects with string and array fields, at least
    ``target_bytes`` long (a lone ``[]`` when the target is tiny)."""
    rng = random.Random(seed)
    parts: list[str] = []
    size = 2
    i = 0
    while size < target_bytes:
        obj = _object(rng, i)
        parts.append(obj)
        size += len(obj) + 2
        i += 1
    return "[" + ", ".join(parts) + "]"


def gen_json_tokens(seed: int, tokens: int) -> str:
    """Like :func:`gen_json`, stopping once the text has at least ``tokens``
    tokens."""
    rng = random.Random(seed)
    parts: list[str] = []
    count = 2
    i = 0
    while count < tokens:
        obj = _object(rng, i)
        parts.append(obj)
        count += len(lex(obj)) + (1 if i else 0)
        i += 1
    return "[" + ", ".join(parts) + "]"


def suite_input(suite: str, size: int, seed: int = 0) -> tuple[Syntax, list[Token]]:
    """The grammar and a token list of about ``size`` tokens."""
    if suite == "anbn":
        return anbn_grammar(), gen_anbn(size // 2)
    if suite == "json":
        return json_grammar(), lex(gen_json_tokens(seed, size))
    raise ValueError(f"unknown suite {suite!r}")


@dataclass
class Measurement:
    engine: str
    tokens: int
    millis: list[float] = field(default_factory=list)
    overflow: Optional[str] = None
    allocations: dict = field(default_factory=dict)
    layers: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.millis)

    @property
    def median(self) -> float:
        return statistics.median(self.millis)


def _run(engine: str, s: Syntax, tokens: list[Token], depth_limit: int):
    if engine == "zippy":
        return focus(s).parse(tokens)
    if engine == "simple":
        return run_simple(s, tokens, depth_limit)
    raise ValueError(f"unknown engine {engine!r}")


def measure(
    engine: str,
    s: Syntax,
    tokens: Seq[Token],
    reps: int = 5,
    warmup: int = 1,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> Measurement:
    """Time ``reps`` parses after ``warmup`` discarded ones.  A tripped
    depth guard ends the measurement and is recorded, not raised."""
    ensure_analysed(s)
    tokens = list(tokens)
    m = Measurement(engine, len(tokens))
    enabled = gc.isenabled()
    try:
        for i in range(warmup + reps):
            gc.collect()
            gc.disable()
            ALLOCATIONS.clear()
            STATS.reset()
            start = time.perf_counter()
            try:
                result = _run(engine, s, tokens, depth_limit)
            except DepthLimitExceeded as e:
                m.overflow = str(e)
                return m
            elapsed = (time.perf_counter() - start) * 1000.0
            if enabled:
                gc.enable()
            if not isinstance(result, Parsed):
                raise ValueError(f"benchmark input rejected: {result!r}")
            if i >= warmup:
                m.millis.append(elapsed)
            m.allocations = dict(ALLOCATIONS)
            m.layers = STATS.snapshot()
    finally:
        if enabled:
            gc.enable()
    return m


# ---------------------------------------------------------------------------
# Random grammars


def _identity(v):
    return v


def _same(v) -> list:
    return [v]


def _pair_inverse(v) -> list:
    return [v] if type(v) is tuple and len(v) == 2 else []


def random_grammar(
    rng: random.Random,
    nodes: int,
    kinds: Seq[Kind],
    idents: int = 2,
) -> Syntax:
    """A random syntax with about ``nodes`` nodes over ``kinds`` and
    ``idents`` identifiers, the first of which is returned.  All values share
    one tag so any two subterms can be combined."""
    return _random_vars(rng, nodes, kinds, idents)[0]


def random_environment(
    rng: random.Random,
    nodes: int,
    kinds: Seq[Kind],
    idents: int = 2,
) -> Environment:
    """Like :func:`random_grammar`, with every identifier as a root, so all
    generated nodes belong to the environment."""
    return Environment(_random_vars(rng, nodes, kinds, idents))


def _random_vars(rng: random.Random, nodes: int, kinds: Seq[Kind], idents: int) -> list[Var]:
    g = Grammar()
    names = [g.var(f"r{i}", ANY) for i in range(max(1, idents))]

    def leaf() -> Syntax:
        roll = rng.random()
        if roll < 0.5:
            return Elem(rng.choice(kinds)).map(_identity, ANY, _same, "any")
        if roll < 0.75:
            return rng.choice(names)
        if roll < 0.95:
            return Epsilon(rng.randrange(3), ANY)
        return Failure(ANY)

    def build(size: int) -> Syntax:
        if size <= 2:
            return leaf()
        left = rng.randrange(1, size - 1)
        if rng.random() < 0.5:
            return Disjunction(build(left), build(size - 1 - left))
        return Sequence(build(left), build(size - 2 - left) if size - 2 - left > 0 else leaf()).map(
            _identity, ANY, _pair_inverse, "pair"
        )

    share = max(1, (nodes - len(names)) // len(names))
    for v in names:
        g.define(v, build(share))
    g.freeze(*names)
    return names
