"""Enumeration of accepted kind sequences and inverse-driven pretty printing.

Both produce streams ordered by length; sequences of equal length come out
in lexicographic order of kind rank, where a kind's rank is its position in
the grammar's kind list (declaration order for file grammars, first use in
preorder otherwise).
"""

from __future__ import annotations

from typing import Any, Iterator, Optional, Sequence as Seq

from .analysis import ensure_analysed, is_ll1
from .combinators import HOLE
from .oracle import Oracle
from .syntax import (
    Disjunction,
    Elem,
    Epsilon,
    Failure,
    Kind,
    Map,
    Sequence,
    Syntax,
    Token,
    Var,
    walk,
)
from .zippy import FollowBy, _segment

__all__ = ["MissingInverse", "grammar_kinds", "enumerate_sequences", "pretty_print"]


class MissingInverse(ValueError):
    """Printing needed to invert a transform that has no inverse."""

    def __init__(self, node: Map):
        self.node = node
        super().__init__(f"transform {node.transform.name!r} has no inverse (at {node!r})")


def grammar_kinds(s: Syntax) -> list[Kind]:
    """Kinds used by ``s`` in order of first appearance (preorder)."""
    out: list[Kind] = []
    seen = 0
    for node in walk([s]):
        if type(node) is Elem and not node.kind.bit & seen:
            seen |= node.kind.bit
            out.append(node.kind)
    return out


def _ranker(s: Syntax, kinds: Optional[Seq[Kind]]) -> dict[Kind, int]:
    order = list(kinds) if kinds is not None else []
    for k in grammar_kinds(s):
        if k not in order:
            order.append(k)
    return {k: i for i, k in enumerate(order)}


class _Shapes:
    """The zipper with values erased: a focal node (``None`` once a token has
    been consumed) and the stack of pending right-hand syntaxes.  Stacks are
    interned, so a state is identified by two ids."""

    def __init__(self) -> None:
        self.stacks: dict[tuple, tuple] = {}

    def push(self, syntax: Syntax, below: Optional[tuple]) -> tuple:
        key = (id(syntax), id(below))
        st = self.stacks.get(key)
        if st is None:
            st = self.stacks[key] = (syntax, below)
        return st

    def derive(self, kind: Kind, focal: Optional[Syntax], stack: Optional[tuple]):
        bit = kind.bit
        while focal is None or not focal.cell.first & bit:
            if focal is not None and focal.cell.nullable is None:
                return None
            if stack is None:
                return None
            focal, stack = stack
        seg = _segment_memo(kind, focal)
        for layer in seg:
            if type(layer) is FollowBy:
                stack = self.push(layer.syntax, stack)
        return None, stack

    @staticmethod
    def first_bits(focal: Optional[Syntax], stack: Optional[tuple]) -> int:
        bits = 0
        if focal is not None:
            bits = focal.cell.first
            if focal.cell.nullable is None:
                return bits
        while stack is not None:
            s, stack = stack
            bits |= s.cell.first
            if s.cell.nullable is None:
                break
        return bits

    @staticmethod
    def accepts_empty(focal: Optional[Syntax], stack: Optional[tuple]) -> bool:
        if focal is not None and focal.cell.nullable is None:
            return False
        while stack is not None:
            s, stack = stack
            if s.cell.nullable is None:
                return False
        return True


def _segment_memo(kind: Kind, s: Syntax) -> tuple:
    memo = s._pierce
    if memo is None:
        memo = s._pierce = {}
    seg = memo.get(kind)
    if seg is None:
        seg = memo[kind] = _segment(kind, s)
    return seg


def enumerate_sequences(
    s: Syntax,
    kinds: Optional[Seq[Kind]] = None,
    max_len: Optional[int] = None,
) -> Iterator[tuple[Kind, ...]]:
    """Kind sequences accepted by ``s``, shortest first, without duplicates.

    LL(1) syntaxes are explored breadth first over value-free zipper states,
    merging states that accept the same continuations.  Other syntaxes fall
    back to the length-staged reference tables, bounded by ``max_len``
    (default 12).
    """
    ensure_analysed(s)
    rank = _ranker(s, kinds)
    if not is_ll1(s):
        yield from _enumerate_tables(s, rank, 12 if max_len is None else max_len)
        return
    ordered = sorted(rank, key=rank.__getitem__)
    shapes = _Shapes()
    level: dict[tuple, tuple] = {(id(s), None): (s, None, [()])}
    length = 0
    while level and (max_len is None or length <= max_len):
        done = []
        for focal, stack, prefixes in level.values():
            if shapes.accepts_empty(focal, stack):
                done.extend(prefixes)
        done.sort(key=lambda ks: [rank[k] for k in ks])
        yield from done
        nxt: dict[tuple, tuple] = {}
        for focal, stack, prefixes in level.values():
            bits = shapes.first_bits(focal, stack)
            for k in ordered:
                if not bits & k.bit:
                    continue
                after = shapes.derive(k, focal, stack)
                if after is None:
                    continue
                key = (id(after[0]), id(after[1]))
                extended = [p + (k,) for p in prefixes]
                entry = nxt.get(key)
                if entry is None:
                    nxt[key] = (after[0], after[1], extended)
                else:
                    entry[2].extend(extended)
        level = nxt
        length += 1


def _enumerate_tables(s: Syntax, rank: dict[Kind, int], max_len: int) -> Iterator[tuple[Kind, ...]]:
    oracle = Oracle(s, values=False)
    for n in range(max_len + 1):
        found = {tuple(t.kind for t in key) for key in oracle.table(s, n)}
        yield from sorted(found, key=lambda ks: [rank[k] for k in ks])


# ---------------------------------------------------------------------------
# Pretty printing


class _Printer:
    """Sets of token sequences per (node, value, length).

    Entries computed without meeting an in-progress entry are final; the
    others are approximations, refined by re-running the query until nothing
    changes.
    """

    def __init__(self, samples: dict[Kind, Token]):
        self.samples = samples
        self.final: dict[tuple, frozenset] = {}
        self.approx: dict[tuple, frozenset] = {}
        self.active: set[tuple] = set()
        self.fresh: set[tuple] = set()
        self.changed = False
        self.tainted = False
        # deep values are hashed once per object, not once per lookup
        self.by_id: dict[int, tuple] = {}
        self.numbers: dict[Any, int] = {}

    def _number(self, value: Any) -> int:
        seen = self.by_id.get(id(value))
        if seen is not None and seen[0] is value:
            return seen[1]
        number = self.numbers.setdefault(value, len(self.numbers))
        # holding the value keeps its id from being reused
        self.by_id[id(value)] = (value, number)
        return number

    def get(self, node: Syntax, value: Any, n: int) -> frozenset:
        key = (id(node), self._number(value), n)
        done = self.final.get(key)
        if done is not None:
            return done
        if key in self.active or key in self.fresh:
            self.tainted = True
            return self.approx.get(key, frozenset())
        self.active.add(key)
        outer = self.tainted
        self.tainted = False
        try:
            out = self._compute(node, value, n)
        finally:
            self.active.discard(key)
        old = self.approx.pop(key, frozenset())
        new = old | out
        if new != old:
            self.changed = True
        if self.tainted:
            self.approx[key] = new
            self.fresh.add(key)
        else:
            self.final[key] = new
        self.tainted = self.tainted or outer
        return new

    def _compute(self, node: Syntax, value: Any, n: int) -> frozenset:
        t = type(node)
        if t is Elem:
            if n != 1:
                return frozenset()
            if value is HOLE:
                return frozenset([(self.samples.get(node.kind) or Token(node.kind, node.kind.name),)])
            if isinstance(value, Token) and value.kind is node.kind:
                return frozenset([(value,)])
            return frozenset()
        if t is Epsilon:
            if n == 0 and (value is HOLE or value == node.value):
                return frozenset([()])
            return frozenset()
        if t is Failure:
            return frozenset()
        if t is Disjunction:
            return self.get(node.left, value, n) | self.get(node.right, value, n)
        if t is Var:
            return self.get(node.definition, value, n)
        if t is Map:
            if value is HOLE:
                return self.get(node.inner, HOLE, n)
            inverse = node.transform.inverse
            if inverse is None:
                raise MissingInverse(node)
            out: set = set()
            for w in inverse(value):
                out |= self.get(node.inner, w, n)
            return frozenset(out)
        # Sequence
        if value is HOLE:
            a = b = HOLE
        elif type(value) is tuple and len(value) == 2:
            a, b = value
        else:
            return frozenset()
        out = set()
        for i in range(n + 1):
            lefts = self.get(node.left, a, i)
            if not lefts:
                continue
            rights = self.get(node.right, b, n - i)
            for l in lefts:
                for r in rights:
                    out.add(l + r)
        return frozenset(out)

    def level(self, root: Syntax, value: Any, n: int) -> frozenset:
        while True:
            self.changed = False
            self.tainted = False
            self.fresh.clear()
            out = self.get(root, value, n)
            if not self.changed or not self.approx:
                break
        self.final.update(self.approx)
        self.approx.clear()
        self.fresh.clear()
        return out


def pretty_print(
    s: Syntax,
    value: Any,
    max_len: int = 64,
    samples: Optional[dict[Kind, Token]] = None,
    kinds: Optional[Seq[Kind]] = None,
) -> Iterator[tuple[Token, ...]]:
    """Token sequences that ``s`` maps to ``value``, shortest first.

    Map nodes are inverted with their transforms' inverses; elements whose
    token is not fixed by the value use the per-kind samples.  Stops after
    ``max_len``.
    """
    rank = _ranker(s, kinds)
    printer = _Printer(samples or {})
    for n in range(max_len + 1):
        found = printer.level(s, value, n)
        yield from sorted(found, key=lambda ts: [(rank.get(t.kind, len(rank)), str(t.value)) for t in ts])
