"""Brute-force reference semantics.

Computes every ``(tokens, value)`` pair a syntax associates, for token
sequences up to a length bound, drawing one sample token per kind.  The
computation is staged by sequence length: entries of length ``n`` depend on
shorter entries (fixed by then) and on same-length entries through
disjunctions, maps, variables and nullable sequence halves, which are
iterated to their least fixpoint.

This is the testing oracle; it shares nothing with the analysis or the
parsers beyond the node classes.
"""

from __future__ import annotations

from typing import Any, Optional

from .syntax import (
    Disjunction,
    Elem,
    Environment,
    Epsilon,
    Kind,
    Map,
    Sequence,
    Syntax,
    Token,
    Var,
    walk,
)

__all__ = ["OracleExplosion", "oracle_matches", "oracle_language", "Oracle"]

_PRESENT = True


class OracleExplosion(RuntimeError):
    """A value set grew past the configured cap (ambiguous grammar)."""


class Oracle:
    """Length-staged match tables for every node reachable from ``root``."""

    def __init__(
        self,
        root: Syntax,
        samples: Optional[dict[Kind, Token]] = None,
        *,
        values: bool = True,
        cap: int = 256,
        max_entries: int = 2_000_000,
    ):
        self.root = root
        self.nodes = list(walk([root]))
        if samples is None:
            samples = {x.kind: Token(x.kind, x.kind.name) for x in self.nodes if type(x) is Elem}
        self.samples = samples
        self.values = values
        self.cap = cap
        self.max_entries = max_entries
        self.entries = 0
        # levels[n][id(node)] -> {tokens: set(values)}
        self.levels: list[dict[int, dict[tuple, set]]] = []

    def extend(self, max_len: int) -> None:
        while len(self.levels) <= max_len:
            self._level(len(self.levels))

    def _add(self, table: dict, key: tuple, vals) -> bool:
        bucket = table.get(key)
        if bucket is None:
            bucket = table[key] = set()
        before = len(bucket)
        bucket.update(vals)
        after = len(bucket)
        if after > self.cap:
            raise OracleExplosion(f"more than {self.cap} values for one sequence")
        if after != before:
            self.entries += after - before
            if self.entries > self.max_entries:
                raise OracleExplosion("oracle table too large")
            return True
        return False

    def _level(self, n: int) -> None:
        levels = self.levels
        cur: dict[int, dict[tuple, set]] = {id(x): {} for x in self.nodes}
        levels.append(cur)
        with_values = self.values
        # contributions that only involve strictly shorter entries
        for x in self.nodes:
            t = type(x)
            if t is Elem:
                if n == 1:
                    tok = self.samples[x.kind]
                    self._add(cur[id(x)], (tok,), (tok if with_values else _PRESENT,))
            elif t is Epsilon:
                if n == 0:
                    self._add(cur[id(x)], (), (x.value if with_values else _PRESENT,))
            elif t is Sequence:
                for i in range(1, n):
                    self._product(
                        cur[id(x)], levels[i][id(x.left)], levels[n - i][id(x.right)]
                    )
        # same-length rules, iterated to the least fixpoint
        changed = True
        while changed:
            changed = False
            for x in self.nodes:
                t = type(x)
                mine = cur[id(x)]
                if t is Disjunction:
                    for src in (cur[id(x.left)], cur[id(x.right)]):
                        for key, vals in list(src.items()):
                            changed |= self._add(mine, key, vals)
                elif t is Var:
                    for key, vals in list(cur[id(x.definition)].items()):
                        changed |= self._add(mine, key, vals)
                elif t is Map:
                    f = x.transform.forward
                    for key, vals in list(cur[id(x.inner)].items()):
                        out = [f(v) for v in vals] if with_values else vals
                        changed |= self._add(mine, key, out)
                elif t is Sequence:
                    left0 = levels[0][id(x.left)]
                    right0 = levels[0][id(x.right)]
                    changed |= self._product(mine, left0, cur[id(x.right)])
                    if n > 0:
                        changed |= self._product(mine, cur[id(x.left)], right0)

    def _product(self, dest: dict, lefts: dict, rights: dict) -> bool:
        changed = False
        if not lefts or not rights:
            return False
        for k1, vs1 in list(lefts.items()):
            for k2, vs2 in list(rights.items()):
                if self.values:
                    vals = [(a, b) for a in list(vs1) for b in list(vs2)]
                else:
                    vals = (_PRESENT,)
                changed |= self._add(dest, k1 + k2, vals)
        return changed

    def table(self, node: Syntax, n: int) -> dict[tuple, set]:
        self.extend(n)
        return self.levels[n][id(node)]

    def matches(self, max_len: int, node: Optional[Syntax] = None) -> set[tuple[tuple, Any]]:
        node = self.root if node is None else node
        self.extend(max_len)
        out = set()
        for n in range(max_len + 1):
            for key, vals in self.levels[n][id(node)].items():
                for v in vals:
                    out.add((key, v))
        return out

    def language(self, max_len: int, node: Optional[Syntax] = None) -> set[tuple[Kind, ...]]:
        node = self.root if node is None else node
        self.extend(max_len)
        out = set()
        for n in range(max_len + 1):
            for key in self.levels[n][id(node)]:
                out.add(tuple(t.kind for t in key))
        return out


def oracle_matches(
    s: Syntax,
    env: Optional[Environment] = None,
    max_len: int = 4,
    cap: int = 256,
) -> set[tuple[tuple[Token, ...], Any]]:
    """Every ``(tokens, value)`` with ``len(tokens) <= max_len`` that ``s``
    associates, with tokens drawn from the per-kind samples of ``env``."""
    samples = env.samples if env is not None else None
    return Oracle(s, samples, cap=cap).matches(max_len)


def oracle_language(
    s: Syntax, env: Optional[Environment] = None, max_len: int = 4
) -> set[tuple[Kind, ...]]:
    """Kind sequences of length ``<= max_len`` recognised by ``s``."""
    samples = env.samples if env is not None else None
    return Oracle(s, samples, values=False).language(max_len)
