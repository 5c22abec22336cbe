"""Derived combinators, expressed with the primitive constructors only.

Repetition introduces a fresh recursive variable per use.  Every transform
built here carries an inverse so that the results can be pretty printed.
Values of dropped syntax (list separators) are restored as :data:`HOLE`,
which the printer fills with any sequence the dropped syntax accepts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence as Seq

from .syntax import (
    TOKEN,
    Disjunction,
    Elem,
    Epsilon,
    Failure,
    Kind,
    Map,
    PairTag,
    Sequence,
    Syntax,
    Tag,
    Token,
    Transform,
    TypeTag,
    Var,
)

__all__ = [
    "HOLE",
    "NIL",
    "list_tag",
    "option_tag",
    "many",
    "many1",
    "repsep",
    "rep1sep",
    "opt",
    "tagged_disjunction",
    "one_of",
    "Level",
    "PREFIX",
    "POSTFIX",
    "INFIX_LEFT",
    "INFIX_RIGHT",
    "operator_table",
]


class _Hole:
    __slots__ = ()

    def __repr__(self) -> str:
        return "HOLE"

    def __reduce__(self):
        return "HOLE"


HOLE = _Hole()
NIL = ()

_fresh = itertools.count()


def _name(prefix: str, name: Optional[str]) -> str:
    return name if name is not None else f"{prefix}#{next(_fresh)}"


def list_tag(tag: TypeTag) -> Tag:
    return Tag(f"List[{tag}]", tuple)


def option_tag(tag: TypeTag) -> Tag:
    return Tag(f"Option[{tag}]")


def _cons_tag(tag: TypeTag) -> Tag:
    return Tag(f"Cons[{tag}]", tuple)


# cons lists are nested pairs (head, tail) ending in NIL


def _cons_to_tuple(cons: tuple) -> tuple:
    out = []
    while cons:
        head, cons = cons
        out.append(head)
    return tuple(out)


def _tuple_to_cons(items: tuple) -> tuple:
    cons: tuple = NIL
    for item in reversed(items):
        cons = (item, cons)
    return cons


def _is_list(v: Any) -> bool:
    return type(v) is tuple


def _cons_var(s: Syntax, name: Optional[str]) -> Var:
    """``x = (s, x) | NIL`` with values as cons lists."""
    ct = _cons_tag(s.tag)
    x = Var(_name("many", name), ct)
    retag = Transform(
        lambda pair: pair,
        PairTag(s.tag, ct),
        ct,
        lambda c: [c] if c != NIL and type(c) is tuple and len(c) == 2 else [],
        "cons",
    )
    x.define(Disjunction(Map(retag, Sequence(s, x)), Epsilon(NIL, ct)))
    return x


def many(s: Syntax, name: Optional[str] = None) -> Map:
    """Zero or more ``s``, as a tuple of values."""
    x = _cons_var(s, name)
    return Map(
        Transform(
            _cons_to_tuple,
            x.tag,
            list_tag(s.tag),
            lambda t: [_tuple_to_cons(t)] if _is_list(t) else [],
            "list",
        ),
        x,
    )


def many1(s: Syntax, name: Optional[str] = None) -> Map:
    """One or more ``s``, as a non-empty tuple."""
    x = _cons_var(s, name)
    pair = Sequence(s, x)
    return Map(
        Transform(
            lambda p: (p[0],) + _cons_to_tuple(p[1]),
            pair.tag,
            list_tag(s.tag),
            lambda t: [(t[0], _tuple_to_cons(t[1:]))] if _is_list(t) and t else [],
            "list1",
        ),
        pair,
    )


def rep1sep(s: Syntax, sep: Syntax, name: Optional[str] = None) -> Map:
    """``s (sep s)*``; separator values are dropped."""
    tail = many(Sequence(sep, s), name)
    pair = Sequence(s, tail)
    return Map(
        Transform(
            lambda p: (p[0],) + tuple(item[1] for item in p[1]),
            pair.tag,
            list_tag(s.tag),
            lambda t: [(t[0], tuple((HOLE, item) for item in t[1:]))] if _is_list(t) and t else [],
            "sep_list1",
        ),
        pair,
    )


def repsep(s: Syntax, sep: Syntax, name: Optional[str] = None) -> Disjunction:
    """Zero or more ``s`` separated by ``sep``; separator values are dropped."""
    return Disjunction(rep1sep(s, sep, name), Epsilon((), list_tag(s.tag)))


def opt(s: Syntax) -> Disjunction:
    """``s`` or nothing; the value is ``None`` when absent."""
    ot = option_tag(s.tag)
    some = Map(Transform(lambda v: v, s.tag, ot, lambda v: [] if v is None else [v], "some"), s)
    return Disjunction(some, Epsilon(None, ot))


def tagged_disjunction(
    alternatives: "Mapping[str, Syntax] | Iterable[tuple[str, Syntax]]",
    tag: Optional[TypeTag] = None,
) -> Syntax:
    """Alternatives whose values are ``(name, value)`` pairs."""
    items = list(alternatives.items() if isinstance(alternatives, Mapping) else alternatives)
    if tag is None:
        tag = Tag("Tagged[" + "|".join(n for n, _ in items) + "]", tuple)
    branches: list[Syntax] = []
    for label, alt in items:
        branches.append(
            Map(
                Transform(
                    lambda v, label=label: (label, v),
                    alt.tag,
                    tag,
                    lambda y, label=label: [y[1]] if type(y) is tuple and len(y) == 2 and y[0] == label else [],
                    f"tag:{label}",
                ),
                alt,
            )
        )
    if not branches:
        return Failure(tag)
    out = branches[-1]
    for b in reversed(branches[:-1]):
        out = Disjunction(b, out)
    return out


def one_of(kinds: Iterable[Kind]) -> Syntax:
    """Any token of the given kinds."""
    elems = [Elem(k) for k in kinds]
    if not elems:
        return Failure(TOKEN)
    out: Syntax = elems[-1]
    for e in reversed(elems[:-1]):
        out = Disjunction(e, out)
    return out


# ---------------------------------------------------------------------------
# Operator tables

PREFIX = "prefix"
POSTFIX = "postfix"
INFIX_LEFT = "infix-left"
INFIX_RIGHT = "infix-right"


def _default_fold(op: Token, *args: Any) -> tuple:
    return (op,) + args


@dataclass
class Level:
    """One precedence level.

    ``fold(op, left, right)`` (infix) or ``fold(op, operand)`` (prefix and
    postfix) builds the value; ``unfold(value)`` lists the ``(op, left,
    right)`` or ``(op, operand)`` decompositions and is only used for
    printing.  Both default to plain tuples.
    """

    ops: Seq[Kind]
    fixity: str
    fold: Optional[Callable[..., Any]] = None
    unfold: Optional[Callable[[Any], list]] = None

    def __post_init__(self) -> None:
        if self.fixity not in (PREFIX, POSTFIX, INFIX_LEFT, INFIX_RIGHT):
            raise ValueError(f"unknown fixity {self.fixity!r}")
        if self.fold is None:
            self.fold = _default_fold
            if self.unfold is None:
                bits = Kind.to_bits(self.ops)
                arity = 3 if self.fixity in (INFIX_LEFT, INFIX_RIGHT) else 2

                def unfold(v: Any) -> list:
                    if (
                        type(v) is tuple
                        and len(v) == arity
                        and isinstance(v[0], Token)
                        and v[0].kind.bit & bits
                    ):
                        return [v]
                    return []

                self.unfold = unfold


def _decompose(level: Level, v: Any) -> list:
    if v is HOLE or level.unfold is None:
        return []
    return list(level.unfold(v))


def _left_chain(level: Level, v: Any) -> list:
    """All ``(first, ((op, x), ...))`` whose left fold is ``v``."""
    out = [(v, ())]
    for op, left, right in _decompose(level, v):
        for first, rest in _left_chain(level, left):
            out.append((first, rest + ((op, right),)))
    return out


def _postfix_chain(level: Level, v: Any) -> list:
    out = [(v, ())]
    for op, inner in _decompose(level, v):
        for first, rest in _postfix_chain(level, inner):
            out.append((first, rest + (op,)))
    return out


def operator_table(
    atom: Syntax, levels: Seq[Level], name: Optional[str] = None
) -> Syntax:
    """Operators over ``atom``, levels ordered from tightest to loosest.

    Each level is wrapped in a named variable so conflicts are reported
    against it.  Left-associative and postfix levels iterate and fold,
    since LL(1) grammars cannot be left-recursive.
    """
    base = name if name is not None else f"ops#{next(_fresh)}"
    tag = atom.tag
    current = atom
    for i, level in enumerate(levels):
        fold = level.fold
        op = one_of(level.ops)
        label = f"{base}.{i}:{level.fixity}[{','.join(k.name for k in level.ops)}]"
        var = Var(label, tag)
        if level.fixity == PREFIX:
            applied = Map(
                Transform(
                    lambda p, fold=fold: fold(p[0], p[1]),
                    PairTag(TOKEN, tag),
                    tag,
                    lambda v, level=level: _decompose(level, v),
                    "prefix",
                ),
                Sequence(op, var),
            )
            var.define(Disjunction(applied, current))
        elif level.fixity == INFIX_RIGHT:
            rest = opt(Sequence(op, var))
            pair = Sequence(current, rest)

            def rfold(p: tuple, fold=fold) -> Any:
                left, tail = p
                return left if tail is None else fold(tail[0], left, tail[1])

            def runfold(v: Any, level=level) -> list:
                out = [(v, None)]
                for o, left, right in _decompose(level, v):
                    out.append((left, (o, right)))
                return out

            var.define(Map(Transform(rfold, pair.tag, tag, runfold, "infix-right"), pair))
        elif level.fixity == INFIX_LEFT:
            pair = Sequence(current, many(Sequence(op, current), f"{label}*"))

            def lfold(p: tuple, fold=fold) -> Any:
                acc, tail = p
                for o, right in tail:
                    acc = fold(o, acc, right)
                return acc

            var.define(
                Map(
                    Transform(lfold, pair.tag, tag, lambda v, level=level: _left_chain(level, v), "infix-left"),
                    pair,
                )
            )
        else:
            pair = Sequence(current, many(op, f"{label}*"))

            def pfold(p: tuple, fold=fold) -> Any:
                acc, ops = p
                for o in ops:
                    acc = fold(o, acc)
                return acc

            var.define(
                Map(
                    Transform(pfold, pair.tag, tag, lambda v, level=level: _postfix_chain(level, v), "postfix"),
                    pair,
                )
            )
        current = var
    return current
