"""JSON: token kinds, a lexer, value types and an LL(1) grammar."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Iterator, Union

from .combinators import HOLE, repsep
from .syntax import TOKEN, Disjunction, Elem, Grammar, Kind, Map, PairTag, Sequence, Syntax, Tag, Token, Transform

__all__ = [
    "NULL",
    "BOOLEAN",
    "NUMBER",
    "STRING",
    "separator",
    "JSON_KINDS",
    "JNull",
    "JBool",
    "JNumber",
    "JString",
    "JArray",
    "JObject",
    "JSONValue",
    "JSON_TAG",
    "LexError",
    "lex",
    "iter_tokens",
    "json_grammar",
    "to_python",
]

NULL = Kind("null")
BOOLEAN = Kind("boolean")
NUMBER = Kind("number")
STRING = Kind("string")
_SEPARATORS = {c: Kind(c) for c in "[]{},:"}


def separator(c: str) -> Kind:
    return _SEPARATORS[c]


JSON_KINDS = [NULL, BOOLEAN, NUMBER, STRING] + list(_SEPARATORS.values())


@dataclass(frozen=True)
class JNull:
    pass


@dataclass(frozen=True)
class JBool:
    value: bool


@dataclass(frozen=True)
class JNumber:
    value: Union[int, float]


@dataclass(frozen=True)
class JString:
    value: str


@dataclass(frozen=True)
class JArray:
    items: tuple


@dataclass(frozen=True)
class JObject:
    members: tuple  # (key, value) pairs, in source order


JSONValue = Union[JNull, JBool, JNumber, JString, JArray, JObject]
JSON_TAG = Tag("JSON")


class LexError(ValueError):
    def __init__(self, message: str, offset: int, line: int, col: int):
        self.offset = offset
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


_LEX_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<sep>[\[\]{},:])
  | (?P<string>"(?:[^"\\\x00-\x1f]|\\(?:["\\/bfnrt]|u[0-9a-fA-F]{4}))*")
  | (?P<number>-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<word>true|false|null)
    """,
    re.VERBOSE,
)


def iter_tokens(text: str) -> Iterator[Token]:
    """Tokens of ``text``, produced lazily."""
    pos = 0
    n = len(text)
    match = _LEX_RE.match
    while pos < n:
        m = match(text, pos)
        if m is None or (m.lastgroup == "word" and m.end() < n and (text[m.end()].isalnum() or text[m.end()] == "_")):
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            raise LexError(f"unexpected input {text[pos:pos + 10]!r}", pos, line, col)
        group = m.lastgroup
        lexeme = m.group()
        if group == "sep":
            yield Token(_SEPARATORS[lexeme], lexeme)
        elif group == "string":
            yield Token(STRING, json.loads(lexeme))
        elif group == "number":
            yield Token(NUMBER, float(lexeme) if any(c in lexeme for c in ".eE") else int(lexeme))
        elif group == "word":
            if lexeme == "null":
                yield Token(NULL, None)
            else:
                yield Token(BOOLEAN, lexeme == "true")
        pos = m.end()


def lex(text: str) -> list[Token]:
    return list(iter_tokens(text))


def _only(kind: Kind, value_of, wrap, name: str) -> Map:
    """A single token of ``kind`` wrapped into a JSON value."""

    def inverse(v: Any) -> list:
        if kind is NULL:
            return [Token(NULL, None)] if isinstance(v, JNull) else []
        if type(v) is wrap:
            return [Token(kind, value_of(v))]
        return []

    return Map(Transform(lambda t: wrap(t.value) if kind is not NULL else JNull(), TOKEN, JSON_TAG, inverse, name), Elem(kind))


def _bracketed(open_: str, body: Syntax, close: str) -> Sequence:
    return Sequence(Elem(separator(open_)), Sequence(body, Elem(separator(close))))


def json_grammar() -> Syntax:
    """The start syntax for a JSON value."""
    g = Grammar()
    value = g.var("value", JSON_TAG)
    member = g.var("member", PairTag(TOKEN, JSON_TAG))
    comma = Elem(separator(","))

    items = repsep(value, comma, "array-items")
    array_body = _bracketed("[", items, "]")
    array = Map(
        Transform(
            lambda p: JArray(p[1][0]),
            array_body.tag,
            JSON_TAG,
            lambda v: [(HOLE, (v.items, HOLE))] if isinstance(v, JArray) else [],
            "array",
        ),
        array_body,
    )
    key_value = Sequence(Elem(STRING), Sequence(Elem(separator(":")), value))
    g.define(
        member,
        Map(
            Transform(
                lambda p: (p[0], p[1][1]),
                key_value.tag,
                member.tag,
                lambda m: [(m[0], (HOLE, m[1]))],
                "member",
            ),
            key_value,
        ),
    )
    members = repsep(member, comma, "object-members")
    object_body = _bracketed("{", members, "}")
    obj = Map(
        Transform(
            lambda p: JObject(tuple((k.value, v) for k, v in p[1][0])),
            object_body.tag,
            JSON_TAG,
            lambda v: [(HOLE, (tuple((Token(STRING, k), x) for k, x in v.members), HOLE))]
            if isinstance(v, JObject)
            else [],
            "object",
        ),
        object_body,
    )
    alternatives = [
        _only(NULL, None, JNull, "null"),
        _only(BOOLEAN, lambda v: v.value, JBool, "boolean"),
        _only(NUMBER, lambda v: v.value, JNumber, "number"),
        _only(STRING, lambda v: v.value, JString, "string"),
        array,
        obj,
    ]
    body = alternatives[-1]
    for alt in reversed(alternatives[:-1]):
        body = Disjunction(alt, body)
    g.define(value, body)
    g.freeze(value)
    return value


def to_python(v: JSONValue) -> Any:
    """Plain Python data for a JSON value (iterative, so deep values are fine)."""
    out: list = []
    stack: list = [(v, out, None)]
    while stack:
        node, target, key = stack.pop()
        if isinstance(node, JArray):
            made: Any = []
            stack.extend((x, made, None) for x in reversed(node.items))
        elif isinstance(node, JObject):
            made = {}
            stack.extend((x, made, k) for k, x in reversed(node.members))
        elif isinstance(node, JNull):
            made = None
        else:
            made = node.value
        if isinstance(target, dict):
            target[key] = made
        else:
            target.append(made)
    return out[0]
