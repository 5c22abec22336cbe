"""Text formats: grammar files, token streams, parse trees and diagnostics.

Grammar files (``#`` starts a comment)::

    file     = { decl } ;
    decl     = "kinds" kind { kind } ";"
             | "start" ident ";"
             | ident "=" expr ";" ;
    kind     = name [ "=" string ] ;          (* optional sample lexeme *)
    expr     = "elem" "(" name ")"
             | "eps" "(" [ ident ] ")"
             | "fail" "(" ")"
             | "seq" "(" expr { "," expr } ")"
             | "disj" "(" expr { "," expr } ")"
             | "var" "(" ident ")"
             | "label" "(" ident "," expr ")"
             | "list-of" "(" expr [ "," expr ] ")" ;
    name     = ident | string ;
    ident    = letter { letter | digit | "_" } ;
    string   = '"' { char | '\\"' | '\\\\' } '"' ;

Every expression has a tree value: ``elem`` gives a leaf holding the token,
``eps(n)`` a unit named ``n``, ``seq`` right-nested pairs, ``label`` a named
wrapper and ``list-of`` a list named after the enclosing rule (separator
values are dropped).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Union

from .analysis import (
    FIRST_FIRST,
    NULLABLE_NULLABLE,
    SNF_FIRST,
    AnalysisResult,
    analyse,
    conflicts,
    is_ll1,
    snf_witness,
)
from .combinators import HOLE, many, repsep
from .oracle import Oracle, OracleExplosion
from .syntax import (
    TOKEN,
    Disjunction,
    Elem,
    Environment,
    Epsilon,
    Failure,
    Grammar,
    GrammarError,
    Kind,
    Map,
    Sequence,
    Syntax,
    Tag,
    Token,
    Transform,
    Var,
    children,
)

__all__ = [
    "FormatError",
    "Expr",
    "GrammarFile",
    "LoadedGrammar",
    "TreeValue",
    "Leaf",
    "Unit",
    "TreePair",
    "Labeled",
    "TreeList",
    "TREE",
    "parse_grammar",
    "dump_grammar",
    "compile_grammar",
    "load_grammar",
    "parse_tokens",
    "load_tokens",
    "format_tokens",
    "emit_tree",
    "parse_tree",
    "emit_diagnostics",
]


class FormatError(GrammarError):
    """A malformed or invalid input file, with a location."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None, path: str = "<input>"):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.path
        if self.line is not None:
            where += f":{self.line}"
            if self.col is not None:
                where += f":{self.col}"
        return f"{where}: {self.message}"


# ---------------------------------------------------------------------------
# Tree values


class TreeValue:
    __slots__ = ()


@dataclass(frozen=True)
class Leaf(TreeValue):
    token: Token


@dataclass(frozen=True)
class Unit(TreeValue):
    name: str


@dataclass(frozen=True)
class TreePair(TreeValue):
    left: TreeValue
    right: TreeValue


@dataclass(frozen=True)
class Labeled(TreeValue):
    name: str
    value: TreeValue


@dataclass(frozen=True)
class TreeList(TreeValue):
    name: str
    items: tuple


TREE = Tag("Tree", TreeValue)


def _members(v: TreeValue) -> list:
    if isinstance(v, Leaf):
        return [("leaf", {"kind": v.token.kind.name, "lexeme": v.token.value})]
    if isinstance(v, Unit):
        return [("unit", v.name)]
    if isinstance(v, TreePair):
        return [("pair", [v.left, v.right])]
    if isinstance(v, Labeled):
        return [("label", v.name), ("value", v.value)]
    if isinstance(v, TreeList):
        return [("list", v.name), ("items", list(v.items))]
    raise TypeError(f"not a tree value: {v!r}")


def emit_tree(v: TreeValue) -> str:
    """The tree as indented JSON (the layout of ``json.dumps(indent=2)``).

    Written with an explicit stack so arbitrarily deep trees are fine.
    """
    out: list[str] = []
    stack: list = [(v, 0)]
    while stack:
        item = stack.pop()
        if type(item) is str:
            out.append(item)
            continue
        node, level = item
        keyed = not isinstance(node, list)
        if isinstance(node, TreeValue):
            node = _members(node)
        elif isinstance(node, dict):
            node = list(node.items())
        elif keyed:
            out.append(json.dumps(node, ensure_ascii=False))
            continue
        if not node:
            out.append("{}" if keyed else "[]")
            continue
        inner = "\n" + "  " * (level + 1)
        parts: list = ["{" if keyed else "["]
        for i, x in enumerate(node):
            parts.append(("," if i else "") + inner + (json.dumps(x[0], ensure_ascii=False) + ": " if keyed else ""))
            parts.append((x[1] if keyed else x, level + 1))
        parts.append("\n" + "  " * level + ("}" if keyed else "]"))
        stack.extend(reversed(parts))
    out.append("\n")
    return "".join(out)


def _tree_from(root: Any) -> TreeValue:
    # post-order with an explicit stack; children are built before parents
    done: dict[int, TreeValue] = {}
    stack = [(root, False)]
    while stack:
        obj, ready = stack.pop()
        if not isinstance(obj, dict) or not obj:
            raise ValueError(f"not a tree object: {obj!r}")
        keys = set(obj)
        if keys == {"leaf"}:
            leaf = obj["leaf"]
            done[id(obj)] = Leaf(Token(Kind(leaf["kind"]), leaf["lexeme"]))
            continue
        if keys == {"unit"}:
            done[id(obj)] = Unit(obj["unit"])
            continue
        if keys == {"pair"} and isinstance(obj["pair"], list) and len(obj["pair"]) == 2:
            kids = obj["pair"]
        elif keys == {"label", "value"}:
            kids = [obj["value"]]
        elif keys == {"list", "items"} and isinstance(obj["items"], list):
            kids = obj["items"]
        else:
            raise ValueError(f"unknown tree object with keys {sorted(obj)}")
        if not ready:
            stack.append((obj, True))
            stack.extend((k, False) for k in reversed(kids))
            continue
        built = [done.pop(id(k)) for k in kids]
        if keys == {"pair"}:
            done[id(obj)] = TreePair(built[0], built[1])
        elif keys == {"label", "value"}:
            done[id(obj)] = Labeled(obj["label"], built[0])
        else:
            done[id(obj)] = TreeList(obj["list"], tuple(built))
    return done[id(root)]


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except RecursionError:
        # the standard decoder recurses once per nesting level
        from .simple import call_with_deep_stack

        return call_with_deep_stack(json.loads, text, depth=text.count("{") + text.count("[") + 1000)


def parse_tree(text: str, path: str = "<input>") -> TreeValue:
    try:
        return _tree_from(_loads(text))
    except (ValueError, KeyError, TypeError) as e:
        raise FormatError(f"bad tree document: {e}", path=path) from e


# ---------------------------------------------------------------------------
# Grammar AST


@dataclass(frozen=True)
class Expr:
    op: str
    args: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class GrammarFile:
    kinds: list  # (name, sample lexeme or None)
    start: Optional[str]
    rules: dict  # name -> Expr, in file order
    start_pos: tuple = field(default=(0, 0), compare=False)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<word>list-of|[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),;=])
    """,
    re.VERBOSE,
)

_OPS = {"elem", "eps", "fail", "seq", "disj", "var", "label", "list-of"}
_KEYWORDS = {"kinds", "start"}


class _Reader:
    def __init__(self, text: str, path: str):
        self.path = path
        self.toks: list[tuple[str, str, int, int]] = []
        pos, line, line_start = 0, 1, 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise FormatError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, path)
            kind = m.lastgroup
            lexeme = m.group()
            if kind != "ws":
                if kind == "string":
                    lexeme = re.sub(r"\\(.)", r"\1", lexeme[1:-1])
                self.toks.append((kind, lexeme, line, pos - line_start + 1))
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
            pos = m.end()
        self.toks.append(("eof", "", line, pos - line_start + 1))
        self.i = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.toks[self.i]

    def next(self) -> tuple[str, str, int, int]:
        tok = self.toks[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def fail(self, message: str, tok: Optional[tuple] = None) -> FormatError:
        tok = tok or self.peek()
        return FormatError(message, tok[2], tok[3], self.path)

    def expect(self, lexeme: str) -> tuple:
        tok = self.next()
        if tok[1] != lexeme or tok[0] not in ("punct", "word"):
            found = "end of file" if tok[0] == "eof" else repr(tok[1])
            raise self.fail(f"expected {lexeme!r}, found {found}", tok)
        return tok

    def ident(self, what: str) -> tuple:
        tok = self.next()
        if tok[0] != "word" or tok[1] in _KEYWORDS:
            raise self.fail(f"expected {what}", tok)
        return tok

    def name(self, what: str) -> tuple:
        tok = self.next()
        if tok[0] not in ("word", "string"):
            raise self.fail(f"expected {what}", tok)
        return tok


def _expr(r: _Reader) -> Expr:
    tok = r.next()
    if tok[0] != "word" or tok[1] not in _OPS:
        raise r.fail("expected one of " + ", ".join(sorted(_OPS)), tok)
    op, line, col = tok[1], tok[2], tok[3]
    r.expect("(")
    args: list = []
    if op == "elem":
        args.append(r.name("kind name")[1])
    elif op == "eps":
        if r.peek()[0] == "word":
            args.append(r.next()[1])
    elif op == "var":
        args.append(r.ident("identifier")[1])
    elif op == "label":
        args.append(r.ident("label name")[1])
        r.expect(",")
        args.append(_expr(r))
    elif op in ("seq", "disj", "list-of"):
        args.append(_expr(r))
        while r.peek()[1] == ",":
            r.next()
            args.append(_expr(r))
        if op == "list-of" and len(args) > 2:
            raise r.fail("list-of takes an element and an optional separator")
    r.expect(")")
    return Expr(op, tuple(args), line, col)


def parse_grammar(text: str, path: str = "<input>") -> GrammarFile:
    """Parse and validate a grammar file."""
    r = _Reader(text, path)
    kinds: list = []
    start = None
    start_pos = (0, 0)
    rules: dict[str, Expr] = {}
    rule_pos: dict[str, tuple] = {}
    while r.peek()[0] != "eof":
        tok = r.peek()
        if tok[0] == "word" and tok[1] == "kinds":
            r.next()
            while r.peek()[1] != ";" or r.peek()[0] != "punct":
                ktok = r.name("kind name")
                sample = None
                if r.peek()[1] == "=" and r.peek()[0] == "punct":
                    r.next()
                    stok = r.next()
                    if stok[0] != "string":
                        raise r.fail("expected a quoted sample lexeme", stok)
                    sample = stok[1]
                if any(k == ktok[1] for k, _ in kinds):
                    raise r.fail(f"kind {ktok[1]!r} declared twice", ktok)
                kinds.append((ktok[1], sample))
            r.expect(";")
        elif tok[0] == "word" and tok[1] == "start":
            r.next()
            if start is not None:
                raise r.fail("start declared twice", tok)
            stok = r.ident("start identifier")
            start, start_pos = stok[1], (stok[2], stok[3])
            r.expect(";")
        else:
            ntok = r.ident("a declaration")
            if ntok[1] in rules:
                raise r.fail(f"rule {ntok[1]!r} defined twice", ntok)
            r.expect("=")
            rules[ntok[1]] = _expr(r)
            rule_pos[ntok[1]] = (ntok[2], ntok[3])
            r.expect(";")
    gf = GrammarFile(kinds, start, rules, start_pos)
    _validate(gf, path)
    return gf


def _validate(gf: GrammarFile, path: str) -> None:
    if gf.start is None:
        raise FormatError("missing start declaration", path=path)
    if gf.start not in gf.rules:
        raise FormatError(f"start rule {gf.start!r} is not defined", *gf.start_pos, path)
    declared = {k for k, _ in gf.kinds}
    labels: set[str] = set()

    def check(e: Expr) -> None:
        if e.op == "elem" and e.args[0] not in declared:
            raise FormatError(f"undeclared kind {e.args[0]!r}", e.line, e.col, path)
        if e.op == "var" and e.args[0] not in gf.rules:
            raise FormatError(f"undefined identifier {e.args[0]!r}", e.line, e.col, path)
        if e.op == "label":
            if e.args[0] in labels:
                raise FormatError(f"label {e.args[0]!r} used twice", e.line, e.col, path)
            labels.add(e.args[0])
        for a in e.args:
            if isinstance(a, Expr):
                check(a)

    for e in gf.rules.values():
        check(e)


def _quote(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) and name not in _KEYWORDS | _OPS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dump_expr(e: Expr) -> str:
    if e.op == "elem":
        return f"elem({_quote(e.args[0])})"
    if e.op in ("eps", "var"):
        return f"{e.op}({''.join(e.args)})"
    if e.op == "fail":
        return "fail()"
    if e.op == "label":
        return f"label({e.args[0]}, {_dump_expr(e.args[1])})"
    return f"{e.op}(" + ", ".join(_dump_expr(a) for a in e.args) + ")"


def dump_grammar(gf: GrammarFile) -> str:
    """Canonical text of a grammar; ``parse_grammar`` reads it back."""
    lines = []
    if gf.kinds:
        parts = []
        for name, sample in gf.kinds:
            q = _quote(name)
            parts.append(q if sample is None else f"{q}={json.dumps(sample, ensure_ascii=False)}")
        lines.append("kinds " + " ".join(parts) + ";")
    if gf.start is not None:
        lines.append(f"start {gf.start};")
    for name, e in gf.rules.items():
        lines.append(f"{name} = {_dump_expr(e)};")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Compilation to syntaxes


def _leaf_inverse(v: Any) -> list:
    if v is HOLE:
        return [HOLE]
    return [v.token] if isinstance(v, Leaf) else []


_LEAF = Transform(Leaf, TOKEN, TREE, _leaf_inverse, "leaf")


def _pair_map(left: Syntax, right: Syntax) -> Map:
    inner = Sequence(left, right)
    return Map(
        Transform(
            lambda p: TreePair(p[0], p[1]),
            inner.tag,
            TREE,
            lambda v: [(v.left, v.right)] if isinstance(v, TreePair) else [],
            "pair",
        ),
        inner,
    )


def _label_map(name: str, inner: Syntax) -> Map:
    return Map(
        Transform(
            lambda v: Labeled(name, v),
            TREE,
            TREE,
            lambda v: [v.value] if isinstance(v, Labeled) and v.name == name else [],
            f"label:{name}",
        ),
        inner,
    )


def _list_map(name: str, inner: Syntax) -> Map:
    return Map(
        Transform(
            lambda items: TreeList(name, items),
            inner.tag,
            TREE,
            lambda v: [v.items] if isinstance(v, TreeList) and v.name == name else [],
            f"list:{name}",
        ),
        inner,
    )


@dataclass
class LoadedGrammar:
    file: GrammarFile
    env: Environment
    start: Var
    rules: dict  # name -> Var
    kinds: list  # Kind, in declaration order

    def kind(self, name: str) -> Kind:
        for k in self.kinds:
            if k.name == name:
                return k
        raise KeyError(name)


def compile_grammar(gf: GrammarFile) -> LoadedGrammar:
    g = Grammar()
    rules = {name: g.var(name, TREE) for name in gf.rules}
    kinds = [Kind(name) for name, _ in gf.kinds]
    samples = {Kind(name): Token(Kind(name), s if s is not None else name) for name, s in gf.kinds}

    def build(e: Expr, rule: str) -> Syntax:
        op = e.op
        if op == "elem":
            return Map(_LEAF, Elem(Kind(e.args[0])))
        if op == "eps":
            return Epsilon(Unit(e.args[0] if e.args else ""), TREE)
        if op == "fail":
            return Failure(TREE)
        if op == "var":
            return rules[e.args[0]]
        if op == "label":
            return _label_map(e.args[0], build(e.args[1], rule))
        if op == "seq":
            parts = [build(a, rule) for a in e.args]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = _pair_map(p, out)
            return out
        if op == "disj":
            parts = [build(a, rule) for a in e.args]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = Disjunction(p, out)
            return out
        # list-of
        item = build(e.args[0], rule)
        if len(e.args) == 2:
            return _list_map(rule, repsep(item, build(e.args[1], rule), f"{rule}.list"))
        return _list_map(rule, many(item, f"{rule}.list"))

    for name, e in gf.rules.items():
        g.define(rules[name], build(e, name))
    start = rules[gf.start]
    roots = [start] + [v for n, v in rules.items() if n != gf.start]
    env = Environment(roots, samples)
    return LoadedGrammar(gf, env, start, rules, kinds)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except UnicodeDecodeError as e:
        raise FormatError(f"not UTF-8 text: {e}", path=path) from e


def load_grammar(path: str) -> LoadedGrammar:
    """Read, validate and compile a grammar file.  I/O errors propagate as
    :class:`OSError`."""
    return compile_grammar(parse_grammar(_read(path), path))


# ---------------------------------------------------------------------------
# Token streams


def parse_tokens(text: str, kinds: Iterable[Kind], path: str = "<input>") -> list[Token]:
    """One ``kind<TAB>lexeme`` per line."""
    known = {k.name: k for k in kinds}
    out = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for n, line in enumerate(lines, 1):
        line = line.rstrip("\r")
        if "\t" not in line:
            raise FormatError("malformed token line (expected kind<TAB>lexeme)", n, None, path)
        name, lexeme = line.split("\t", 1)
        kind = known.get(name)
        if kind is None:
            raise FormatError(f"unknown kind {name!r}", n, None, path)
        out.append(Token(kind, lexeme))
    return out


def load_tokens(path: str, kinds: Iterable[Kind]) -> list[Token]:
    return parse_tokens(_read(path), kinds, path)


def format_tokens(tokens: Iterable[Token]) -> str:
    return "".join(f"{t.kind.name}\t{t.value}\n" for t in tokens)


# ---------------------------------------------------------------------------
# Diagnostics


def _set(kinds: Iterable[Kind]) -> str:
    return "{" + ", ".join(_quote(k.name) for k in kinds) + "}"


def _seq(kinds: Iterable[Kind]) -> str:
    text = " ".join(_quote(k.name) for k in kinds)
    return text if text else "<empty>"


def _owners(loaded: LoadedGrammar) -> dict[int, str]:
    """The rule whose right-hand side contains each node."""
    owner: dict[int, str] = {}
    for name, var in loaded.rules.items():
        stack = [var.definition]
        while stack:
            node = stack.pop()
            if id(node) in owner or type(node) is Var:
                continue
            owner[id(node)] = name
            stack.extend(children(node))
    return owner


def _shortest_from(oracle: Oracle, node: Syntax, kind: Optional[Kind], bound: int) -> Optional[tuple]:
    for n in range(bound + 1):
        found = sorted(
            (tuple(t.kind for t in key) for key in oracle.table(node, n)),
            key=lambda ks: [k.index for k in ks],
        )
        for ks in found:
            if kind is None or (ks and ks[0] is kind):
                return ks
    return None


def _examples(report, bound: int) -> list[str]:
    node = report.node
    try:
        if report.category == NULLABLE_NULLABLE:
            return ["both alternatives accept <empty>"]
        if report.category == FIRST_FIRST:
            oracle = Oracle(node, values=False)
            left = _shortest_from(oracle, node.left, report.witness, bound)
            right = _shortest_from(oracle, node.right, report.witness, bound)
            out = []
            if left is not None:
                out.append(f"left alternative accepts {_seq(left)}")
            if right is not None:
                out.append(f"right alternative accepts {_seq(right)}")
            return out
        if report.category == SNF_FIRST:
            out = []
            w = snf_witness(node.left, report.witness, bound)
            if w is not None:
                ts1, t, ts2 = w
                before = tuple(x.kind for x in ts1)
                out.append(
                    f"left part accepts {_seq(before)} and {_seq(before + (t.kind,) + tuple(x.kind for x in ts2))}"
                )
            oracle = Oracle(node.right, values=False)
            right = _shortest_from(oracle, node.right, report.witness, bound)
            if right is not None:
                out.append(f"right part accepts {_seq(right)}")
            return out
    except OracleExplosion:
        return []
    return []


def emit_diagnostics(loaded: LoadedGrammar, result: Optional[AnalysisResult] = None, bound: int = 6) -> str:
    """Per-rule properties and the conflict list, as stable text."""
    if result is None:
        result = analyse(loaded.env)
    start = loaded.start
    lines = [f"start: {loaded.file.start}", f"ll1: {'true' if is_ll1(start) else 'false'}", "rules:"]
    for name, var in loaded.rules.items():
        c = var.cell
        lines.append(f"  {name}:")
        lines.append(f"    productive({name}) = {'true' if c.productive else 'false'}")
        lines.append(f"    nullable({name}) = {'true' if c.nullable is not None else 'false'}")
        lines.append(f"    first({name}) = {_set(_in_order(loaded, c.first))}")
        lines.append(f"    snf({name}) = {_set(_in_order(loaded, c.snf))}")
        lines.append(f"    left-recursive({name}) = {'true' if result.is_left_recursive(var) else 'false'}")
    owner = _owners(loaded)
    reports = []
    seen = set()
    for var in loaded.rules.values():
        for r in conflicts(var):
            if id(r) not in seen:
                seen.add(id(r))
                reports.append(r)
    if not reports:
        lines.append("conflicts: none")
    else:
        lines.append("conflicts:")
        for r in reports:
            on = f" on {_quote(r.witness.name)}" if r.witness is not None else ""
            lines.append(f"  - {r.category}{on} in rule {owner.get(id(r.node), '?')}")
            lines.append(f"    at: {r.node!r}")
            for ex in _examples(r, bound):
                lines.append(f"    example: {ex}")
    return "\n".join(lines) + "\n"


def _in_order(loaded: LoadedGrammar, bits: int) -> list[Kind]:
    return [k for k in loaded.kinds if k.bit & bits]
