"""Tokens, kinds, type tags and the seven syntax constructors.

A syntax is an immutable tree (or graph, through variables) describing both a
language of token sequences and the value computed for each accepted
sequence.  Nodes carry a :class:`TypeTag` checked at construction time; the
values themselves are plain Python objects (tokens, pairs as 2-tuples, user
data).

Build recursive grammars through a :class:`Grammar` namespace::

    g = Grammar()
    x = g.var("x", INT)
    g.define(x, (Elem(A) + x + Elem(B)).map(succ, INT) | Epsilon(0))
    env = g.freeze(x)
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .cells import epsilon_cell

__all__ = [
    "Kind",
    "Token",
    "TypeTag",
    "Tag",
    "PairTag",
    "TOKEN",
    "tag_of",
    "conforms",
    "Transform",
    "Syntax",
    "Elem",
    "Failure",
    "Epsilon",
    "Disjunction",
    "Sequence",
    "Map",
    "Var",
    "Grammar",
    "Environment",
    "GrammarError",
    "TagMismatch",
    "ALLOCATIONS",
    "children",
    "walk",
]


class GrammarError(ValueError):
    """Raised for malformed grammars: duplicate or missing definitions, etc."""


class TagMismatch(GrammarError, TypeError):
    def __init__(self, message: str, expected: "TypeTag", actual: "TypeTag"):
        super().__init__(f"{message}: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


# ---------------------------------------------------------------------------
# Kinds and tokens


class Kind:
    """A token kind.  Kinds are interned by name and each owns one bit, so
    kind sets are plain integers."""

    __slots__ = ("name", "index", "bit")

    _registry: dict[str, "Kind"] = {}
    _by_index: list["Kind"] = []

    def __new__(cls, name: str) -> "Kind":
        kind = cls._registry.get(name)
        if kind is None:
            kind = object.__new__(cls)
            kind.name = name
            kind.index = len(cls._by_index)
            kind.bit = 1 << kind.index
            cls._registry[name] = kind
            cls._by_index.append(kind)
        return kind

    def __reduce__(self):
        return (Kind, (self.name,))

    def __repr__(self) -> str:
        return f"Kind({self.name!r})"

    def __str__(self) -> str:
        return self.name

    def __lt__(self, other: "Kind") -> bool:
        return self.index < other.index

    @classmethod
    def from_bits(cls, bits: int) -> list["Kind"]:
        """Kinds of a bitset, in creation order."""
        out = []
        while bits:
            low = bits & -bits
            out.append(cls._by_index[low.bit_length() - 1])
            bits ^= low
        return out

    @staticmethod
    def to_bits(kinds: Iterable["Kind"]) -> int:
        bits = 0
        for k in kinds:
            bits |= k.bit
        return bits


@dataclass(frozen=True)
class Token:
    kind: Kind
    value: Any = None

    def __repr__(self) -> str:
        return f"{self.value!r}:{self.kind.name}"


# ---------------------------------------------------------------------------
# Type tags


class TypeTag:
    """Base of the runtime type tags."""

    __slots__ = ()


@dataclass(frozen=True)
class Tag(TypeTag):
    """An atomic tag.  ``pytype`` is only used by :func:`conforms`."""

    name: str
    pytype: Optional[type] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PairTag(TypeTag):
    left: TypeTag
    right: TypeTag

    def __str__(self) -> str:
        return f"({self.left}, {self.right})"


TOKEN = Tag("Token", Token)


def tag_of(value: Any) -> TypeTag:
    """Infer a tag from a value: tokens, 2-tuples as pairs, else the Python
    type name."""
    if isinstance(value, Token):
        return TOKEN
    if type(value) is tuple and len(value) == 2:
        return PairTag(tag_of(value[0]), tag_of(value[1]))
    return Tag(type(value).__name__, type(value))


def conforms(value: Any, tag: TypeTag) -> bool:
    if isinstance(tag, PairTag):
        return (
            type(value) is tuple
            and len(value) == 2
            and conforms(value[0], tag.left)
            and conforms(value[1], tag.right)
        )
    if tag.pytype is None:
        return True
    return isinstance(value, tag.pytype)


class Transform:
    """A total function between tagged values, with an optional local inverse.

    ``inverse(y)`` returns a finite list of candidate inputs ``w`` with
    ``forward(w) == y``; it is only used for pretty printing.
    """

    __slots__ = ("forward", "source", "target", "inverse", "name")

    def __init__(
        self,
        forward: Callable[[Any], Any],
        source: TypeTag,
        target: TypeTag,
        inverse: Optional[Callable[[Any], list]] = None,
        name: Optional[str] = None,
    ):
        self.forward = forward
        self.source = source
        self.target = target
        self.inverse = inverse
        self.name = name or getattr(forward, "__name__", "f")

    def __call__(self, value: Any) -> Any:
        return self.forward(value)

    def __repr__(self) -> str:
        return f"<Transform {self.name}: {self.source} -> {self.target}>"


# ---------------------------------------------------------------------------
# Syntax nodes

# Constructions per node class; the zippy parser is checked against this.
ALLOCATIONS: Counter = Counter()


class Syntax:
    """Base class of syntax nodes.

    ``cell`` holds the analysis results once the node has been analysed
    (see :mod:`zipparse.analysis`); ``nid`` is the preorder id given by the
    first environment that froze the node.
    """

    __slots__ = ("tag", "cell", "nid", "_pierce", "__weakref__")

    def __init__(self, tag: TypeTag):
        self.tag = tag
        self.cell = None
        self.nid = -1
        self._pierce = None
        ALLOCATIONS[type(self).__name__] += 1

    # combinator sugar
    def __or__(self, other: "Syntax") -> "Disjunction":
        return Disjunction(self, other)

    def __add__(self, other: "Syntax") -> "Sequence":
        return Sequence(self, other)

    def map(
        self,
        fn: Callable[[Any], Any],
        target: Optional[TypeTag] = None,
        inverse: Optional[Callable[[Any], list]] = None,
        name: Optional[str] = None,
    ) -> "Map":
        return Map(Transform(fn, self.tag, target or self.tag, inverse, name), self)

    def __repr__(self) -> str:
        return show(self)


class Elem(Syntax):
    __slots__ = ("kind",)

    def __init__(self, kind: Kind):
        super().__init__(TOKEN)
        self.kind = kind


class Failure(Syntax):
    __slots__ = ()


class Epsilon(Syntax):
    """The empty sequence with a fixed value.  Its analysis cell follows
    directly from the axioms and is built on first access."""

    __slots__ = ("value", "_cell")

    def __init__(self, value: Any, tag: Optional[TypeTag] = None):
        self._cell = None
        super().__init__(tag if tag is not None else tag_of(value))
        self.value = value

    @property
    def cell(self):
        c = self._cell
        if c is None:
            c = self._cell = epsilon_cell(self.value)
        return c

    @cell.setter
    def cell(self, value) -> None:
        if value is not None:
            self._cell = value


class Disjunction(Syntax):
    __slots__ = ("left", "right")

    def __init__(self, left: Syntax, right: Syntax):
        if left.tag != right.tag:
            raise TagMismatch(
                "disjunction branches must share a tag (left vs right)",
                left.tag,
                right.tag,
            )
        super().__init__(left.tag)
        self.left = left
        self.right = right


class Sequence(Syntax):
    __slots__ = ("left", "right")

    def __init__(self, left: Syntax, right: Syntax, tag: Optional[TypeTag] = None):
        super().__init__(tag if tag is not None else PairTag(left.tag, right.tag))
        self.left = left
        self.right = right


class Map(Syntax):
    __slots__ = ("transform", "inner")

    def __init__(self, transform: Transform, inner: Syntax):
        if transform.source is not inner.tag and transform.source != inner.tag:
            raise TagMismatch(
                f"map {transform.name!r} input tag vs inner syntax tag",
                transform.source,
                inner.tag,
            )
        super().__init__(transform.target)
        self.transform = transform
        self.inner = inner


_anonymous = itertools.count()


class Var(Syntax):
    """A reference to a named definition.  The definition is stored in the
    node itself once :meth:`Grammar.define` (or :meth:`define`) is called."""

    __slots__ = ("name", "definition")

    def __init__(self, name: Optional[str], tag: TypeTag):
        super().__init__(tag)
        self.name = name if name is not None else f"_v{next(_anonymous)}"
        self.definition: Optional[Syntax] = None

    def define(self, syntax: Syntax) -> "Var":
        if self.definition is not None:
            raise GrammarError(f"duplicate definition of {self.name!r}")
        if syntax.tag != self.tag:
            raise TagMismatch(f"definition of {self.name!r}", self.tag, syntax.tag)
        self.definition = syntax
        return self


def children(node: Syntax) -> tuple:
    t = type(node)
    if t is Disjunction or t is Sequence:
        return (node.left, node.right)
    if t is Map:
        return (node.inner,)
    if t is Var:
        return (node.definition,) if node.definition is not None else ()
    return ()


def walk(roots: Iterable[Syntax]) -> Iterator[Syntax]:
    """Preorder traversal of every node reachable from ``roots``, each once."""
    seen: set[int] = set()
    stack = list(reversed(list(roots)))
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(reversed(children(node)))


def show(node: Syntax, depth: int = 3) -> str:
    t = type(node)
    if t is Elem:
        return f"elem({node.kind.name})"
    if t is Epsilon:
        return f"eps({node.value!r})"
    if t is Failure:
        return "fail"
    if t is Var:
        return f"var({node.name})"
    if depth == 0:
        return "..."
    if t is Disjunction:
        return f"disj({show(node.left, depth - 1)}, {show(node.right, depth - 1)})"
    if t is Sequence:
        return f"seq({show(node.left, depth - 1)}, {show(node.right, depth - 1)})"
    return f"map({node.transform.name}, {show(node.inner, depth - 1)})"


# ---------------------------------------------------------------------------
# Grammars and environments


class Grammar:
    """A namespace of named variables, used to build recursive syntaxes."""

    def __init__(self) -> None:
        self.vars: dict[str, Var] = {}

    def var(self, name: str, tag: TypeTag) -> Var:
        existing = self.vars.get(name)
        if existing is not None:
            if existing.tag != tag:
                raise TagMismatch(f"redeclaration of {name!r}", existing.tag, tag)
            return existing
        v = self.vars[name] = Var(name, tag)
        return v

    def define(self, var: "Var | str", syntax: Syntax) -> Var:
        if isinstance(var, str):
            if var not in self.vars:
                self.var(var, syntax.tag)
            var = self.vars[var]
        return var.define(syntax)

    def freeze(self, *roots: Syntax, samples: Optional[dict] = None) -> "Environment":
        if not roots:
            roots = tuple(self.vars.values())
        return Environment(roots, samples)


class Environment:
    """The frozen closure of a set of root syntaxes.

    Holds the reachable nodes in preorder, the variable bindings, the kinds
    used by the grammar and one sample token per kind.
    """

    def __init__(self, roots: Sequence[Syntax], samples: Optional[dict] = None):
        self.roots = tuple(roots)
        self.nodes: list[Syntax] = []
        self.ids: dict[int, int] = {}
        self.bindings: dict[Var, Syntax] = {}
        kinds = 0
        for node in walk(self.roots):
            t = type(node)
            if t is Var:
                if node.definition is None:
                    raise GrammarError(f"unbound identifier {node.name!r}")
                self.bindings[node] = node.definition
            elif t is Elem:
                kinds |= node.kind.bit
            self.ids[id(node)] = len(self.nodes)
            if node.nid < 0:
                node.nid = len(self.nodes)
            self.nodes.append(node)
        self.kinds: list[Kind] = Kind.from_bits(kinds)
        self.samples: dict[Kind, Token] = {k: Token(k, k.name) for k in self.kinds}
        if samples:
            self.samples.update(samples)

    @property
    def start(self) -> Syntax:
        return self.roots[0]

    def node_id(self, node: Syntax) -> int:
        return self.ids[id(node)]

    def var_named(self, name: str) -> Var:
        for v in self.bindings:
            if v.name == name:
                return v
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.nodes)
