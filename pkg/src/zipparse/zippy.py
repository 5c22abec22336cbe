"""Zipper-based LL(1) parsing.

A parse state is a focused syntax: a focal node plus a stack of layers that
record how to rebuild the surrounding syntax.  Each token first moves the
focus outwards (``locate``) until the focal node can start with the token's
kind, then dives into the focal node (``pierce``) down to the matching
``Elem``.  The focal node becomes an ``Epsilon`` holding the token.

Pierce results depend only on the node and the kind, so they are memoised
on the node as ready-made layer segments; contexts are persistent chunked
stacks that share those segments.  Only ``Epsilon`` nodes are constructed
while parsing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional, Union

from .analysis import conflicts, ensure_analysed, is_ll1
from .syntax import (
    TOKEN,
    Disjunction,
    Elem,
    Epsilon,
    GrammarError,
    Kind,
    Map,
    PairTag,
    Sequence,
    Syntax,
    Token,
    Transform,
    TypeTag,
    Var,
)

__all__ = [
    "Apply",
    "Prepend",
    "FollowBy",
    "Context",
    "FocusedSyntax",
    "Parsed",
    "UnexpectedToken",
    "UnexpectedEnd",
    "ParseResult",
    "NotLL1Error",
    "TransformError",
    "STATS",
    "focus",
    "unfocus",
    "plug",
    "locate",
    "pierce",
    "derive",
    "result",
    "parse",
]


class NotLL1Error(GrammarError):
    def __init__(self, reports: list):
        self.conflicts = reports
        detail = "; ".join(str(r) for r in reports[:3])
        super().__init__(f"grammar is not LL(1): {detail}")


class TransformError(RuntimeError):
    """A user transform raised while a value was being built."""

    def __init__(self, name: str, cause: BaseException, position: Optional[int] = None):
        self.name = name
        self.cause = cause
        self.position = position
        super().__init__(f"transform {name!r} failed: {cause!r}")

    def __str__(self) -> str:
        at = f" at token {self.position}" if self.position is not None else ""
        return f"transform {self.name!r} failed{at}: {self.cause!r}"


# ---------------------------------------------------------------------------
# Layers


@dataclass(slots=True)
class Apply:
    transform: Transform

    @property
    def above(self) -> TypeTag:
        return self.transform.source

    @property
    def below(self) -> TypeTag:
        return self.transform.target


@dataclass(slots=True)
class Prepend:
    """A finished left value waiting for the value of the focus."""

    value: Any
    value_tag: TypeTag
    above: TypeTag

    @property
    def below(self) -> TypeTag:
        return PairTag(self.value_tag, self.above)


@dataclass(slots=True)
class FollowBy:
    """A right-hand syntax still to be parsed after the focus."""

    syntax: Syntax
    above: TypeTag

    @property
    def below(self) -> TypeTag:
        return PairTag(self.above, self.syntax.tag)


Layer = Union[Apply, Prepend, FollowBy]


class ParseStats:
    """Aggregate layer accounting.  Segments are shared between contexts, so
    layers are counted when pushed rather than flagged individually."""

    __slots__ = ("pierce_layers", "plug_created", "plug_visits", "tokens")

    def __init__(self) -> None:
        self.reset()

    def reset(self) -> None:
        self.pierce_layers = 0
        self.plug_created = 0
        self.plug_visits = 0
        self.tokens = 0

    def snapshot(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in self.__slots__}


STATS = ParseStats()


# A raw context is None or (segment, n, below): the top n layers of segment
# (stored bottom to top) sit on top of the raw context below.


def _iter_layers(chunk) -> Iterator[Layer]:
    while chunk is not None:
        seg, n, chunk = chunk
        for i in range(n - 1, -1, -1):
            yield seg[i]


class Context:
    """Immutable layer stack; iteration goes from the top (innermost) down."""

    __slots__ = ("_chunk",)

    def __init__(self, layers: Iterable[Layer] = ()):
        chunk = None
        for layer in reversed(list(layers)):
            chunk = ((layer,), 1, chunk)
        self._chunk = chunk

    @classmethod
    def _wrap(cls, chunk) -> "Context":
        c = object.__new__(cls)
        c._chunk = chunk
        return c

    def __iter__(self) -> Iterator[Layer]:
        return _iter_layers(self._chunk)

    def __len__(self) -> int:
        n = 0
        chunk = self._chunk
        while chunk is not None:
            n += chunk[1]
            chunk = chunk[2]
        return n

    def __bool__(self) -> bool:
        return self._chunk is not None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Context) and list(self) == list(other)

    def push(self, layer: Layer) -> "Context":
        return Context._wrap(((layer,), 1, self._chunk))

    def pop(self) -> tuple[Layer, "Context"]:
        if self._chunk is None:
            raise IndexError("pop from empty context")
        seg, n, below = self._chunk
        return seg[n - 1], Context._wrap((seg, n - 1, below) if n > 1 else below)

    def __repr__(self) -> str:
        return f"Context({list(self)!r})"


# ---------------------------------------------------------------------------
# Core operations on raw contexts


def _plug(value: Any, chunk, tag: TypeTag):
    stats = STATS
    while chunk is not None:
        seg, n, below = chunk
        layer = seg[n - 1]
        chunk = (seg, n - 1, below) if n > 1 else below
        stats.plug_visits += 1
        t = type(layer)
        if t is Apply:
            tr = layer.transform
            try:
                value = tr.forward(value)
            except Exception as e:
                raise TransformError(tr.name, e) from e
        elif t is Prepend:
            value = (layer.value, value)
        else:
            stats.plug_created += 1
            right = layer.syntax
            return right, ((Prepend(value, layer.above, right.tag),), 1, chunk)
    return Epsilon(value, tag), None


def _locate(bit: int, focal: Syntax, chunk, tag: TypeTag):
    while True:
        if type(focal) is Epsilon:
            value = focal.value
        else:
            c = focal.cell
            if c.first & bit:
                return focal, chunk
            n = c.nullable
            if n is None:
                return None
            value = n.get()
        if chunk is None:
            return None
        focal, chunk = _plug(value, chunk, tag)


def _segment(kind: Kind, s: Syntax) -> tuple:
    bit = kind.bit
    layers: list = []
    node = s
    while True:
        t = type(node)
        if t is Elem:
            break
        if t is Disjunction:
            node = node.left if node.left.cell.first & bit else node.right
        elif t is Sequence:
            left = node.left
            lc = left.cell
            if lc.nullable is None or lc.first & bit:
                layers.append(FollowBy(node.right, left.tag))
                node = left
            else:
                right = node.right
                layers.append(Prepend(lc.nullable.get(), left.tag, right.tag))
                node = right
        elif t is Map:
            layers.append(Apply(node.transform))
            node = node.inner
        elif t is Var:
            node = node.definition
        else:
            raise ValueError(f"cannot pierce {type(node).__name__} with {kind.name}")
    return tuple(layers)


def _pierce(kind: Kind, s: Syntax, chunk):
    memo = s._pierce
    if memo is None:
        memo = s._pierce = {}
    seg = memo.get(kind)
    if seg is None:
        if not s.cell.first & kind.bit:
            raise ValueError(f"{kind.name} is not in the first set of the focus")
        seg = memo[kind] = _segment(kind, s)
    n = len(seg)
    STATS.pierce_layers += n
    return (seg, n, chunk) if n else chunk


def _result(focal: Syntax, chunk, tag: TypeTag):
    """(True, value) if the focused syntax accepts the empty remainder."""
    while True:
        if type(focal) is Epsilon:
            value = focal.value
        else:
            n = focal.cell.nullable
            if n is None:
                return False, None
            value = n.get()
        if chunk is None:
            return True, value
        focal, chunk = _plug(value, chunk, tag)


# ---------------------------------------------------------------------------
# Public API


class FocusedSyntax:
    """A focal node in a context.  ``tag`` is the tag of the whole syntax."""

    __slots__ = ("focal", "_chunk", "tag")

    def __init__(self, focal: Syntax, context: Optional[Context] = None, tag: Optional[TypeTag] = None):
        self.focal = focal
        self._chunk = context._chunk if context is not None else None
        if tag is None:
            tag = focal.tag
            for layer in _iter_layers(self._chunk):
                tag = layer.below
        self.tag = tag

    @classmethod
    def _raw(cls, focal: Syntax, chunk, tag: TypeTag) -> "FocusedSyntax":
        fs = object.__new__(cls)
        fs.focal = focal
        fs._chunk = chunk
        fs.tag = tag
        return fs

    @property
    def context(self) -> Context:
        return Context._wrap(self._chunk)

    def first_bits(self) -> int:
        focal = self.focal
        if type(focal) is Epsilon:
            bits = 0
        else:
            c = focal.cell
            bits = c.first
            if c.nullable is None:
                return bits
        for layer in _iter_layers(self._chunk):
            if type(layer) is FollowBy:
                sc = layer.syntax.cell
                bits |= sc.first
                if sc.nullable is None:
                    break
        return bits

    def first(self) -> frozenset[Kind]:
        """Kinds that may come next."""
        return frozenset(Kind.from_bits(self.first_bits()))

    def accepts_empty(self) -> bool:
        focal = self.focal
        if type(focal) is not Epsilon and focal.cell.nullable is None:
            return False
        for layer in _iter_layers(self._chunk):
            if type(layer) is FollowBy and layer.syntax.cell.nullable is None:
                return False
        return True

    def derive(self, token: Token) -> Optional["FocusedSyntax"]:
        kind = token.kind
        loc = _locate(kind.bit, self.focal, self._chunk, self.tag)
        if loc is None:
            return None
        focal, chunk = loc
        return FocusedSyntax._raw(Epsilon(token, TOKEN), _pierce(kind, focal, chunk), self.tag)

    def result(self, default: Any = None) -> Any:
        ok, value = _result(self.focal, self._chunk, self.tag)
        return value if ok else default

    def parse(self, tokens: Iterable[Token], start: int = 0) -> "ParseResult":
        """Feed tokens one at a time.  Stops right after an offending token;
        ``start`` offsets the reported positions when resuming."""
        focal, chunk, tag = self.focal, self._chunk, self.tag
        stats = STATS
        i = start - 1
        try:
            for i, token in enumerate(tokens, start):
                kind = token.kind
                bit = kind.bit
                before = focal, chunk
                # locate, inlined; a failure reports the state before it
                while True:
                    if type(focal) is Epsilon:
                        value = focal.value
                    else:
                        c = focal.cell
                        if c.first & bit:
                            break
                        n = c.nullable
                        if n is None:
                            return UnexpectedToken(token, FocusedSyntax._raw(*before, tag), i)
                        value = n.get()
                    if chunk is None:
                        return UnexpectedToken(token, FocusedSyntax._raw(*before, tag), i)
                    focal, chunk = _plug(value, chunk, tag)
                chunk = _pierce(kind, focal, chunk)
                focal = Epsilon(token, TOKEN)
                stats.tokens += 1
            rest = FocusedSyntax._raw(focal, chunk, tag)
            ok, value = _result(focal, chunk, tag)
        except TransformError as e:
            e.position = i
            raise
        if ok:
            return Parsed(value, rest)
        return UnexpectedEnd(rest)

    def unfocus(self) -> Syntax:
        node = self.focal
        for layer in _iter_layers(self._chunk):
            t = type(layer)
            if t is Apply:
                node = Map(layer.transform, node)
            elif t is Prepend:
                node = Sequence(Epsilon(layer.value, layer.value_tag), node)
            else:
                node = Sequence(node, layer.syntax)
        return node

    def check_tags(self) -> bool:
        """Every layer's expected input tag matches what sits above it."""
        tag = self.focal.tag
        for layer in _iter_layers(self._chunk):
            if layer.above != tag:
                return False
            tag = layer.below
        return tag == self.tag

    def __repr__(self) -> str:
        return f"FocusedSyntax({self.focal!r}, {len(self.context)} layers)"


@dataclass
class Parsed:
    value: Any
    rest: FocusedSyntax

    ok = True


@dataclass
class UnexpectedToken:
    token: Token
    rest: FocusedSyntax
    position: int

    ok = False

    @property
    def expected(self) -> frozenset[Kind]:
        return self.rest.first()


@dataclass
class UnexpectedEnd:
    rest: FocusedSyntax

    ok = False

    @property
    def expected(self) -> frozenset[Kind]:
        return self.rest.first()


ParseResult = Union[Parsed, UnexpectedToken, UnexpectedEnd]


def focus(s: Syntax, check: bool = True) -> FocusedSyntax:
    """The initial state for ``s``; refuses non-LL(1) syntaxes by default."""
    ensure_analysed(s)
    if check and not is_ll1(s):
        raise NotLL1Error(conflicts(s))
    return FocusedSyntax._raw(s, None, s.tag)


def unfocus(fs: FocusedSyntax) -> Syntax:
    return fs.unfocus()


def plug(value: Any, context: Context, tag: TypeTag) -> tuple[Syntax, Context]:
    focal, chunk = _plug(value, context._chunk, tag)
    return focal, Context._wrap(chunk)


def locate(kind: Kind, fs: FocusedSyntax) -> Optional[FocusedSyntax]:
    loc = _locate(kind.bit, fs.focal, fs._chunk, fs.tag)
    if loc is None:
        return None
    return FocusedSyntax._raw(loc[0], loc[1], fs.tag)


def pierce(kind: Kind, s: Syntax, context: Context) -> Context:
    """Layers from ``s`` down to an ``Elem`` of ``kind``, on top of ``context``.
    Requires ``kind`` in the first set of ``s``."""
    return Context._wrap(_pierce(kind, s, context._chunk))


def derive(token: Token, fs: FocusedSyntax) -> Optional[FocusedSyntax]:
    return fs.derive(token)


def result(fs: FocusedSyntax, default: Any = None) -> Any:
    return fs.result(default)


def parse(s: Syntax, tokens: Iterable[Token]) -> ParseResult:
    return focus(s).parse(tokens)
