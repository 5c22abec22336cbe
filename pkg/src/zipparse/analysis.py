"""Grammar properties computed with a propagator network.

Each syntax node gets one :class:`Cell` (variables get their own cell, shared
by every occurrence since a variable is a single node).  Cells only move up
their lattices; a FIFO worklist re-evaluates a node whenever one of its
children's cells changes, so the total work is linear in the grammar size
times the number of kinds.

Cells are attached to nodes (``node.cell``) and are final after the
fixpoint; nodes analysed earlier are treated as constants by later networks,
which is how derived syntaxes built during simple parsing are analysed
incrementally.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from .cells import Cell, Lazy, epsilon_cell
from .oracle import Oracle
from .syntax import (
    Disjunction,
    Elem,
    Environment,
    Epsilon,
    Failure,
    Kind,
    Map,
    Sequence,
    Syntax,
    Token,
    Var,
    children,
    walk,
)

__all__ = [
    "AnalysisError",
    "Lazy",
    "Cell",
    "ConflictReport",
    "Network",
    "AnalysisResult",
    "analyse",
    "ensure_analysed",
    "build_network",
    "analyse_new",
    "run_to_fixpoint",
    "productive",
    "nullable_value",
    "is_nullable",
    "first_set",
    "snf_set",
    "is_ll1",
    "conflicts",
    "snf_witness",
    "NULLABLE_NULLABLE",
    "FIRST_FIRST",
    "SNF_FIRST",
]

NULLABLE_NULLABLE = "nullable-nullable"
FIRST_FIRST = "first-first"
SNF_FIRST = "snf-first"


class AnalysisError(RuntimeError):
    """Properties were queried on a node that has not been analysed."""


def _pair(a: Lazy, b: Lazy) -> Lazy:
    return Lazy(lambda: (a.get(), b.get()))


def _apply(f: Callable, a: Lazy) -> Lazy:
    return Lazy(lambda: f(a.get()))


@dataclass(frozen=True)
class ConflictReport:
    category: str
    node: Syntax = field(compare=False)
    witness: Optional[Kind] = None

    def __str__(self) -> str:
        w = f" on {self.witness.name}" if self.witness is not None else ""
        return f"{self.category}{w} at {self.node!r}"


def _lowest(bits: int) -> Kind:
    return Kind.from_bits(bits & -bits)[0]


class Network:
    """Cells for every not-yet-analysed node reachable from ``roots``."""

    def __init__(self, roots: Iterable[Syntax]):
        self.nodes: list[Syntax] = []
        self.parents: dict[int, list[Syntax]] = {}
        self.updates = 0
        # epsilon cells are constant from construction; counted, never queued
        self.constants = 0
        seen: set[int] = set()
        stack = list(reversed(list(roots)))
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if type(node) is Epsilon:
                self.constants += 1
                continue
            if node.cell is not None:
                continue
            if type(node) is Var and node.definition is None:
                raise AnalysisError(f"unbound identifier {node.name!r}")
            node.cell = Cell()
            self.nodes.append(node)
            kids = children(node)
            for kid in kids:
                self.parents.setdefault(id(kid), []).append(node)
            stack.extend(reversed(kids))
        self.worklist: deque[Syntax] = deque()
        for node in self.nodes:
            kids = children(node)
            if not kids or any(k.cell.final for k in kids):
                self._schedule(node)

    def __len__(self) -> int:
        return len(self.nodes) + self.constants

    def _schedule(self, node: Syntax) -> None:
        c = node.cell
        if not c.queued:
            c.queued = True
            self.worklist.append(node)

    def run(self) -> None:
        work = self.worklist
        parents = self.parents
        while work:
            node = work.popleft()
            node.cell.queued = False
            self.updates += 1
            if self._update(node):
                for p in parents.get(id(node), ()):
                    self._schedule(p)
        for node in self.nodes:
            node.cell.final = True

    def _update(self, node: Syntax) -> bool:
        c = node.cell
        t = type(node)
        changed = False
        if t is Elem:
            if not c.productive:
                c.productive = True
                c.first = node.kind.bit
                changed = True
        elif t is Epsilon:
            if not c.productive:
                c.productive = True
                c.nullable = Lazy(value=node.value)
                changed = True
        elif t is Failure:
            pass
        elif t is Disjunction:
            a, b = node.left.cell, node.right.cell
            if not c.productive and (a.productive or b.productive):
                c.productive = changed = True
            if c.nullable is None:
                n = a.nullable if a.nullable is not None else b.nullable
                if n is not None:
                    c.nullable = n
                    changed = True
            first = a.first | b.first
            if first != c.first:
                c.first = first
                changed = True
            snf = a.snf | b.snf
            if b.nullable is not None:
                snf |= a.first
            if a.nullable is not None:
                snf |= b.first
            if snf != c.snf:
                c.snf = snf
                changed = True
            if a.nullable is not None and b.nullable is not None:
                changed |= self._root(node, NULLABLE_NULLABLE, None)
            both = a.first & b.first
            if both:
                changed |= self._root(node, FIRST_FIRST, _lowest(both))
            if c.conflict is None and (a.conflict or b.conflict):
                c.conflict = a.conflict or b.conflict
                changed = True
        elif t is Sequence:
            a, b = node.left.cell, node.right.cell
            if not c.productive and a.productive and b.productive:
                c.productive = changed = True
            if c.nullable is None and a.nullable is not None and b.nullable is not None:
                c.nullable = _pair(a.nullable, b.nullable)
                changed = True
            first = (a.first if b.productive else 0) | (b.first if a.nullable is not None else 0)
            if first != c.first:
                c.first = first
                changed = True
            snf = (a.snf if b.nullable is not None else 0) | (b.snf if a.productive else 0)
            if snf != c.snf:
                c.snf = snf
                changed = True
            clash = a.snf & b.first
            if clash:
                changed |= self._root(node, SNF_FIRST, _lowest(clash))
            if c.conflict is None and (a.conflict or b.conflict):
                c.conflict = a.conflict or b.conflict
                changed = True
        else:
            inner = node.inner.cell if t is Map else node.definition.cell
            if not c.productive and inner.productive:
                c.productive = changed = True
            if c.nullable is None and inner.nullable is not None:
                c.nullable = (
                    _apply(node.transform.forward, inner.nullable) if t is Map else inner.nullable
                )
                changed = True
            if inner.first != c.first:
                c.first = inner.first
                changed = True
            if inner.snf != c.snf:
                c.snf = inner.snf
                changed = True
            if c.conflict is None and inner.conflict is not None:
                c.conflict = inner.conflict
                changed = True
        return changed

    @staticmethod
    def _root(node: Syntax, category: str, witness: Optional[Kind]) -> bool:
        c = node.cell
        if any(r.category == category for r in c.roots):
            return False
        report = ConflictReport(category, node, witness)
        c.roots = c.roots + (report,)
        if c.conflict is None:
            c.conflict = report
        return True


_SPINE = Network(())


def analyse_new(node: Syntax) -> Syntax:
    """Give a freshly built node its cell, assuming its children are final.

    New nodes whose children are all analysed sit on no cycle, so a single
    evaluation of the node's rules is already its fixpoint.
    """
    t = type(node)
    if t is Sequence:
        a, b = node.left.cell, node.right.cell
        c = node.cell = Cell()
        c.productive = a.productive and b.productive
        if a.nullable is not None:
            if b.nullable is not None:
                c.nullable = _pair(a.nullable, b.nullable)
            c.first = (a.first if b.productive else 0) | b.first
        else:
            c.first = a.first if b.productive else 0
        c.snf = (a.snf if b.nullable is not None else 0) | (b.snf if a.productive else 0)
        clash = a.snf & b.first
        if clash:
            _SPINE._root(node, SNF_FIRST, _lowest(clash))
        if c.conflict is None:
            c.conflict = a.conflict or b.conflict
    elif t is Map:
        a = node.inner.cell
        c = node.cell = Cell()
        c.productive = a.productive
        if a.nullable is not None:
            c.nullable = _apply(node.transform.forward, a.nullable)
        c.first = a.first
        c.snf = a.snf
        c.conflict = a.conflict
    else:
        c = node.cell = Cell()
        _SPINE._update(node)
    c.final = True
    return node


def build_network(roots: "Environment | Iterable[Syntax]") -> Network:
    if isinstance(roots, Environment):
        roots = roots.roots
    return Network(roots)


def run_to_fixpoint(net: Network, env: Optional[Environment] = None) -> "AnalysisResult":
    net.run()
    return AnalysisResult(env, net)


def analyse(env: "Environment | Syntax") -> "AnalysisResult":
    """Analyse every node of ``env`` (or reachable from a syntax)."""
    if isinstance(env, Syntax):
        env = Environment([env])
    return run_to_fixpoint(build_network(env), env)


def ensure_analysed(s: Syntax) -> None:
    if s.cell is None or not s.cell.final:
        Network([s]).run()


# ---------------------------------------------------------------------------
# Queries


def _cell(s: Syntax) -> Cell:
    c = s.cell
    if c is None or not c.final:
        raise AnalysisError(f"{s!r} has not been analysed")
    return c


def productive(s: Syntax) -> bool:
    return _cell(s).productive


def is_nullable(s: Syntax) -> bool:
    return _cell(s).nullable is not None


def nullable_value(s: Syntax, default: Any = None) -> Any:
    """The value ``s`` associates with the empty sequence, or ``default``."""
    n = _cell(s).nullable
    return default if n is None else n.get()


def first_set(s: Syntax) -> frozenset[Kind]:
    return frozenset(Kind.from_bits(_cell(s).first))


def snf_set(s: Syntax) -> frozenset[Kind]:
    return frozenset(Kind.from_bits(_cell(s).snf))


def is_ll1(s: Syntax) -> bool:
    return _cell(s).conflict is None


def conflicts(s: Syntax) -> list[ConflictReport]:
    """Root-cause conflicts of every node reachable from ``s``, in preorder."""
    if is_ll1(s):
        return []
    out = []
    for node in walk([s]):
        out.extend(_cell(node).roots)
    return out


def conflict_path(s: Syntax, target: Syntax) -> list[Syntax]:
    """Shortest path of nodes from ``s`` down to ``target``."""
    prev: dict[int, Optional[Syntax]] = {id(s): None}
    queue = deque([s])
    while queue:
        node = queue.popleft()
        if node is target:
            path = [node]
            while prev[id(path[-1])] is not None:
                path.append(prev[id(path[-1])])
            return path[::-1]
        for kid in children(node):
            if id(kid) not in prev:
                prev[id(kid)] = node
                queue.append(kid)
    return []


class AnalysisResult:
    """Results of one fixpoint run, plus derived per-identifier data."""

    def __init__(self, env: Optional[Environment], net: Network):
        self.env = env
        self.updates = net.updates
        self.cells = len(net)
        self._visitable: Optional[dict[Var, frozenset[Var]]] = None

    productive = staticmethod(productive)
    nullable_value = staticmethod(nullable_value)
    is_nullable = staticmethod(is_nullable)
    first_set = staticmethod(first_set)
    snf_set = staticmethod(snf_set)
    is_ll1 = staticmethod(is_ll1)
    conflicts = staticmethod(conflicts)

    def visitable(self) -> dict[Var, frozenset[Var]]:
        if self._visitable is None:
            self._visitable = visitable(self.env)
        return self._visitable

    def is_left_recursive(self, x: Var) -> bool:
        return x in self.visitable()[x]


def visitable(env: Environment) -> dict[Var, frozenset[Var]]:
    """For each identifier ``x``, the identifiers visitable from its
    definition without consuming input."""
    index = {v: i for i, v in enumerate(env.bindings)}
    bits: dict[int, int] = {id(n): 0 for n in env.nodes}
    parents: dict[int, list[Syntax]] = {}
    for node in env.nodes:
        for kid in children(node):
            parents.setdefault(id(kid), []).append(node)
    work = deque(env.nodes)
    queued = {id(n) for n in env.nodes}
    while work:
        node = work.popleft()
        queued.discard(id(node))
        t = type(node)
        if t is Var:
            new = (1 << index[node]) | bits[id(node.definition)]
        elif t is Disjunction:
            new = bits[id(node.left)] | bits[id(node.right)]
        elif t is Sequence:
            new = bits[id(node.left)]
            if _cell(node.left).nullable is not None:
                new |= bits[id(node.right)]
        elif t is Map:
            new = bits[id(node.inner)]
        else:
            new = 0
        if new != bits[id(node)]:
            bits[id(node)] = new
            for p in parents.get(id(node), ()):
                if id(p) not in queued:
                    queued.add(id(p))
                    work.append(p)
    names = list(index)
    out = {}
    for v, d in env.bindings.items():
        b = bits[id(d)]
        out[v] = frozenset(names[i] for i in range(len(names)) if b >> i & 1)
    return out


# ---------------------------------------------------------------------------
# Witnesses


def snf_witness(
    s: Syntax,
    k: Kind,
    bound: int = 6,
    env: Optional[Environment] = None,
    oracle: Optional[Oracle] = None,
) -> Optional[tuple[tuple[Token, ...], Token, tuple[Token, ...]]]:
    """Find ``(ts1, t, ts2)`` with ``s`` matching both ``ts1`` and
    ``ts1 + (t,) + ts2``, ``kind(t) == k``, total length ``<= bound``.

    Returns ``None`` when no witness exists within the bound.
    """
    if k not in snf_set(s):
        raise ValueError(f"{k.name} is not in the should-not-follow set of {s!r}")
    if oracle is None:
        oracle = Oracle(s, env.samples if env is not None else None, values=False)
    lang = oracle.language(bound, s)
    best = None
    for w in lang:
        for cut in range(len(w)):
            if w[cut] is k and w[:cut] in lang:
                key = (len(w), cut, [x.index for x in w])
                if best is None or key < best[0]:
                    best = (key, w, cut)
    if best is None:
        return None
    _, w, cut = best
    toks = tuple(oracle.samples[x] for x in w)
    return toks[:cut], toks[cut], toks[cut + 1 :]
