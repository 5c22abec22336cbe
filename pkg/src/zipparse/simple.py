"""Reference LL(1) derivative parser.

Each token rebuilds the path from the root down to the consumed element, so
the residual syntax grows with the input and parsing is quadratic.  The
derivative is recursive; recursion runs on a dedicated thread with a large
stack and is bounded by a configurable depth guard.
"""

from __future__ import annotations

import sys
import threading
from typing import Any, Callable, Iterable, Optional

from .analysis import analyse_new, conflicts, ensure_analysed, is_ll1
from .syntax import TOKEN, Disjunction, Elem, Epsilon, Map, Sequence, Syntax, Token, Var
from .zippy import FocusedSyntax, NotLL1Error, Parsed, ParseResult, UnexpectedEnd, UnexpectedToken

__all__ = [
    "DepthLimitExceeded",
    "DEFAULT_DEPTH_LIMIT",
    "derive_simple",
    "parse_simple",
    "run_simple",
    "call_with_deep_stack",
]

DEFAULT_DEPTH_LIMIT = 50_000
_STACK_BYTES = 512 * 1024 * 1024
_BYTES_PER_FRAME = 2048


class DepthLimitExceeded(RecursionError):
    """The derivative recursed deeper than the configured guard."""

    def __init__(self, limit: int, position: Optional[int] = None):
        self.limit = limit
        self.position = position
        super().__init__(f"derivative recursion exceeded depth {limit}")

    def __str__(self) -> str:
        at = f" at token {self.position}" if self.position is not None else ""
        return f"derivative recursion exceeded depth {self.limit}{at}"


def call_with_deep_stack(fn: Callable[..., Any], *args: Any, depth: int = DEFAULT_DEPTH_LIMIT) -> Any:
    """Run ``fn(*args)`` on a fresh thread whose stack fits ``depth`` frames."""
    box: dict[str, Any] = {}

    def target() -> None:
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, depth + 500))
        try:
            box["value"] = fn(*args)
        except BaseException as e:  # re-raised on the calling thread
            box["error"] = e
        finally:
            sys.setrecursionlimit(old)

    size = max(_STACK_BYTES, (depth + 500) * _BYTES_PER_FRAME)
    previous = threading.stack_size(size)
    try:
        worker = threading.Thread(target=target, name="simple-derive")
        worker.start()
    finally:
        threading.stack_size(previous)
    worker.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


def _derive(t: Token, bit: int, s: Syntax, depth: int, limit: int) -> Syntax:
    if depth > limit:
        raise DepthLimitExceeded(limit)
    tp = type(s)
    if tp is Elem:
        return Epsilon(t, TOKEN)
    if tp is Disjunction:
        branch = s.left if s.left.cell.first & bit else s.right
        return _derive(t, bit, branch, depth + 1, limit)
    if tp is Sequence:
        left = s.left
        n = left.cell.nullable
        if n is not None and s.right.cell.first & bit:
            head = left if type(left) is Epsilon else Epsilon(n.get(), left.tag)
            return analyse_new(Sequence(head, _derive(t, bit, s.right, depth + 1, limit), s.tag))
        return analyse_new(Sequence(_derive(t, bit, left, depth + 1, limit), s.right, s.tag))
    if tp is Map:
        return analyse_new(Map(s.transform, _derive(t, bit, s.inner, depth + 1, limit)))
    if tp is Var:
        return _derive(t, bit, s.definition, depth + 1, limit)
    raise ValueError(f"cannot derive {tp.__name__} by {t.kind.name}")


def derive_simple(t: Token, s: Syntax, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Syntax:
    """The syntax of the suffixes ``s`` accepts after ``t``.

    Requires ``s`` analysed and LL(1), with ``t``'s kind in its first set.
    Runs on the calling thread.
    """
    if not s.cell.first & t.kind.bit:
        raise ValueError(f"{t.kind.name} is not in the first set")
    return _derive(t, t.kind.bit, s, 0, depth_limit)


def _loop(s: Syntax, tokens: Iterable[Token], limit: int) -> ParseResult:
    i = -1
    for i, t in enumerate(tokens):
        bit = t.kind.bit
        if not s.cell.first & bit:
            return UnexpectedToken(t, FocusedSyntax(s), i)
        try:
            s = _derive(t, bit, s, 0, limit)
        except DepthLimitExceeded as e:
            e.position = i
            raise
    n = s.cell.nullable
    if n is None:
        return UnexpectedEnd(FocusedSyntax(s))
    return Parsed(n.get(), FocusedSyntax(s))


def run_simple(
    s: Syntax,
    tokens: Iterable[Token],
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    *,
    thread: bool = True,
) -> ParseResult:
    """Parse with the derivative engine, reporting like the zippy parser.

    Raises :class:`DepthLimitExceeded` when the guard trips.  With
    ``thread=False`` the derivative recurses on the calling thread, which
    only suits short inputs or callers already on a deep stack.
    """
    ensure_analysed(s)
    if not is_ll1(s):
        raise NotLL1Error(conflicts(s))
    if not thread:
        return _loop(s, tokens, depth_limit)
    return call_with_deep_stack(_loop, s, tokens, depth_limit, depth=depth_limit)


def parse_simple(
    s: Syntax,
    tokens: Iterable[Token],
    default: Any = None,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    *,
    thread: bool = True,
) -> Any:
    """The value ``s`` associates with ``tokens``, or ``default``."""
    r = run_simple(s, tokens, depth_limit, thread=thread)
    return r.value if isinstance(r, Parsed) else default
