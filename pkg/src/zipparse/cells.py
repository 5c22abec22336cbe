"""Per-node analysis state."""

from __future__ import annotations

from typing import Any, Callable, Optional

__all__ = ["Lazy", "Cell", "epsilon_cell"]

_UNSET = object()


class Lazy:
    """A nullable value, computed on first use (user transforms run once)."""

    __slots__ = ("_thunk", "_value")

    def __init__(self, thunk: Optional[Callable[[], Any]] = None, value: Any = _UNSET):
        self._thunk = thunk
        self._value = value

    def get(self) -> Any:
        if self._thunk is not None:
            self._value = self._thunk()
            self._thunk = None
        return self._value


class Cell:
    """Lattice state of one node: productivity, nullable value, first and
    should-not-follow kind bitsets, and conflict reports."""

    __slots__ = ("productive", "nullable", "first", "snf", "conflict", "roots", "final", "queued")

    def __init__(self) -> None:
        self.productive = False
        self.nullable: Optional[Lazy] = None
        self.first = 0
        self.snf = 0
        self.conflict = None
        self.roots: tuple = ()
        self.final = False
        self.queued = False


def epsilon_cell(value: Any) -> Cell:
    c = Cell()
    c.productive = True
    c.nullable = Lazy(value=value)
    c.final = True
    return c
