"""Sequences indexed by k >= 1 that are constant away from finitely many indices."""

from __future__ import annotations

from typing import Callable, Generic, Iterable, Mapping, TypeVar

T = TypeVar("T")
U = TypeVar("U")


class Germ(Generic[T]):
    """Finitely many exceptional values plus one generic value.

    Exceptional entries equal to the generic value are dropped, so two germs
    describing the same sequence compare equal.

    >>> g = Germ({2: 5, 3: 0}, 0)
    >>> g.at(2), g.at(7), g.exceptional_indices()
    (5, 0, (2,))
    >>> (g + Germ({}, 1)).at(3)
    1
    """

    __slots__ = ("_exc", "_gen")

    def __init__(self, exceptional: Mapping[int, T] | None = None, generic: T = None):
        exc = {}
        for k, v in (exceptional or {}).items():
            k = int(k)
            if k < 1:
                raise ValueError(f"germ index must be positive, got {k}")
            if not _same(v, generic):
                exc[k] = v
        object.__setattr__(self, "_exc", dict(sorted(exc.items())))
        object.__setattr__(self, "_gen", generic)

    def __setattr__(self, name, value):
        raise AttributeError("Germ is immutable")

    @classmethod
    def constant(cls, value: T) -> "Germ[T]":
        return cls({}, value)

    @property
    def generic(self) -> T:
        return self._gen

    @property
    def exceptional(self) -> dict[int, T]:
        return dict(self._exc)

    def exceptional_indices(self) -> tuple[int, ...]:
        return tuple(self._exc)

    def at(self, k: int) -> T:
        if k < 1:
            raise ValueError(f"germ index must be positive, got {k}")
        return self._exc.get(k, self._gen)

    @property
    def bound(self) -> int:
        """Smallest N with the value generic for every k >= N."""
        return max(self._exc, default=0) + 1

    def map(self, f: Callable[[T], U]) -> "Germ[U]":
        return Germ({k: f(v) for k, v in self._exc.items()}, f(self._gen))

    def map_indexed(self, f: Callable[[int | None, T], U]) -> "Germ[U]":
        """Apply f(k, value); the generic value is passed with k = None."""
        return Germ({k: f(k, v) for k, v in self._exc.items()}, f(None, self._gen))

    def with_value(self, k: int, value: T) -> "Germ[T]":
        exc = dict(self._exc)
        exc[k] = value
        return Germ(exc, self._gen)

    def items(self) -> Iterable[tuple[int, T]]:
        return self._exc.items()

    def __eq__(self, other):
        if not isinstance(other, Germ):
            return NotImplemented
        return _same(self._gen, other._gen) and self._exc.keys() == other._exc.keys() and all(
            _same(v, other._exc[k]) for k, v in self._exc.items())

    def __hash__(self):
        return hash((tuple(self._exc.items()), self._gen))

    def __repr__(self):
        return f"Germ({self._exc!r}, generic={self._gen!r})"

    def __add__(self, other: "Germ") -> "Germ":
        return combine(lambda a, b: a + b, self, other)

    def __sub__(self, other: "Germ") -> "Germ":
        return combine(lambda a, b: a - b, self, other)

    def __mul__(self, other: "Germ") -> "Germ":
        return combine(lambda a, b: a * b, self, other)

    def __neg__(self) -> "Germ":
        return self.map(lambda a: -a)


def _same(a, b) -> bool:
    try:
        return bool(a == b)
    except Exception:
        return a is b


def joint_indices(*germs: Germ) -> tuple[int, ...]:
    keys: set[int] = set()
    for g in germs:
        keys.update(g.exceptional_indices())
    return tuple(sorted(keys))


def combine(f: Callable[..., U], *germs: Germ) -> Germ[U]:
    """Pointwise combination; the generic value is f of the generic values."""
    keys = joint_indices(*germs)
    return Germ({k: f(*(g.at(k) for g in germs)) for k in keys}, f(*(g.generic for g in germs)))


def combine_indexed(f: Callable[..., U], *germs: Germ) -> Germ[U]:
    """Like :func:`combine` but f also receives the index (None for generic)."""
    keys = joint_indices(*germs)
    return Germ({k: f(k, *(g.at(k) for g in germs)) for k in keys},
                f(None, *(g.generic for g in germs)))
