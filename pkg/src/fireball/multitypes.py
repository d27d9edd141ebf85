"""Linear types, multi types and type contexts.

Multi types are kept canonical (sorted by a global total order), so
structural equality of the representation is multiset equality.
Concrete syntax: ``0`` for the empty multi type, ``[A -o B, ...]`` otherwise.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .syntax import ParseError, Var


@dataclass(frozen=True, slots=True)
class LinearType:
    left: "MultiType"
    right: "MultiType"
    _key: tuple = field(init=False, compare=False, repr=False, default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "_key", (self.size, self.left._key, self.right._key))

    @property
    def size(self) -> int:
        return 1 + self.left.size + self.right.size

    def is_inert(self) -> bool:
        return self.left.is_empty and self.right.is_inert()

    def __lt__(self, other: "LinearType") -> bool:
        return self._key < other._key

    def __str__(self) -> str:
        return f"{self.left} -o {self.right}"


@dataclass(frozen=True, slots=True)
class MultiType:
    items: tuple[LinearType, ...] = ()
    _key: tuple = field(init=False, compare=False, repr=False, default=())
    _size: int = field(init=False, compare=False, repr=False, default=0)

    def __post_init__(self) -> None:
        items = tuple(sorted(self.items, key=lambda l: l._key))
        object.__setattr__(self, "items", items)
        size = sum(l.size for l in items)
        object.__setattr__(self, "_size", size)
        object.__setattr__(self, "_key", (size, tuple(l._key for l in items)))

    @classmethod
    def of(cls, *items: LinearType) -> "MultiType":
        return cls(tuple(items))

    @property
    def size(self) -> int:
        return self._size

    @property
    def is_empty(self) -> bool:
        return not self.items

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[LinearType]:
        return iter(self.items)

    def __add__(self, other: "MultiType") -> "MultiType":
        if not other.items:
            return self
        if not self.items:
            return other
        return MultiType(self.items + other.items)

    def __lt__(self, other: "MultiType") -> bool:
        return self._key < other._key

    def minus(self, other: "MultiType") -> "MultiType":
        """Multiset difference; raises if ``other`` is not contained in ``self``."""
        left = Counter(self.items)
        left.subtract(other.items)
        if any(n < 0 for n in left.values()):
            raise ValueError(f"{other} is not a sub-multiset of {self}")
        return MultiType(tuple(left.elements()))

    def is_inert(self) -> bool:
        return all(l.is_inert() for l in self.items)

    def __str__(self) -> str:
        if not self.items:
            return "0"
        return "[" + ", ".join(str(l) for l in self.items) + "]"


EMPTY = MultiType()


def arrow(left: MultiType, right: MultiType) -> LinearType:
    return LinearType(left, right)


def single(left: MultiType, right: MultiType) -> MultiType:
    """The singleton multi type ``[left -o right]``."""
    return MultiType((LinearType(left, right),))


def mt_sum(m: MultiType, n: MultiType) -> MultiType:
    return m + n


def type_size(m: MultiType) -> int:
    return m.size


def linear_size(l: LinearType) -> int:
    return l.size


def is_inert_multi(m: MultiType) -> bool:
    return m.is_inert()


class TypeContext(Mapping[Var, MultiType]):
    """Finitely supported map from variables to multi types; absent means 0."""

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Mapping[Var, MultiType] | Iterable[tuple[Var, MultiType]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        merged: dict[Var, MultiType] = {}
        for x, m in entries:
            merged[x] = merged[x] + m if x in merged else m
        self._items = tuple(sorted((x, m) for x, m in merged.items() if not m.is_empty))
        self._hash = None

    def __getitem__(self, x: Var) -> MultiType:
        for y, m in self._items:
            if y == x:
                return m
        raise KeyError(x)

    def get(self, x: Var, default: MultiType = EMPTY) -> MultiType:  # type: ignore[override]
        for y, m in self._items:
            if y == x:
                return m
        return default

    def __iter__(self) -> Iterator[Var]:
        return (x for x, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TypeContext):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __add__(self, other: "TypeContext") -> "TypeContext":
        if not other._items:
            return self
        if not self._items:
            return other
        return TypeContext(self._items + other._items)

    def remove(self, x: Var) -> "TypeContext":
        if x not in self:
            return self
        out = object.__new__(TypeContext)
        out._items = tuple((y, m) for y, m in self._items if y != x)
        out._hash = None
        return out

    def extend(self, x: Var, m: MultiType) -> "TypeContext":
        return self + TypeContext({x: m})

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(x for x, _ in self._items)

    @property
    def types(self) -> tuple[MultiType, ...]:
        return tuple(m for _, m in self._items)

    def is_inert(self) -> bool:
        return all(m.is_inert() for _, m in self._items)

    def __repr__(self) -> str:
        return f"TypeContext({{{', '.join(f'{x}: {m}' for x, m in self._items)}}})"

    def __str__(self) -> str:
        return ", ".join(f"{x}:{m}" for x, m in self._items)


EMPTY_CTX = TypeContext()


def ctx_sum(g: TypeContext, d: TypeContext) -> TypeContext:
    return g + d


def ctx_types_size(g: TypeContext) -> int:
    return sum(m.size for m in g.types)


def is_inert_ctx(g: TypeContext) -> bool:
    return g.is_inert()


# --- concrete syntax ----------------------------------------------------------

def _skip(text: str, k: int) -> int:
    while k < len(text) and text[k].isspace():
        k += 1
    return k


def _multi(text: str, k: int) -> tuple[MultiType, int]:
    k = _skip(text, k)
    if text.startswith("0", k):
        return EMPTY, k + 1
    if not text.startswith("[", k):
        raise ParseError("expected '0' or '['", k)
    k = _skip(text, k + 1)
    if text.startswith("]", k):
        return EMPTY, k + 1
    items = []
    while True:
        left, k = _multi(text, k)
        k = _skip(text, k)
        if not text.startswith("-o", k):
            raise ParseError("expected '-o'", k)
        right, k = _multi(text, k + 2)
        items.append(LinearType(left, right))
        k = _skip(text, k)
        if text.startswith(",", k):
            k += 1
            continue
        if text.startswith("]", k):
            return MultiType(tuple(items)), k + 1
        raise ParseError("expected ',' or ']'", k)


def parse_multitype(text: str) -> MultiType:
    m, k = _multi(text, 0)
    k = _skip(text, k)
    if k != len(text):
        raise ParseError("trailing input after type", k)
    return m


def print_multitype(m: MultiType) -> str:
    return str(m)


def zero_stack(n: int, target: MultiType) -> MultiType:
    """``[0 -o [0 -o ... [0 -o target]]]`` with ``n`` arrows; ``target`` when ``n == 0``."""
    out = target
    for _ in range(n):
        out = single(EMPTY, out)
    return out
