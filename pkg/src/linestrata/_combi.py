"""Small combinatorial generators shared across modules."""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T")


def set_partitions(items: Sequence[T]) -> Iterator[list[list[T]]]:
    """All set partitions of items, each partition a list of nonempty blocks.

    Blocks appear in order of their smallest original index, so the output is
    deterministic for a fixed input order.
    """
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def set_partitions_at_least(items: Sequence[T], min_blocks: int) -> Iterator[list[list[T]]]:
    for part in set_partitions(items):
        if len(part) >= min_blocks:
            yield part


def subsets(items: Sequence[T]) -> Iterator[list[T]]:
    """All subsets, smallest first by size then position."""
    items = list(items)
    n = len(items)
    for size in range(n + 1):
        yield from _subsets_of_size(items, size)


def _subsets_of_size(items: list[T], size: int) -> Iterator[list[T]]:
    if size == 0:
        yield []
        return
    for i in range(len(items) - size + 1):
        for tail in _subsets_of_size(items[i + 1 :], size - 1):
            yield [items[i]] + tail


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail
