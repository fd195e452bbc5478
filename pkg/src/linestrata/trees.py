"""Stable rooted trees with numbered leaves.

A stable tree on leaves {1..r} is stored as its bracketing: the laminar family
of leaf sets of all vertices.  The family always contains the full set and all
singletons; every interior vertex automatically has at least two children
(laminarity plus the singletons force this), so any laminar family containing
the required elements is a valid tree.

Trees serialize as nested lists ([1, [2, 3]] is the tree where leaves 2 and 3
share a vertex); children are ordered by smallest leaf everywhere, making the
nested form canonical.
"""
from __future__ import annotations

import json
from typing import Iterable, Iterator, Mapping

from ._combi import set_partitions_at_least

__all__ = [
    "StableTree",
    "Bracket",
    "top_tree",
    "enumerate_stable_trees",
    "bracketing",
    "tree_from_bracketing",
    "poset_leq_tree",
    "glue_tree",
    "tree_dimension",
]

Bracket = frozenset[int]


def _check_laminar(brackets: Iterable[Bracket]) -> None:
    bs = sorted(brackets, key=len)
    for i, a in enumerate(bs):
        for b in bs[i + 1 :]:
            if not (a <= b or a.isdisjoint(b)):
                raise ValueError(f"brackets {sorted(a)} and {sorted(b)} overlap")


class StableTree:
    """Rooted tree on leaves {1..r}, every interior vertex with >= 2 children."""

    __slots__ = ("r", "brackets", "_children")

    def __init__(self, r: int, brackets: Iterable[Bracket]):
        if r < 1:
            raise ValueError("r must be at least 1")
        self.r = r
        full = frozenset(range(1, r + 1))
        bs = {frozenset(b) for b in brackets}
        bs.add(full)
        for i in range(1, r + 1):
            bs.add(frozenset({i}))
        for b in bs:
            if not b or not b <= full:
                raise ValueError(f"bracket {sorted(b)} out of range for r={r}")
        _check_laminar(bs)
        self.brackets: frozenset[Bracket] = frozenset(bs)
        self._children: dict[Bracket, tuple[Bracket, ...]] = {}

    # -- structure ----------------------------------------------------

    @property
    def root(self) -> Bracket:
        return frozenset(range(1, self.r + 1))

    def is_leaf(self, b: Bracket) -> bool:
        return len(b) == 1

    def interior_vertices(self) -> list[Bracket]:
        """Non-leaf vertices, root first, in preorder."""
        return [b for b in self.preorder_vertices() if len(b) >= 2]

    def children(self, b: Bracket) -> tuple[Bracket, ...]:
        """Child vertices of b, ordered by smallest leaf."""
        if b not in self.brackets:
            raise KeyError(f"{sorted(b)} is not a vertex")
        if len(b) == 1:
            return ()
        cached = self._children.get(b)
        if cached is not None:
            return cached
        proper = [c for c in self.brackets if c < b]
        maximal = [
            c for c in proper if not any(c < d for d in proper)
        ]
        out = tuple(sorted(maximal, key=min))
        self._children[b] = out
        return out

    def parent(self, b: Bracket) -> Bracket:
        """Parent vertex of b; the root has none."""
        if b not in self.brackets:
            raise KeyError(f"{sorted(b)} is not a vertex")
        if b == self.root:
            raise ValueError("the root has no parent")
        supersets = [c for c in self.brackets if b < c]
        return min(supersets, key=len)

    def in_degree(self, b: Bracket) -> int:
        return len(self.children(b))

    def preorder_vertices(self) -> Iterator[Bracket]:
        """All vertices in depth-first order, children by smallest leaf."""
        stack = [self.root]
        while stack:
            b = stack.pop()
            yield b
            stack.extend(reversed(self.children(b)))

    def path_to_root(self, b: Bracket) -> list[Bracket]:
        """Vertices from b (inclusive) up to the root (inclusive)."""
        out = [b]
        while out[-1] != self.root:
            out.append(self.parent(out[-1]))
        return out

    # -- comparisons / hashing ---------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, StableTree)
            and self.r == other.r
            and self.brackets == other.brackets
        )

    def __hash__(self) -> int:
        return hash((self.r, self.brackets))

    # -- presentation / serialization ---------------------------------

    def to_nested(self) -> object:
        def build(b: Bracket) -> object:
            if len(b) == 1:
                return next(iter(b))
            return [build(c) for c in self.children(b)]

        out = build(self.root)
        return out if isinstance(out, list) else out

    @classmethod
    def from_nested(cls, nested: object, r: int | None = None) -> "StableTree":
        brackets: set[Bracket] = set()

        def walk(node: object) -> Bracket:
            if isinstance(node, int):
                return frozenset({node})
            if not isinstance(node, (list, tuple)):
                raise ValueError(f"bad tree node {node!r}")
            if len(node) < 2:
                raise ValueError("interior vertices need at least two children")
            leafset: frozenset[int] = frozenset()
            for child in node:
                cset = walk(child)
                if leafset & cset:
                    raise ValueError("repeated leaf in tree")
                leafset |= cset
            brackets.add(leafset)
            return leafset

        top = walk(nested)
        leaves = sorted(top)
        rr = r if r is not None else (max(leaves) if leaves else 0)
        if leaves != list(range(1, rr + 1)):
            raise ValueError(f"leaves {leaves} are not 1..{rr}")
        return cls(rr, brackets)

    def __str__(self) -> str:
        return json.dumps(self.to_nested(), separators=(",", ":"))

    def __repr__(self) -> str:
        return f"StableTree.from_nested({self.to_nested()!r})"

    def to_json(self) -> object:
        return self.to_nested()

    @classmethod
    def from_json(cls, data: object, r: int | None = None) -> "StableTree":
        return cls.from_nested(data, r)


def top_tree(r: int) -> StableTree:
    """The corolla: root with all leaves as children (the unique maximum)."""
    return StableTree(r, ())


def bracketing(tree: StableTree) -> frozenset[Bracket]:
    """The tree's full laminar family (root and singletons included)."""
    return tree.brackets


def tree_from_bracketing(r: int, brackets: Iterable[Bracket]) -> StableTree:
    return StableTree(r, brackets)


def poset_leq_tree(t1: StableTree, t2: StableTree) -> bool:
    """True when t1 degenerates t2: every bracket of t2 appears in t1."""
    if t1.r != t2.r:
        raise ValueError("trees live on different leaf sets")
    return t1.brackets >= t2.brackets


def tree_dimension(tree: StableTree) -> int:
    """Moduli dimension: sum of (children - 2) over interior vertices."""
    return sum(tree.in_degree(b) - 2 for b in tree.interior_vertices())


def glue_tree(tree: StableTree, assignment: Mapping[Bracket, int]) -> StableTree:
    """Contract every non-root interior vertex whose assigned value is 1.

    The assignment must give a value in {0, 1} for exactly the non-root
    interior vertices.  Gluing is monotone and injective with image the
    interval [tree, top] in the degeneration order.
    """
    keys = {frozenset(k) for k in assignment}
    expected = {b for b in tree.brackets if len(b) >= 2 and b != tree.root}
    if keys != expected:
        missing = sorted(sorted(b) for b in expected - keys)
        extra = sorted(sorted(b) for b in keys - expected)
        raise ValueError(
            f"assignment must cover the non-root interior vertices exactly"
            f" (missing {missing}, extra {extra})"
        )
    removed = set()
    for key, value in assignment.items():
        if value not in (0, 1):
            raise ValueError(f"assignment value {value!r} not in {{0, 1}}")
        if value == 1:
            removed.add(frozenset(key))
    return StableTree(tree.r, tree.brackets - removed)


def enumerate_stable_trees(r: int) -> list[StableTree]:
    """All stable trees on leaves {1..r}, deterministic order."""
    if r < 1:
        raise ValueError("r must be at least 1")

    cache: dict[Bracket, list[frozenset[Bracket]]] = {}

    def families(leafset: Bracket) -> list[frozenset[Bracket]]:
        """All interior-bracket families of trees on the given leaf set."""
        if len(leafset) == 1:
            return [frozenset()]
        got = cache.get(leafset)
        if got is not None:
            return got
        out: list[frozenset[Bracket]] = []
        items = sorted(leafset)
        for parts in set_partitions_at_least(items, 2):
            options = [families(frozenset(p)) for p in parts]
            picks: list[frozenset[Bracket]] = [frozenset()]
            for opt in options:
                picks = [acc | extra for acc in picks for extra in opt]
            out.extend(pick | {leafset} for pick in picks)
        cache[leafset] = out
        return out

    full = frozenset(range(1, r + 1))
    trees = [StableTree(r, fam) for fam in families(full)]
    trees.sort(key=lambda t: sorted(sorted(b) for b in t.brackets))
    return trees
