"""Strata of the compactified marked-line moduli as pairs of trees.

A stratum is encoded by a pair: a seam tree (the line-collision pattern, a
:class:`~linestrata.trees.StableTree`) together with a bubble tree whose
vertices are screens (components), seam attachment points, and marks.  Screens
come in two kinds: a *single* screen has one seam carrying its whole line set
(the lines travel together), a *multi* screen has one seam per child of the
corresponding seam-tree vertex (the lines separate there).  Marks sit on seams
whose line set is a single line.

Stability: a single screen's seam carries at least two objects (the one-mark
whole space being the only exception), and a multi screen carries at least one
object overall.  Seam subtrees with no marks below them exist only in the seam
tree — no screen covers them.

Strata are alternatively encoded as bracketings: the seam tree's laminar
family plus, for every screen, the pair (line set, set of marks below it).
The dictionary between the two encodings is implemented here and used for the
degeneration order and for gluing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence, Union

from ._combi import set_partitions
from .trees import Bracket, StableTree, enumerate_stable_trees, top_tree

__all__ = [
    "Mark",
    "Seam",
    "Component",
    "TreePair",
    "FiberSpec",
    "RootDatum",
    "validate_tree_pair",
    "stratum_dimension",
    "top_tree_pair",
    "enumerate_tree_pairs",
    "f_vector",
    "enumerate_stable_root_data",
    "tree_pair_to_two_bracketing",
    "two_bracketing_to_tree_pair",
    "enumerate_two_bracketings_bruteforce",
    "poset_leq_tree_pair",
    "non_root_components",
    "non_root_interior",
    "local_poset_elements",
    "glue_tree_pair",
]


@dataclass(frozen=True)
class Mark:
    """The index-th marked point on the given line (both 1-based)."""

    line: int
    index: int

    def to_json(self) -> dict:
        return {"mark": [self.line, self.index]}


@dataclass(frozen=True)
class Seam:
    """An attachment locus on a screen, labeled by the lines it carries."""

    lines: frozenset[int]
    children: tuple[Union["Component", Mark], ...]


@dataclass(frozen=True)
class Component:
    """A screen: single (one seam, lines together) or multi (lines separate)."""

    lines: frozenset[int]
    seams: tuple[Seam, ...]

    @property
    def is_multi(self) -> bool:
        return len(self.seams) >= 2

    def child_components(self) -> Iterator["Component"]:
        for seam in self.seams:
            for child in seam.children:
                if isinstance(child, Component):
                    yield child

    def subtree_marks(self) -> frozenset[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        stack: list[Component] = [self]
        while stack:
            comp = stack.pop()
            for seam in comp.seams:
                for child in seam.children:
                    if isinstance(child, Mark):
                        out.add((child.line, child.index))
                    else:
                        stack.append(child)
        return frozenset(out)


def _child_sort_key(child: Component | Mark):
    if isinstance(child, Mark):
        return (0, child.line, child.index)
    return (1, min(child.subtree_marks()))


def _sorted_children(children: Iterable[Component | Mark]) -> tuple[Component | Mark, ...]:
    return tuple(sorted(children, key=_child_sort_key))


@dataclass(frozen=True)
class TreePair:
    """A stratum: seam tree plus bubble tree."""

    n: tuple[int, ...]
    seam_tree: StableTree
    root: Component

    @property
    def r(self) -> int:
        return len(self.n)

    def components(self) -> list[Component]:
        """All screens in depth-first order following the stored child order."""
        out: list[Component] = []

        def walk(comp: Component) -> None:
            out.append(comp)
            for seam in comp.seams:
                for child in seam.children:
                    if isinstance(child, Component):
                        walk(child)

        walk(self.root)
        return out

    def component_parent(self) -> dict[Component, Component | None]:
        out: dict[Component, Component | None] = {self.root: None}
        for comp in self.components():
            for child in comp.child_components():
                out[child] = comp
        return out

    def multi_components(self) -> list[Component]:
        return [c for c in self.components() if c.is_multi]

    def canonical_key(self):
        def canon(comp: Component):
            return (
                tuple(sorted(comp.lines)),
                tuple(
                    sorted(
                        (
                            tuple(sorted(seam.lines)),
                            tuple(
                                sorted(
                                    (0, child.line, child.index)
                                    if isinstance(child, Mark)
                                    else (1, canon(child))
                                    for child in seam.children
                                )
                            ),
                        )
                        for seam in comp.seams
                    )
                ),
            )

        return (self.n, self.seam_tree.brackets, canon(self.root))

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict:
        def comp_json(comp: Component) -> dict:
            return {
                "lines": sorted(comp.lines),
                "seams": [
                    {
                        "lines": sorted(seam.lines),
                        "children": [
                            child.to_json()
                            if isinstance(child, Mark)
                            else comp_json(child)
                            for child in seam.children
                        ],
                    }
                    for seam in comp.seams
                ],
            }

        return {
            "n": list(self.n),
            "seam_tree": self.seam_tree.to_nested(),
            "bubble_tree": comp_json(self.root),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TreePair":
        def parse_child(obj: Mapping) -> Component | Mark:
            if "mark" in obj:
                line, index = obj["mark"]
                return Mark(int(line), int(index))
            return parse_comp(obj)

        def parse_comp(obj: Mapping) -> Component:
            seams = tuple(
                Seam(
                    frozenset(int(x) for x in seam["lines"]),
                    tuple(parse_child(c) for c in seam["children"]),
                )
                for seam in obj["seams"]
            )
            return Component(frozenset(int(x) for x in obj["lines"]), seams)

        n = tuple(int(c) for c in data["n"])
        tree = StableTree.from_nested(data["seam_tree"], len(n))
        tp = cls(n, tree, parse_comp(data["bubble_tree"]))
        validate_tree_pair(tp)
        return tp

    def sort_key(self) -> tuple:
        return (
            stratum_dimension(self),
            json.dumps(self.to_json(), sort_keys=True),
        )


# ---------------------------------------------------------------------------
# validation / dimension
# ---------------------------------------------------------------------------


def _is_degenerate_whole_space(tp: TreePair) -> bool:
    return tp.n == (1,)


def validate_tree_pair(tp: TreePair) -> None:
    """Raise ValueError when the pair is not a well-formed stable stratum."""
    r = tp.r
    if tp.seam_tree.r != r:
        raise ValueError("seam tree and mark vector disagree on the line count")
    full = frozenset(range(1, r + 1))
    if tp.root.lines != full:
        raise ValueError("root screen must carry every line")
    expected_marks = {(i, j) for i in range(1, r + 1) for j in range(1, tp.n[i - 1] + 1)}
    seen_marks: list[tuple[int, int]] = []

    def walk(comp: Component, is_root: bool) -> None:
        if not comp.seams:
            raise ValueError("screen with no seams")
        if len(comp.seams) == 1:
            seam = comp.seams[0]
            if seam.lines != comp.lines:
                raise ValueError(
                    f"single screen over {sorted(comp.lines)} has seam over"
                    f" {sorted(seam.lines)}"
                )
            if len(seam.children) < 2 and not (
                is_root and _is_degenerate_whole_space(tp)
            ):
                raise ValueError(
                    f"single screen over {sorted(comp.lines)} carries"
                    f" {len(seam.children)} object(s); needs at least 2"
                )
            for child in seam.children:
                if isinstance(child, Mark):
                    if len(comp.lines) != 1 or child.line not in comp.lines:
                        raise ValueError(f"mark {child} misplaced on a seam over {sorted(seam.lines)}")
                    seen_marks.append((child.line, child.index))
                else:
                    if child.lines != comp.lines:
                        raise ValueError("child screen of a single screen must carry the same lines")
                    walk(child, False)
        else:
            if len(comp.lines) < 2:
                raise ValueError("multi screen over a single line")
            if comp.lines not in tp.seam_tree.brackets:
                raise ValueError(
                    f"multi screen over {sorted(comp.lines)} has no seam-tree vertex"
                )
            parts = set(tp.seam_tree.children(comp.lines))
            seam_lines = [seam.lines for seam in comp.seams]
            if len(seam_lines) != len(parts) or set(seam_lines) != parts:
                raise ValueError(
                    f"multi screen over {sorted(comp.lines)} does not match the"
                    f" seam-tree branching {sorted(sorted(p) for p in parts)}"
                )
            if all(len(seam.children) == 0 for seam in comp.seams):
                raise ValueError(
                    f"multi screen over {sorted(comp.lines)} carries no object"
                )
            for seam in comp.seams:
                for child in seam.children:
                    if isinstance(child, Mark):
                        if len(seam.lines) != 1 or child.line not in seam.lines:
                            raise ValueError(
                                f"mark {child} misplaced on a seam over {sorted(seam.lines)}"
                            )
                        seen_marks.append((child.line, child.index))
                    else:
                        if child.lines != seam.lines:
                            raise ValueError(
                                "screen under a seam must carry exactly the seam's lines"
                            )
                        walk(child, False)

    walk(tp.root, True)
    if len(seen_marks) != len(set(seen_marks)):
        raise ValueError("duplicate marks")
    if set(seen_marks) != expected_marks:
        raise ValueError(
            f"marks {sorted(set(seen_marks))} do not census {sorted(expected_marks)}"
        )


def stratum_dimension(tp: TreePair) -> int:
    """Moduli dimension of the open stratum."""
    total = sum(
        tp.seam_tree.in_degree(b) - 2 for b in tp.seam_tree.interior_vertices()
    )
    for comp in tp.components():
        if comp.is_multi:
            total += sum(len(seam.children) for seam in comp.seams) - 1
        else:
            total += len(comp.seams[0].children) - 2
    return max(total, 0)


def top_tree_pair(n: Sequence[int]) -> TreePair:
    """The open stratum: one screen, marks straight on their lines."""
    nt = tuple(int(c) for c in n)
    r = len(nt)
    if r < 1 or any(c < 0 for c in nt) or sum(nt) == 0:
        raise ValueError(f"invalid mark vector {nt}")
    marks_by_line = {
        i: tuple(Mark(i, j) for j in range(1, nt[i - 1] + 1)) for i in range(1, r + 1)
    }
    if r == 1:
        root = Component(
            frozenset({1}), (Seam(frozenset({1}), marks_by_line[1]),)
        )
    else:
        seams = tuple(
            Seam(frozenset({i}), marks_by_line[i]) for i in range(1, r + 1)
        )
        root = Component(frozenset(range(1, r + 1)), seams)
    tp = TreePair(nt, top_tree(r), root)
    validate_tree_pair(tp)
    return tp


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _line_bubbles(line: int, marks: tuple[Mark, ...], top: bool) -> list[Component]:
    """All single-line screens over the given marks."""
    if top and len(marks) == 1:
        return [Component(frozenset({line}), (Seam(frozenset({line}), marks),))]
    out: list[Component] = []
    for parts in set_partitions(list(marks)):
        if len(parts) < 2:
            continue
        options: list[list[Component | Mark]] = []
        for block in parts:
            if len(block) == 1:
                options.append([block[0]])
            else:
                options.append(list(_line_bubbles(line, tuple(block), False)))
        for combo in product(*options):
            out.append(
                Component(
                    frozenset({line}),
                    (Seam(frozenset({line}), _sorted_children(combo)),),
                )
            )
    return out


# A screen plan: per singleton part, the finished seam children; per fat
# part, the groups of marks that will each become one sub-screen tree.
@dataclass(frozen=True)
class _ScreenPlan:
    singleton_children: tuple[tuple[int, tuple[Component | Mark, ...]], ...]
    fat_blocks: tuple[tuple[tuple[int, ...], tuple[tuple[Mark, ...], ...]], ...]


def _screen_plans(
    marks: tuple[Mark, ...], parts: tuple[tuple[int, ...], ...]
) -> list[_ScreenPlan]:
    per_part_options: list[list] = []
    for part in parts:
        part_marks = tuple(m for m in marks if m.line in part)
        if len(part) == 1:
            line = part[0]
            opts: list[tuple[Component | Mark, ...]] = []
            for clusters in set_partitions(list(part_marks)):
                block_opts: list[list[Component | Mark]] = []
                for block in clusters:
                    if len(block) == 1:
                        block_opts.append([block[0]])
                    else:
                        block_opts.append(
                            list(_line_bubbles(line, tuple(block), False))
                        )
                for combo in product(*block_opts):
                    opts.append(_sorted_children(combo))
            per_part_options.append([("single", line, children) for children in opts])
        else:
            opts2: list[tuple[tuple[Mark, ...], ...]] = []
            for groups in set_partitions(list(part_marks)):
                opts2.append(tuple(tuple(g) for g in groups))
            per_part_options.append([("fat", part, blocks) for blocks in opts2])
    plans: list[_ScreenPlan] = []
    for combo in product(*per_part_options):
        singles = tuple(
            (line, children) for kind, line, children in combo if kind == "single"
        )
        fats = tuple(
            (part, blocks) for kind, part, blocks in combo if kind == "fat"
        )
        plans.append(_ScreenPlan(singles, fats))
    return plans


# A factor plan: nested fusion structure whose leaves are screen plans.
_FactorPlan = tuple  # ("screen", _ScreenPlan) | ("fused", tuple[_FactorPlan, ...])


def _factor_plans(
    marks: tuple[Mark, ...], parts: tuple[tuple[int, ...], ...]
) -> list[_FactorPlan]:
    assert marks, "screens always carry at least one mark"
    plans: list[_FactorPlan] = [("screen", sp) for sp in _screen_plans(marks, parts)]
    for groups in set_partitions(list(marks)):
        if len(groups) < 2:
            continue
        options = [_factor_plans(tuple(g), parts) for g in groups]
        for combo in product(*options):
            plans.append(("fused", combo))
    return plans


def _plan_screens(plan: _FactorPlan) -> list[_ScreenPlan]:
    if plan[0] == "screen":
        return [plan[1]]
    out: list[_ScreenPlan] = []
    for sub in plan[1]:
        out.extend(_plan_screens(sub))
    return out


@lru_cache(maxsize=None)
def _enum_fiber(
    lines: tuple[int, ...], factors: tuple[tuple[Mark, ...], ...]
) -> tuple[tuple[frozenset[Bracket], tuple[Component, ...]], ...]:
    """All (interior sub-brackets, per-factor root screens) over the lines.

    The brackets returned are the interior vertices strictly inside the line
    set; the caller owns the vertex for the line set itself.
    """
    if len(lines) == 1:
        line = lines[0]
        if any(not marks for marks in factors):
            raise ValueError("a factor with no marks cannot cover a line")
        options = [_line_bubbles(line, marks, True) for marks in factors]
        return tuple(
            (frozenset(), tuple(combo)) for combo in product(*options)
        )

    results: list[tuple[frozenset[Bracket], tuple[Component, ...]]] = []
    for raw_parts in set_partitions(sorted(lines)):
        if len(raw_parts) < 2:
            continue
        parts = tuple(sorted((tuple(sorted(p)) for p in raw_parts), key=lambda p: p[0]))
        fat_parts = [p for p in parts if len(p) >= 2]
        factor_plan_options = [_factor_plans(marks, parts) for marks in factors]
        for plan_combo in product(*factor_plan_options):
            screens: list[_ScreenPlan] = []
            for plan in plan_combo:
                screens.extend(_plan_screens(plan))
            # pool the fat-part groups across all screens, remembering owners
            pooled: dict[tuple[int, ...], list[tuple[int, int]]] = {
                p: [] for p in fat_parts
            }
            pooled_factors: dict[tuple[int, ...], list[tuple[Mark, ...]]] = {
                p: [] for p in fat_parts
            }
            for s_idx, sp in enumerate(screens):
                for part, blocks in sp.fat_blocks:
                    for b_idx, block in enumerate(blocks):
                        pooled[part].append((s_idx, b_idx))
                        pooled_factors[part].append(block)
            sub_options = [
                _enum_fiber(p, tuple(pooled_factors[p])) for p in fat_parts
            ]
            for sub_combo in product(*sub_options):
                brackets: set[Bracket] = set()
                # roots of the pooled sub-screens, keyed back to their owner
                assigned: dict[tuple[tuple[int, ...], int, int], Component] = {}
                for p, (sub_brackets, sub_roots) in zip(fat_parts, sub_combo):
                    brackets.add(frozenset(p))
                    brackets.update(sub_brackets)
                    for (s_idx, b_idx), root in zip(pooled[p], sub_roots):
                        assigned[(p, s_idx, b_idx)] = root
                built_screens: list[Component] = []
                for s_idx, sp in enumerate(screens):
                    seams: list[Seam] = []
                    singleton_map = dict(sp.singleton_children)
                    fat_map = dict(sp.fat_blocks)
                    for part in parts:
                        if len(part) == 1:
                            children = singleton_map.get(part[0], ())
                            seams.append(Seam(frozenset(part), children))
                        else:
                            blocks = fat_map.get(part, ())
                            kids = tuple(
                                assigned[(part, s_idx, b_idx)]
                                for b_idx in range(len(blocks))
                            )
                            seams.append(
                                Seam(frozenset(part), _sorted_children(kids))
                            )
                    built_screens.append(
                        Component(frozenset(lines), tuple(seams))
                    )

                def build(plan: _FactorPlan, cursor: list[int]) -> Component:
                    if plan[0] == "screen":
                        comp = built_screens[cursor[0]]
                        cursor[0] += 1
                        return comp
                    children = tuple(build(sub, cursor) for sub in plan[1])
                    return Component(
                        frozenset(lines),
                        (Seam(frozenset(lines), _sorted_children(children)),),
                    )

                cursor = [0]
                roots = tuple(build(plan, cursor) for plan in plan_combo)
                results.append((frozenset(brackets), roots))
    return tuple(results)


def enumerate_tree_pairs(n: Sequence[int]) -> list[TreePair]:
    """All strata of the space with n_i marks on line i, dimension-sorted."""
    nt = tuple(int(c) for c in n)
    r = len(nt)
    if r < 1 or any(c < 0 for c in nt):
        raise ValueError(f"invalid mark vector {nt}")
    if sum(nt) == 0:
        raise ValueError("the mark vector must carry at least one mark")
    lines = tuple(range(1, r + 1))
    marks = tuple(Mark(i, j) for i in lines for j in range(1, nt[i - 1] + 1))
    out: list[TreePair] = []
    for brackets, roots in _enum_fiber(lines, (marks,)):
        tp = TreePair(nt, StableTree(r, brackets), roots[0])
        out.append(tp)
    out.sort(key=TreePair.sort_key)
    seen = set()
    for tp in out:
        key = tp.canonical_key()
        if key in seen:
            raise AssertionError("duplicate stratum produced by enumeration")
        seen.add(key)
        validate_tree_pair(tp)
    return out


def f_vector(n: Sequence[int]) -> list[int]:
    """Stratum counts by dimension, starting at dimension 0."""
    pairs = enumerate_tree_pairs(n)
    top_dim = max(stratum_dimension(tp) for tp in pairs)
    out = [0] * (top_dim + 1)
    for tp in pairs:
        out[stratum_dimension(tp)] += 1
    return out


# ---------------------------------------------------------------------------
# fiber specifications and flat root data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberSpec:
    """A fiber product: r lines, one count vector per factor."""

    r: int
    factors: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("r must be at least 1")
        for f in self.factors:
            if len(f) != self.r:
                raise ValueError(f"factor {f} does not have length {self.r}")
            if any(c < 0 for c in f):
                raise ValueError(f"factor {f} has a negative entry")
            if sum(f) == 0:
                raise ValueError(f"factor {f} carries no marks")


@dataclass(frozen=True)
class RootDatum:
    """Root-level collision datum: line partition plus mark partitions.

    blocks[p][i] is the partition of factor i's marks over part p, each mark a
    (line, index) pair.
    """

    partition: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[tuple[tuple[tuple[int, int], ...], ...], ...], ...]


def enumerate_stable_root_data(spec: FiberSpec) -> list[RootDatum]:
    """All stable root collision data of the fiber product.

    A datum with a single part (all lines collided) is stable only when every
    factor's marks split into at least two groups; the one-line one-factor
    base case admits no stable datum at all.
    """
    lines = list(range(1, spec.r + 1))
    factor_marks = [
        [(i, j) for i in lines for j in range(1, f[i - 1] + 1)]
        for f in spec.factors
    ]
    out: list[RootDatum] = []
    for raw_parts in set_partitions(lines):
        parts = tuple(sorted((tuple(sorted(p)) for p in raw_parts), key=lambda p: p[0]))
        per_part_per_factor: list[list[list[tuple[tuple[tuple[int, int], ...], ...]]]] = []
        for part in parts:
            factor_options: list[list[tuple[tuple[tuple[int, int], ...], ...]]] = []
            for marks in factor_marks:
                over = [m for m in marks if m[0] in part]
                opts = []
                for groups in set_partitions(over):
                    if len(parts) == 1 and len(groups) < 2:
                        continue
                    opts.append(
                        tuple(sorted(tuple(sorted(g)) for g in groups))
                    )
                factor_options.append(opts)
            per_part_per_factor.append(factor_options)
        if any(
            not opts for factor_options in per_part_per_factor for opts in factor_options
        ):
            continue
        part_choices = [
            list(product(*factor_options)) for factor_options in per_part_per_factor
        ]
        for combo in product(*part_choices):
            out.append(RootDatum(parts, tuple(combo)))
    out.sort(key=repr)
    return out


# ---------------------------------------------------------------------------
# bracketing dictionary and degeneration order
# ---------------------------------------------------------------------------

TwoBracket = tuple[frozenset[int], frozenset[tuple[int, int]]]


def tree_pair_to_two_bracketing(
    tp: TreePair,
) -> tuple[frozenset[Bracket], frozenset[TwoBracket]]:
    two: set[TwoBracket] = set()
    for i in range(1, tp.r + 1):
        for j in range(1, tp.n[i - 1] + 1):
            two.add((frozenset({i}), frozenset({(i, j)})))
    for comp in tp.components():
        two.add((comp.lines, comp.subtree_marks()))
    return tp.seam_tree.brackets, frozenset(two)


def _tb_contains(big: TwoBracket, small: TwoBracket) -> bool:
    return small[0] <= big[0] and small[1] <= big[1]


def two_bracketing_to_tree_pair(
    n: Sequence[int],
    one_brackets: Iterable[Bracket],
    two_brackets: Iterable[TwoBracket],
) -> TreePair:
    """Rebuild the stratum from its bracketings; validates the result."""
    nt = tuple(int(c) for c in n)
    r = len(nt)
    if nt == (1,):
        return top_tree_pair(nt)
    tree = StableTree(r, one_brackets)
    tbs = set(two_brackets)
    full = frozenset(range(1, r + 1))
    all_marks = frozenset(
        (i, j) for i in range(1, r + 1) for j in range(1, nt[i - 1] + 1)
    )
    root_tb = (full, all_marks)
    if root_tb not in tbs:
        raise ValueError("missing root 2-bracket")

    children_of: dict[TwoBracket, list[TwoBracket]] = {tb: [] for tb in tbs}
    for tb in tbs:
        if tb == root_tb:
            continue
        parents = [
            other
            for other in tbs
            if other != tb and _tb_contains(other, tb)
        ]
        if not parents:
            raise ValueError(f"2-bracket {tb} has no parent")
        parent = min(parents, key=lambda p: (len(p[0]), len(p[1])))
        children_of[parent].append(tb)

    def is_point(tb: TwoBracket) -> bool:
        return len(tb[0]) == 1 and len(tb[1]) == 1 and not children_of[tb]

    def build(tb: TwoBracket) -> Component:
        lines, _ = tb
        kids = children_of[tb]
        built: list[Component | Mark] = []
        kid_lines: list[frozenset[int]] = []
        for kid in sorted(kids, key=lambda t: (sorted(t[0]), sorted(t[1]))):
            if is_point(kid):
                (mk,) = kid[1]
                built.append(Mark(*mk))
                kid_lines.append(kid[0])
            else:
                built.append(build(kid))
                kid_lines.append(kid[0])
        if all(kl == lines for kl in kid_lines):
            return Component(lines, (Seam(lines, _sorted_children(built)),))
        if any(kl == lines for kl in kid_lines):
            raise ValueError(
                f"screen over {sorted(lines)} mixes same-line and split children"
            )
        if lines not in tree.brackets or len(lines) < 2:
            raise ValueError(
                f"splitting screen over {sorted(lines)} has no seam-tree vertex"
            )
        parts = tree.children(lines)
        seams = []
        for part in parts:
            members = [
                child
                for child, kl in zip(built, kid_lines)
                if kl <= part
            ]
            seams.append(Seam(part, _sorted_children(members)))
        placed = sum(len(s.children) for s in seams)
        if placed != len(built):
            raise ValueError("child screen does not fit any branch")
        return Component(lines, tuple(seams))

    tp = TreePair(nt, tree, build(root_tb))
    validate_tree_pair(tp)
    return tp


def enumerate_two_bracketings_bruteforce(
    n: Sequence[int], max_candidates: int = 64
) -> list[tuple[frozenset[Bracket], frozenset[TwoBracket]]]:
    """Every bracketing structure satisfying the stratum axioms, found by
    exhaustive search.  Independent cross-check of the tree-pair
    enumeration for small types; output is in the same shape as
    :func:`tree_pair_to_two_bracketing`.

    The axioms, per candidate family over a fixed laminar line family:
    marks shared between two entries force nesting; every entry's line set
    is in the line family; the full entry and all single-mark entries are
    present; at each line set, the entries lying exactly there jointly
    cover all marks of each member line, and any entry properly containing
    another at its level keeps each of its marks inside some properly
    smaller same-level entry.
    """
    nt = tuple(int(c) for c in n)
    r = len(nt)
    if r < 1 or any(c < 0 for c in nt):
        raise ValueError("n must be a nonempty tuple of nonnegative counts")
    if sum(nt) == 0:
        raise ValueError("at least one mark is required")
    all_marks = frozenset(
        (i, j) for i in range(1, r + 1) for j in range(1, nt[i - 1] + 1)
    )
    full = frozenset(range(1, r + 1))
    root_tb: TwoBracket = (full, all_marks)
    singles: list[TwoBracket] = [
        (frozenset({i}), frozenset({(i, j)}))
        for i in range(1, r + 1)
        for j in range(1, nt[i - 1] + 1)
    ]
    forced = {root_tb, *singles}

    results: list[tuple[frozenset[Bracket], frozenset[TwoBracket]]] = []
    for tree in enumerate_stable_trees(r):
        pool: list[TwoBracket] = []
        for bracket in sorted(tree.brackets, key=sorted):
            level_marks = sorted(mk for mk in all_marks if mk[0] in bracket)
            for size in range(1, len(level_marks) + 1):
                for combo in combinations(level_marks, size):
                    candidate: TwoBracket = (bracket, frozenset(combo))
                    if candidate in forced:
                        continue
                    pool.append(candidate)
        if len(pool) > max_candidates:
            raise ValueError(
                f"candidate pool of size {len(pool)} exceeds the bound "
                f"{max_candidates}; the brute force is for small types only"
            )

        # mark-sharing entries must nest; a violating pair can never be
        # repaired by later choices, so it prunes the whole branch
        incompatible = [0] * len(pool)
        for a in range(len(pool)):
            for b in range(a + 1, len(pool)):
                ta, tb = pool[a], pool[b]
                if ta[1] & tb[1] and not (
                    _tb_contains(ta, tb) or _tb_contains(tb, ta)
                ):
                    incompatible[a] |= 1 << b
                    incompatible[b] |= 1 << a

        def family_ok(family: frozenset[TwoBracket]) -> bool:
            levels: dict[Bracket, list[TwoBracket]] = {
                b: [] for b in tree.brackets
            }
            for tb in family:
                levels[tb[0]].append(tb)
            for bracket, level in levels.items():
                for i in bracket:
                    needed = set(range(1, nt[i - 1] + 1))
                    if not needed:
                        continue
                    covered = {
                        j for tb in level for (line, j) in tb[1] if line == i
                    }
                    if covered != needed:
                        return False
                for tb in level:
                    smaller = [o for o in level if o[1] < tb[1]]
                    if not smaller:
                        continue
                    for mk in tb[1]:
                        if not any(mk in o[1] for o in smaller):
                            return False
            return True

        def dfs(index: int, chosen: int) -> None:
            if index == len(pool):
                family = frozenset(
                    forced | {pool[k] for k in range(len(pool)) if chosen >> k & 1}
                )
                if family_ok(family):
                    results.append((tree.brackets, family))
                return
            dfs(index + 1, chosen)
            if not incompatible[index] & chosen:
                dfs(index + 1, chosen | 1 << index)

        dfs(0, 0)

    results.sort(
        key=lambda pair: (
            sorted(sorted(b) for b in pair[0]),
            sorted((sorted(l), sorted(m)) for l, m in pair[1]),
        )
    )
    return results


def poset_leq_tree_pair(tp1: TreePair, tp2: TreePair) -> bool:
    """True when tp1 is a degeneration of tp2 (more brackets everywhere)."""
    if tp1.n != tp2.n:
        raise ValueError("strata of different spaces are incomparable")
    one1, two1 = tree_pair_to_two_bracketing(tp1)
    one2, two2 = tree_pair_to_two_bracketing(tp2)
    return one1 >= one2 and two1 >= two2


# ---------------------------------------------------------------------------
# local degeneration poset and gluing
# ---------------------------------------------------------------------------


def non_root_components(tp: TreePair) -> list[Component]:
    return tp.components()[1:]


def non_root_interior(tree: StableTree) -> list[Bracket]:
    return [b for b in tree.interior_vertices() if b != tree.root]


def _first_multi_toward_root(
    comp: Component, parent: Mapping[Component, Component | None]
) -> Component | None:
    cur = parent[comp]
    while cur is not None:
        if cur.is_multi:
            return cur
        cur = parent[cur]
    return None


def _components_on_path(
    comp: Component,
    stop: Component | None,
    parent: Mapping[Component, Component | None],
) -> list[Component]:
    """Screens from comp (inclusive) up to stop (exclusive; None = above root)."""
    out = [comp]
    cur = parent[comp]
    while cur is not stop:
        assert cur is not None, "stop screen is not an ancestor"
        out.append(cur)
        cur = parent[cur]
    return out


def _coherence_constraints(
    tp: TreePair,
) -> list[tuple[str, tuple[int, ...], tuple[int, ...], int | None]]:
    """The {0,1} path-product identities cutting out the local poset.

    Each constraint is (description, left_path, right_path, seam_index):
    product over left q-indices must equal product over right q-indices when
    seam_index is None, and must equal r[seam_index] otherwise.
    """
    comps = non_root_components(tp)
    comp_index = {c: i for i, c in enumerate(comps)}
    parent = tp.component_parent()
    seams = non_root_interior(tp.seam_tree)
    seam_index = {b: i for i, b in enumerate(seams)}
    multis = tp.multi_components()
    constraints: list[tuple[str, tuple[int, ...], tuple[int, ...], int | None]] = []

    def ancestors(comp: Component) -> list[Component]:
        out = []
        cur = parent[comp]
        while cur is not None:
            out.append(cur)
            cur = parent[cur]
        return out

    def path_idx(comp: Component, stop: Component) -> tuple[int, ...]:
        return tuple(
            comp_index[c] for c in _components_on_path(comp, stop, parent)
        )

    for i, alpha1 in enumerate(multis):
        for alpha2 in multis[i + 1 :]:
            if alpha1.lines != alpha2.lines:
                continue
            common = [
                beta
                for beta in ancestors(alpha1)
                if beta in set(ancestors(alpha2))
                and not beta.is_multi
                and beta.lines == alpha1.lines
            ]
            for beta in common:
                constraints.append(
                    (
                        f"equal degeneration of the two screens over"
                        f" {sorted(alpha1.lines)} below their common screen",
                        path_idx(alpha1, beta),
                        path_idx(alpha2, beta),
                        None,
                    )
                )
    for alpha in multis:
        rho = alpha.lines
        if rho == tp.seam_tree.root:
            continue
        below = _first_multi_toward_root(alpha, parent)
        assert below is not None, "a splitting screen away from the root rests on one"
        constraints.append(
            (
                f"seam vertex {sorted(rho)} glues exactly when the screen over"
                f" it reaches the splitting screen below",
                path_idx(alpha, below),
                (),
                seam_index[rho],
            )
        )
    return constraints


def local_poset_elements(tp: TreePair) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All coherent (q, r) in {0,1}: q over non-root screens in depth-first
    order, r over non-root interior seam vertices in depth-first order."""
    comps = non_root_components(tp)
    seams = non_root_interior(tp.seam_tree)
    constraints = _coherence_constraints(tp)
    out = []
    for q in product((0, 1), repeat=len(comps)):
        for rv in product((0, 1), repeat=len(seams)):
            ok = True
            for _, left, right, seam_i in constraints:
                lhs = 1
                for i in left:
                    lhs *= q[i]
                rhs = rv[seam_i] if seam_i is not None else 1
                for i in right:
                    rhs *= q[i]
                if seam_i is not None:
                    if rhs != lhs:
                        ok = False
                        break
                else:
                    if lhs != rhs:
                        ok = False
                        break
            if ok:
                out.append((q, rv))
    return out


def glue_tree_pair(
    tp: TreePair, q: Sequence[int], r: Sequence[int]
) -> TreePair:
    """Glue: screens with q = 1 melt into their parents, seam vertices with
    r = 1 contract; (q, r) must satisfy the local coherence identities."""
    comps = non_root_components(tp)
    seams = non_root_interior(tp.seam_tree)
    qt = tuple(int(v) for v in q)
    rt = tuple(int(v) for v in r)
    if len(qt) != len(comps) or any(v not in (0, 1) for v in qt):
        raise ValueError(f"q must be a 0/1 vector of length {len(comps)}")
    if len(rt) != len(seams) or any(v not in (0, 1) for v in rt):
        raise ValueError(f"r must be a 0/1 vector of length {len(seams)}")
    for desc, left, right, seam_i in _coherence_constraints(tp):
        lhs = 1
        for i in left:
            lhs *= qt[i]
        rhs = rt[seam_i] if seam_i is not None else 1
        for i in right:
            rhs *= qt[i]
        if lhs != rhs:
            raise ValueError(f"incoherent gluing data: {desc}")
    keep_one = {b for b, v in zip(seams, rt) if v == 0}
    keep_one.add(tp.seam_tree.root)
    keep_one.update(frozenset({i}) for i in range(1, tp.r + 1))
    _, two = tree_pair_to_two_bracketing(tp)
    surviving_two = {
        tb
        for tb in two
        if len(tb[0]) == 1 and len(tb[1]) == 1
    }
    full = frozenset(range(1, tp.r + 1))
    all_marks = frozenset(
        (i, j) for i in range(1, tp.r + 1) for j in range(1, tp.n[i - 1] + 1)
    )
    surviving_two.add((full, all_marks))
    for comp, v in zip(comps, qt):
        if v == 0:
            surviving_two.add((comp.lines, comp.subtree_marks()))
    return two_bracketing_to_tree_pair(tp.n, keep_one, surviving_two)
