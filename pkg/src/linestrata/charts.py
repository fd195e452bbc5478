"""Gluing polynomials, chart evaluation, inversion, and transition checks.

A chart takes a boundary stratum (a stable tree with slice-pinned screen
positions) plus one gluing coordinate per non-root interior vertex, and
produces the glued configuration.  Everything here is exact rational
arithmetic; gluing coordinates may be left symbolic, in which case results
are polynomials in the b-variables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .exact_poly import MultiPoly, monomial_content_split, multi_eval
from .trees import Bracket, StableTree, glue_tree
from .tree_pairs import Component, Mark, TreePair


class AtInfinity:
    """Placeholder position for vertices outside a subtree.

    It deliberately supports no arithmetic; code that would add or scale it
    is wrong and should fail loudly.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "at-infinity"


INFINITY = AtInfinity()


def vertex_label(vertex: Bracket) -> str:
    return "-".join(str(i) for i in sorted(vertex))


def _b_variable(vertex: Bracket) -> str:
    return f"b[{vertex_label(vertex)}]"


def _as_vertex(tree: StableTree, v) -> Bracket:
    if isinstance(v, int):
        v = frozenset({v})
    v = frozenset(v)
    if v not in tree.brackets:
        raise KeyError(f"{sorted(v)} is not a vertex of the tree")
    return v


def default_slices(tree: StableTree) -> dict[Bracket, tuple[Bracket, Bracket]]:
    """Per interior vertex, the two children pinned to 0 and 1: by default
    the first two in smallest-leaf order."""
    return {
        rho: (tree.children(rho)[0], tree.children(rho)[1])
        for rho in tree.interior_vertices()
    }


@dataclass
class StableCurve:
    """A stable tree together with one screen of positions per interior
    vertex, aligned with the child order of that vertex."""

    tree: StableTree
    positions: dict[Bracket, tuple[Fraction, ...]]

    def __post_init__(self) -> None:
        cleaned: dict[Bracket, tuple[Fraction, ...]] = {}
        interior = set(self.tree.interior_vertices())
        for key, values in self.positions.items():
            key = frozenset(key)
            if key not in interior:
                raise ValueError(f"{sorted(key)} is not an interior vertex")
            values = tuple(Fraction(v) for v in values)
            if len(values) != self.tree.in_degree(key):
                raise ValueError(
                    f"screen at {sorted(key)} needs "
                    f"{self.tree.in_degree(key)} positions"
                )
            if len(set(values)) != len(values):
                raise ValueError(f"screen at {sorted(key)} has coincident positions")
            cleaned[key] = values
        missing = interior - set(cleaned)
        if missing:
            raise ValueError(
                f"missing screens: {sorted(sorted(b) for b in missing)}"
            )
        self.positions = cleaned

    def position_toward(self, rho: Bracket, sigma: Bracket):
        """The position at screen rho in the direction of sigma, or the
        at-infinity marker when sigma does not lie below rho."""
        rho = _as_vertex(self.tree, rho)
        sigma = _as_vertex(self.tree, sigma)
        if not sigma < rho:
            return INFINITY
        for index, child in enumerate(self.tree.children(rho)):
            if sigma <= child:
                return self.positions[rho][index]
        raise AssertionError("child lookup failed")

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "positions": {
                vertex_label(v): [str(x) for x in xs]
                for v, xs in sorted(self.positions.items(), key=lambda kv: sorted(kv[0]))
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "StableCurve":
        tree = StableTree.from_json(data["tree"])
        positions = {}
        for label, values in data["positions"].items():
            vertex = frozenset(int(p) for p in label.split("-"))
            positions[vertex] = tuple(Fraction(v) for v in values)
        return cls(tree, positions)


def pinned_curve(
    tree: StableTree, slices: Mapping[Bracket, tuple[Bracket, Bracket]]
) -> StableCurve:
    """The fully-pinned curve of a 0-dimensional (binary) tree: every screen
    holds exactly the two slice children, at 0 and 1."""
    positions = {}
    for rho in tree.interior_vertices():
        children = tree.children(rho)
        if len(children) != 2:
            raise ValueError(
                f"vertex {sorted(rho)} has {len(children)} children; "
                "a fully pinned curve needs a binary tree"
            )
        s0, s1 = slices[rho]
        values = [None, None]
        values[children.index(s0)] = Fraction(0)
        values[children.index(s1)] = Fraction(1)
        positions[rho] = tuple(values)
    return StableCurve(tree, positions)


def check_slices(curve: StableCurve, slices: Mapping[Bracket, tuple[Bracket, Bracket]]) -> None:
    for rho, (s0, s1) in slices.items():
        rho = frozenset(rho)
        if curve.position_toward(rho, frozenset(s0)) != 0:
            raise ValueError(f"slice child {sorted(s0)} of {sorted(rho)} is not at 0")
        if curve.position_toward(rho, frozenset(s1)) != 1:
            raise ValueError(f"slice child {sorted(s1)} of {sorted(rho)} is not at 1")


# ---------------------------------------------------------------------------
# gluing polynomials
# ---------------------------------------------------------------------------


def gluing_polynomial(curve: StableCurve, rho, sigma) -> MultiPoly:
    """Position of sigma as seen from screen rho, as a polynomial in the
    gluing variables of the vertices strictly between them.

    Walking down from rho toward sigma, each step contributes the local
    position scaled by the product of the b-variables crossed so far.
    """
    tree = curve.tree
    rho = _as_vertex(tree, rho)
    sigma = _as_vertex(tree, sigma)
    if not sigma < rho:
        raise ValueError(
            f"{sorted(sigma)} is not strictly below {sorted(rho)}; "
            "its position is at infinity"
        )
    poly = MultiPoly.zero()
    b_path: list[str] = []
    current = rho
    while current != sigma:
        step = None
        for index, child in enumerate(tree.children(current)):
            if sigma <= child:
                step = child
                coeff = curve.positions[current][index]
                break
        assert step is not None
        poly = poly + MultiPoly.from_monomial({name: 1 for name in b_path}, coeff)
        b_path.append(_b_variable(step))
        current = step
    return poly


def extract_q_factor(curve: StableCurve, i: int, j: int) -> MultiPoly:
    """The monomial-free part of the difference of two leaf positions.

    Stripping the shared monomial content leaves the factor whose
    nonvanishing keeps leaves i and j apart after gluing; its constant term
    is the difference of two distinct positions on the deepest shared
    screen, hence nonzero.
    """
    if i == j:
        raise ValueError("leaves must be distinct")
    root = curve.tree.root
    difference = gluing_polynomial(curve, root, i) - gluing_polynomial(
        curve, root, j
    )
    assert not difference.is_zero()
    _, reduced = monomial_content_split(difference)
    return reduced


# ---------------------------------------------------------------------------
# chart evaluation
# ---------------------------------------------------------------------------


def _b_assignment(
    tree: StableTree, b: Mapping
) -> tuple[dict[Bracket, Fraction], dict[str, Fraction]]:
    values = {frozenset(k): Fraction(v) for k, v in b.items()}
    expected = {v for v in tree.interior_vertices() if v != tree.root}
    if set(values) != expected:
        raise ValueError(
            "gluing coordinates must cover exactly the non-root interior vertices"
        )
    by_name = {_b_variable(v): x for v, x in values.items()}
    return values, by_name


def evaluate_chart(
    curve: StableCurve,
    b: Mapping,
    slices: Mapping[Bracket, tuple[Bracket, Bracket]] | None = None,
) -> StableCurve:
    """Glue the curve along b: vertices with a nonzero coordinate melt into
    their parent, and every surviving screen's positions are read off the
    gluing polynomials.

    Raises ValueError when some pair-separating factor vanishes at b (the
    point is outside the chart domain) or when the slice pinning fails.
    """
    tree = curve.tree
    if slices is not None:
        check_slices(curve, slices)
    values, by_name = _b_assignment(tree, b)

    leaves = sorted(leaf for bracket in tree.brackets if len(bracket) == 1 for leaf in bracket)
    for a_index in range(len(leaves)):
        for b_index in range(a_index + 1, len(leaves)):
            i, j = leaves[a_index], leaves[b_index]
            factor = extract_q_factor(curve, i, j)
            needed = {name: by_name.get(name, Fraction(0)) for name in factor.variables()}
            if multi_eval(factor, needed) == 0:
                raise ValueError(
                    f"outside the chart domain: the separating factor for "
                    f"leaves {i} and {j} vanishes"
                )

    pattern = {v: (0 if x == 0 else 1) for v, x in values.items()}
    new_tree = glue_tree(tree, pattern)
    positions = {}
    for rho in new_tree.interior_vertices():
        row = []
        for child in new_tree.children(rho):
            poly = gluing_polynomial(curve, rho, child)
            needed = {name: by_name[name] for name in poly.variables()}
            row.append(multi_eval(poly, needed))
        positions[rho] = tuple(row)
    return StableCurve(new_tree, positions)


def normalize_to_slice(values: Sequence, pins: tuple[int, int]) -> tuple[Fraction, ...]:
    """Affine change of frame sending values[pins[0]] to 0 and
    values[pins[1]] to 1."""
    values = [Fraction(v) for v in values]
    v0 = values[pins[0]]
    v1 = values[pins[1]]
    if v0 == v1:
        raise ValueError("pinned positions coincide; no affine normalization")
    return tuple((v - v0) / (v1 - v0) for v in values)


def _anchor_leaf(
    tree: StableTree,
    slices: Mapping[Bracket, tuple[Bracket, Bracket]],
    vertex: Bracket,
) -> int:
    """The leaf reached from vertex by always descending into the 0-pinned
    slice child."""
    while len(vertex) > 1:
        vertex = slices[vertex][0]
    return next(iter(vertex))


def invert_chart(
    tree: StableTree,
    slices: Mapping[Bracket, tuple[Bracket, Bracket]],
    leaf_positions: Sequence,
) -> dict[Bracket, Fraction]:
    """Recover the gluing coordinates producing the given fully-glued leaf
    configuration, by the top-down anchor method.

    Each screen's accumulated scale is the difference of its two anchor
    leaves (the all-0-descents of its slice children); the gluing
    coordinate is the ratio of a screen's scale to its parent's.  Only
    0-dimensional (binary) trees have charts of this shape.
    """
    interior = tree.interior_vertices()
    for rho in interior:
        if tree.in_degree(rho) != 2:
            raise ValueError(
                "chart inversion needs a 0-dimensional (binary) tree; "
                f"vertex {sorted(rho)} has {tree.in_degree(rho)} children"
            )
    y = [Fraction(v) for v in leaf_positions]
    if len(y) != tree.r:
        raise ValueError("one position per leaf is required")

    def anchor_value(vertex: Bracket) -> Fraction:
        return normalized[_anchor_leaf(tree, slices, vertex) - 1]

    root = tree.root
    pin0 = _anchor_leaf(tree, slices, slices[root][0]) - 1
    pin1 = _anchor_leaf(tree, slices, slices[root][1]) - 1
    normalized = list(normalize_to_slice(y, (pin0, pin1)))

    scale: dict[Bracket, Fraction] = {root: Fraction(1)}
    out: dict[Bracket, Fraction] = {}
    for rho in interior:
        if rho == root:
            continue
        s0, s1 = slices[rho]
        scale[rho] = anchor_value(s1) - anchor_value(s0)
        parent_scale = scale[tree.parent(rho)]
        if parent_scale == 0:
            raise ValueError(
                f"outside the invertible locus: the screen above {sorted(rho)} "
                "is collapsed"
            )
        out[rho] = scale[rho] / parent_scale
    return out


# ---------------------------------------------------------------------------
# transition verification
# ---------------------------------------------------------------------------


@dataclass
class TransitionReport:
    samples: int
    verified: int
    skipped: int


def transition_check(
    tree1: StableTree,
    slices1: Mapping[Bracket, tuple[Bracket, Bracket]],
    tree2: StableTree,
    slices2: Mapping[Bracket, tuple[Bracket, Bracket]],
    samples: int = 100,
    seed: int = 0,
) -> TransitionReport:
    """Round-trip random interior points through chart 1 and back through
    chart 2: glue via chart 1, renormalize into chart 2's frame, invert,
    re-glue, and demand exact agreement.  Samples falling outside either
    domain (or on a boundary) are skipped and counted.
    """
    if tree1.r != tree2.r:
        raise ValueError("charts live on different moduli (leaf counts differ)")
    curve1 = pinned_curve(tree1, slices1)
    curve2 = pinned_curve(tree2, slices2)
    root2 = tree2.root
    pin0 = _anchor_leaf(tree2, slices2, slices2[root2][0]) - 1
    pin1 = _anchor_leaf(tree2, slices2, slices2[root2][1]) - 1
    free1 = [v for v in tree1.interior_vertices() if v != tree1.root]

    rng = random.Random(seed)
    verified = 0
    skipped = 0
    for _ in range(samples):
        b1 = {
            v: Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for v in free1
        }
        if any(x == 0 for x in b1.values()):
            skipped += 1
            continue
        try:
            glued = evaluate_chart(curve1, b1)
        except ValueError:
            skipped += 1
            continue
        leaf_row = glued.positions[glued.tree.root]
        if leaf_row[pin0] == leaf_row[pin1]:
            skipped += 1
            continue
        target = normalize_to_slice(leaf_row, (pin0, pin1))
        try:
            b2 = invert_chart(tree2, slices2, target)
        except ValueError:
            skipped += 1
            continue
        if any(x == 0 for x in b2.values()):
            skipped += 1
            continue
        try:
            reglued = evaluate_chart(curve2, b2)
        except ValueError:
            skipped += 1
            continue
        assert tuple(reglued.positions[reglued.tree.root]) == tuple(target), (
            "transition round trip failed"
        )
        verified += 1
    return TransitionReport(samples=samples, verified=verified, skipped=skipped)


# ---------------------------------------------------------------------------
# plane trees: the two-dimensional gluing polynomials
# ---------------------------------------------------------------------------


@dataclass
class StablePlaneTree:
    """A stratum plus coordinates: line positions per interior seam vertex
    and a (x, y) point per child slot of every screen.

    points[k] indexes screens by walk order; points[k][s][c] is the point
    of child c on seam s.  Splitting screens inherit their line positions
    from the seam vertex they lie over.
    """

    tree_pair: TreePair
    seam_positions: dict[Bracket, tuple[Fraction, ...]]
    points: dict[int, tuple[tuple[tuple[Fraction, Fraction], ...], ...]]

    def __post_init__(self) -> None:
        self.seam_positions = {
            frozenset(k): tuple(Fraction(x) for x in v)
            for k, v in self.seam_positions.items()
        }
        self.points = {
            int(k): tuple(
                tuple((Fraction(x), Fraction(y)) for x, y in seam_row)
                for seam_row in rows
            )
            for k, rows in self.points.items()
        }
        self.validate()

    def validate(self) -> None:
        tree = self.tree_pair.seam_tree
        interior = set(tree.interior_vertices())
        if set(self.seam_positions) != interior:
            raise ValueError("seam positions must cover the interior seam vertices")
        for rho, xs in self.seam_positions.items():
            if len(xs) != tree.in_degree(rho):
                raise ValueError(f"seam vertex {sorted(rho)} needs {tree.in_degree(rho)} lines")
            if len(set(xs)) != len(xs):
                raise ValueError(f"seam vertex {sorted(rho)} has coincident lines")
        comps = self.tree_pair.components()
        if set(self.points) != set(range(len(comps))):
            raise ValueError("points must cover the screens by walk index")
        for index, comp in enumerate(comps):
            rows = self.points[index]
            if len(rows) != len(comp.seams):
                raise ValueError(f"screen {index} needs {len(comp.seams)} seam rows")
            line_positions = []
            for seam, row in zip(comp.seams, rows):
                if len(row) != len(seam.children):
                    raise ValueError(
                        f"screen {index} seam {sorted(seam.lines)} needs "
                        f"{len(seam.children)} points"
                    )
                xs = {x for x, _ in row}
                if len(xs) > 1:
                    raise ValueError(
                        f"screen {index} seam {sorted(seam.lines)} mixes line positions"
                    )
                if row:
                    line_positions.append(row[0][0])
                ys = [y for _, y in row]
                if len(set(ys)) != len(ys):
                    raise ValueError(
                        f"screen {index} seam {sorted(seam.lines)} has coincident points"
                    )
            if comp.is_multi:
                expected = self.seam_positions[comp.lines]
                by_lines = {frozenset(s.lines): i for i, s in enumerate(comp.seams)}
                order = tree.children(comp.lines)
                for pos, child_vertex in zip(expected, order):
                    seam_index = by_lines[child_vertex]
                    row = self.points[index][seam_index]
                    if row and row[0][0] != pos:
                        raise ValueError(
                            f"screen {index} does not inherit the line position "
                            f"of seam vertex {sorted(comp.lines)}"
                        )


def _a_variable(index: int) -> str:
    return f"a[{index}]"


def gluing_polynomial_2d(
    plane_tree: StablePlaneTree, alpha: int, beta
) -> tuple[MultiPoly, MultiPoly]:
    """Both coordinates of the position of beta as seen from screen alpha,
    as polynomials in the melting variables of the screens in between.

    beta is a screen index or a mark; it must lie strictly below alpha.
    """
    comps = plane_tree.tree_pair.components()
    if not 0 <= alpha < len(comps):
        raise ValueError("alpha is not a screen index")
    index_of = {id(c): i for i, c in enumerate(comps)}

    # parent chain on identity to find the downward path alpha -> beta
    def locate(target) -> list[tuple[int, int, int]] | None:
        """Path as (screen index, seam slot, child slot) steps from alpha."""

        def search(comp: Component) -> list[tuple[int, int, int]] | None:
            for s_index, seam in enumerate(comp.seams):
                for c_index, child in enumerate(seam.children):
                    here = (index_of[id(comp)], s_index, c_index)
                    if isinstance(target, Mark):
                        if child == target:
                            return [here]
                    elif isinstance(child, Component) and index_of[id(child)] == target:
                        return [here]
                    if isinstance(child, Component):
                        deeper = search(child)
                        if deeper is not None:
                            return [here] + deeper
            return None

        return search(comps[alpha])

    if isinstance(beta, Mark):
        path = locate(beta)
    else:
        beta = int(beta)
        path = locate(beta)
    if path is None:
        raise ValueError("beta does not lie strictly below alpha")

    poly_x = MultiPoly.zero()
    poly_y = MultiPoly.zero()
    a_path: list[str] = []
    for step, (screen_index, s_index, c_index) in enumerate(path):
        x, y = plane_tree.points[screen_index][s_index][c_index]
        mono = {name: 1 for name in a_path}
        poly_x = poly_x + MultiPoly.from_monomial(mono, x)
        poly_y = poly_y + MultiPoly.from_monomial(mono, y)
        if step + 1 < len(path):
            # the melting variable of the screen the walk enters next
            a_path.append(_a_variable(path[step + 1][0]))
    return poly_x, poly_y
