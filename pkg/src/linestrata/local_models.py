"""Integer lattice models for neighborhoods of strata.

A stratum gets one lattice coordinate per non-root screen and one per
non-root interior seam bracket.  The screens' matching conditions span a
sublattice of relations; this module builds that sublattice two ways (the
raw matching vectors and a triangular canonical set), compares spans,
tests saturation, and solves the integer difference-constraint systems
used to certify that nonnegative representatives exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form

from .tree_pairs import (
    Component,
    TreePair,
    _components_on_path,
    _first_multi_toward_root,
    non_root_components,
    non_root_interior,
)

NEG_INF = -math.inf
POS_INF = math.inf

CoordKey = tuple  # ("comp", Component) or ("seam", frozenset)


class IncidencePatternError(ValueError):
    """A generator matrix does not have the column-incidence shape needed
    to turn nonnegativity constraints into a difference-bound system."""


# ---------------------------------------------------------------------------
# lattice models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeModel:
    """A tuple of named integer coordinates plus relation generators.

    seam_columns marks which coordinates belong to seam brackets; rows with
    a +1 there are seam-contraction relations, which matters for the
    incidence analysis.
    """

    names: tuple[str, ...]
    generators: tuple[tuple[int, ...], ...]
    seam_columns: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be distinct")
        for gen in self.generators:
            if len(gen) != len(self.names):
                raise ValueError("generator length does not match coordinate count")
        for col in self.seam_columns:
            if not 0 <= col < len(self.names):
                raise ValueError("seam column index out of range")

    @property
    def n_coords(self) -> int:
        return len(self.names)

    def to_json(self) -> dict:
        return {
            "names": list(self.names),
            "generators": [list(g) for g in self.generators],
            "seam_columns": sorted(self.seam_columns),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LatticeModel":
        return cls(
            names=tuple(data["names"]),
            generators=tuple(tuple(int(v) for v in g) for g in data["generators"]),
            seam_columns=frozenset(int(c) for c in data.get("seam_columns", [])),
        )


def lattice_coordinates(tp: TreePair) -> list[CoordKey]:
    """Default coordinate keys: non-root screens in walk order, then
    non-root interior seam brackets in walk order."""
    coords: list[CoordKey] = [("comp", c) for c in non_root_components(tp)]
    coords.extend(("seam", b) for b in non_root_interior(tp.seam_tree))
    return coords


def _default_names(coords: Sequence[CoordKey]) -> tuple[str, ...]:
    names = []
    comp_count = 0
    for kind, payload in coords:
        if kind == "comp":
            comp_count += 1
            names.append(f"a{comp_count}")
        else:
            names.append("b" + "-".join(str(line) for line in sorted(payload)))
    return tuple(names)


def _model_context(
    tp: TreePair,
    coordinates: Sequence[CoordKey] | None,
    names: Sequence[str] | None,
):
    default = lattice_coordinates(tp)
    if coordinates is None:
        coords = default
    else:
        coords = list(coordinates)
        if len(coords) != len(default) or set(coords) != set(default):
            raise ValueError(
                "coordinates must be a permutation of lattice_coordinates(tree_pair)"
            )
    if names is None:
        name_tuple = _default_names(coords)
    else:
        name_tuple = tuple(names)
        if len(name_tuple) != len(coords):
            raise ValueError("names length does not match coordinate count")
    col = {key: i for i, key in enumerate(coords)}
    seam_cols = frozenset(i for i, key in enumerate(coords) if key[0] == "seam")
    return coords, name_tuple, col, seam_cols


def _multi_groups(comps: Sequence[Component]) -> dict[frozenset, list[Component]]:
    """Splitting screens grouped by seam-tree vertex, in walk order."""
    groups: dict[frozenset, list[Component]] = {}
    for comp in comps:
        if comp.is_multi:
            groups.setdefault(comp.lines, []).append(comp)
    return groups


def _merge_point(
    c1: Component, c2: Component, parent: Mapping[Component, Component | None]
) -> Component:
    """First screen lying on both root-ward paths."""
    seen = []
    cur: Component | None = c1
    while cur is not None:
        seen.append(cur)
        cur = parent[cur]
    cur = c2
    while cur is not None:
        if cur in seen:
            return cur
        cur = parent[cur]
    raise AssertionError("screens share no ancestor")


def canonical_generators(
    tp: TreePair,
    *,
    coordinates: Sequence[CoordKey] | None = None,
    names: Sequence[str] | None = None,
) -> LatticeModel:
    """Triangular generating set for the relation lattice, one generator per
    splitting screen except the last one over the root bracket.

    For a splitting screen that is not the last of its bracket (in walk
    order), the generator is the path difference between it and the next
    one, each path running up to the first splitting screen above (when
    those differ) or to the first shared screen.  For the last splitting
    screen over a non-root bracket, the generator trades the seam
    coordinate against the path up to the first splitting screen above.
    Rows are emitted in reverse walk order of their owners.
    """
    coords, name_tuple, col, seam_cols = _model_context(tp, coordinates, names)
    comps = tp.components()
    parent = tp.component_parent()
    pos = {c: i for i, c in enumerate(comps)}
    groups = _multi_groups(comps)
    root_lines = frozenset(range(1, tp.r + 1))
    n = len(coords)
    rows: list[tuple[int, tuple[int, ...]]] = []

    for bracket, group in groups.items():
        for idx, alpha in enumerate(group):
            last = idx == len(group) - 1
            if last and bracket == root_lines:
                continue
            vec = [0] * n
            if not last:
                alpha2 = group[idx + 1]
                above1 = _first_multi_toward_root(alpha, parent)
                above2 = _first_multi_toward_root(alpha2, parent)
                if above1 is not None and above2 is not None and above1 is not above2:
                    stop1, stop2 = above1, above2
                else:
                    stop1 = stop2 = _merge_point(alpha, alpha2, parent)
                for comp in _components_on_path(alpha, stop1, parent):
                    vec[col[("comp", comp)]] += 1
                for comp in _components_on_path(alpha2, stop2, parent):
                    vec[col[("comp", comp)]] -= 1
            else:
                above = _first_multi_toward_root(alpha, parent)
                assert above is not None, (
                    "the last splitting screen over a non-root bracket always "
                    "sits under another splitting screen"
                )
                vec[col[("seam", bracket)]] += 1
                for comp in _components_on_path(alpha, above, parent):
                    vec[col[("comp", comp)]] -= 1
            rows.append((pos[alpha], tuple(vec)))

    rows.sort(key=lambda item: -item[0])
    return LatticeModel(
        names=name_tuple,
        generators=tuple(vec for _, vec in rows),
        seam_columns=seam_cols,
    )


def coherence_generators(
    tp: TreePair,
    *,
    coordinates: Sequence[CoordKey] | None = None,
    names: Sequence[str] | None = None,
) -> LatticeModel:
    """All matching relations: a path difference for every pair of splitting
    screens over the same bracket, and a seam-versus-path relation for every
    splitting screen over a non-root bracket."""
    coords, name_tuple, col, seam_cols = _model_context(tp, coordinates, names)
    comps = tp.components()
    parent = tp.component_parent()
    groups = _multi_groups(comps)
    root_lines = frozenset(range(1, tp.r + 1))
    n = len(coords)
    rows: list[tuple[int, ...]] = []

    for group in groups.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                beta = _merge_point(group[i], group[j], parent)
                vec = [0] * n
                for comp in _components_on_path(group[i], beta, parent):
                    vec[col[("comp", comp)]] += 1
                for comp in _components_on_path(group[j], beta, parent):
                    vec[col[("comp", comp)]] -= 1
                rows.append(tuple(vec))

    for comp in comps:
        if comp.is_multi and comp.lines != root_lines:
            above = _first_multi_toward_root(comp, parent)
            assert above is not None
            vec = [0] * n
            vec[col[("seam", comp.lines)]] += 1
            for step in _components_on_path(comp, above, parent):
                vec[col[("comp", step)]] -= 1
            rows.append(tuple(vec))

    return LatticeModel(
        names=name_tuple, generators=tuple(rows), seam_columns=seam_cols
    )


# ---------------------------------------------------------------------------
# span comparison, saturation, relations
# ---------------------------------------------------------------------------


def _generator_rows(obj) -> list[tuple[int, ...]]:
    if isinstance(obj, LatticeModel):
        gens: Iterable[Sequence[int]] = obj.generators
    else:
        gens = obj
    rows = [tuple(int(v) for v in g) for g in gens]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ValueError("generators have inconsistent lengths")
    return rows


def lattice_span_equal(first, second) -> bool:
    """Whether two generator families span the same sublattice of Z^n.

    Accepts LatticeModel instances or plain iterables of integer vectors.
    Decided by comparing column-style Hermite normal forms.
    """
    rows_a = [r for r in _generator_rows(first) if any(r)]
    rows_b = [r for r in _generator_rows(second) if any(r)]
    if rows_a and rows_b and len(rows_a[0]) != len(rows_b[0]):
        raise ValueError("generator families live in different ambient ranks")
    if not rows_a or not rows_b:
        return not rows_a and not rows_b
    return hermite_normal_form(Matrix(rows_a).T) == hermite_normal_form(
        Matrix(rows_b).T
    )


def lattice_is_saturated(model_or_generators) -> bool:
    """Whether the generated sublattice is saturated in Z^n (the quotient is
    torsion-free): every nonzero invariant factor must be 1."""
    rows = [r for r in _generator_rows(model_or_generators) if any(r)]
    if not rows:
        return True
    snf = smith_normal_form(Matrix(rows))
    for i in range(min(snf.shape)):
        entry = snf[i, i]
        if entry != 0 and abs(entry) != 1:
            return False
    return True


def _monomial_string(factors: list[tuple[str, int]]) -> str:
    if not factors:
        return "1"
    parts = []
    for name, power in factors:
        parts.append(name if power == 1 else f"{name}^{power}")
    return "*".join(parts)


def model_defining_relations(model: LatticeModel) -> list[str]:
    """Render each generator as a binomial relation "negatives = positives".

    The generator (-1, 1, 0, -1, 1) over names (a, b, c, d, e) reads
    "a*d = b*e".  Zero generators contribute nothing.
    """
    relations = []
    for gen in model.generators:
        if not any(gen):
            continue
        neg = [(model.names[i], -e) for i, e in enumerate(gen) if e < 0]
        pos = [(model.names[i], e) for i, e in enumerate(gen) if e > 0]
        relations.append(f"{_monomial_string(neg)} = {_monomial_string(pos)}")
    return relations


# ---------------------------------------------------------------------------
# difference-constraint systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffConstraintSystem:
    """x_i - x_j >= c for index pairs i < j, plus box bounds.

    lower/upper entries are integers or the infinite sentinels NEG_INF and
    POS_INF.  Only the i < j direction of each difference may be bounded;
    that shape is what the elimination solver relies on.
    """

    n: int
    diffs: tuple[tuple[int, int, int], ...]
    lower: tuple[int | float, ...]
    upper: tuple[int | float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != self.n or len(self.upper) != self.n:
            raise ValueError("bound vectors must have length n")
        for i, j, c in self.diffs:
            if not (0 <= i < j < self.n):
                raise ValueError(f"difference indices must satisfy 0 <= i < j < n, got ({i}, {j})")
            if not isinstance(c, int):
                raise ValueError("difference bounds must be integers")
        for value in (*self.lower, *self.upper):
            if value in (NEG_INF, POS_INF):
                continue
            if not isinstance(value, int):
                raise ValueError("box bounds must be integers or infinite sentinels")

    def satisfied_by(self, point: Sequence[int]) -> bool:
        if len(point) != self.n:
            return False
        for i, j, c in self.diffs:
            if point[i] - point[j] < c:
                return False
        for value, lo, hi in zip(point, self.lower, self.upper):
            if value < lo or value > hi:
                return False
        return True


@dataclass(frozen=True)
class SolveResult:
    solution: tuple[int, ...] | None
    reason: str | None = None

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def solve_difference_constraints(system: DiffConstraintSystem) -> SolveResult:
    """Solve by eliminating the last variable: pin it at its lower bound,
    fold the induced bounds into the earlier variables, and recurse.
    Variables with no finite lower bound are deferred and assigned last,
    as large as their caps allow (or 0 when uncapped).

    Because differences only constrain the i < j direction, infeasibility
    always surfaces as an emptied box, which is reported with the chain of
    folds that produced it.
    """
    n = system.n
    lower = list(system.lower)
    upper = list(system.upper)
    origin = [f"box lower bound {lo}" for lo in lower]
    into: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, j, c in system.diffs:
        into[j].append((i, c))

    solution: list[int | None] = [None] * n
    deferred: list[int] = []
    for j in range(n - 1, -1, -1):
        if lower[j] > upper[j]:
            return SolveResult(
                None,
                reason=(
                    f"empty box for x{j + 1}: lower {lower[j]} exceeds upper "
                    f"{upper[j]} ({origin[j]})"
                ),
            )
        if lower[j] == NEG_INF:
            deferred.append(j)
            continue
        pinned = int(lower[j])
        solution[j] = pinned
        for i, c in into[j]:
            candidate = pinned + c
            if candidate > lower[i]:
                lower[i] = candidate
                origin[i] = f"x{i + 1} - x{j + 1} >= {c} with x{j + 1} = {pinned}"

    for j in sorted(deferred):
        caps = []
        if upper[j] != POS_INF:
            caps.append(int(upper[j]))
        for i, c in into[j]:
            value = solution[i]
            assert value is not None
            caps.append(value - c)
        solution[j] = min(caps) if caps else 0

    final = tuple(int(v) for v in solution)  # type: ignore[arg-type]
    assert system.satisfied_by(final), "solver produced an invalid assignment"
    return SolveResult(final)


# ---------------------------------------------------------------------------
# incidence analysis and saturation witnesses
# ---------------------------------------------------------------------------


def _incidence(model: LatticeModel):
    """Row signs and per-column hits for a canonical generator matrix.

    Validates the shape that makes nonnegativity solvable as differences:
    entries in {-1, 0, 1}; each seam column hit at most once, positively;
    each screen column hit at most twice.  Rows with a seam hit count as
    negated (their coefficient variable flips sign), after which every
    twice-hit column must carry +1 on the earlier row and -1 on the later.
    Returns (signs, hits) where hits maps column -> ((row, entry), ...) in
    the sign-adjusted space.
    """
    gens = model.generators
    for row, gen in enumerate(gens):
        for col, entry in enumerate(gen):
            if entry not in (-1, 0, 1):
                raise IncidencePatternError(
                    f"entry {entry} at row {row}, column {col} is not in -1..1"
                )

    signs = []
    for row, gen in enumerate(gens):
        seam_hits = [col for col in model.seam_columns if gen[col] != 0]
        if len(seam_hits) > 1:
            raise IncidencePatternError(f"row {row} touches several seam columns")
        if seam_hits and gen[seam_hits[0]] != 1:
            raise IncidencePatternError(
                f"row {row} must carry +1 on seam column {seam_hits[0]}"
            )
        signs.append(-1 if seam_hits else 1)

    hits: dict[int, tuple[tuple[int, int], ...]] = {}
    for col in range(model.n_coords):
        touching = [
            (row, gen[col] * signs[row])
            for row, gen in enumerate(gens)
            if gen[col] != 0
        ]
        if col in model.seam_columns:
            if len(touching) > 1:
                raise IncidencePatternError(
                    f"seam column {col} is touched by several rows"
                )
        elif len(touching) > 2:
            raise IncidencePatternError(
                f"column {col} is touched by {len(touching)} rows"
            )
        elif len(touching) == 2:
            (r1, e1), (r2, e2) = touching
            if (e1, e2) != (1, -1):
                raise IncidencePatternError(
                    f"column {col} has adjusted entries ({e1}, {e2}) on rows "
                    f"({r1}, {r2}); expected (1, -1)"
                )
        if touching:
            hits[col] = tuple(touching)
    return tuple(signs), hits


def build_witness_system(model: LatticeModel, x: Sequence[int]):
    """Translate "x plus an integer combination of the generators is
    coordinatewise nonnegative" into a difference-constraint system over the
    (sign-adjusted) combination coefficients.

    Returns (system, signs, violations) where violations lists coordinates
    that are negative yet untouched by every generator; the system is
    feasible together with empty violations exactly when a witness exists.
    """
    x = tuple(int(v) for v in x)
    if len(x) != model.n_coords:
        raise ValueError("x must have one entry per coordinate")
    signs, hits = _incidence(model)
    m = len(model.generators)
    lower: list[int | float] = [NEG_INF] * m
    upper: list[int | float] = [POS_INF] * m
    diffs: list[tuple[int, int, int]] = []
    violations: list[str] = []

    for col in range(model.n_coords):
        value = x[col]
        touching = hits.get(col, ())
        if not touching:
            if value < 0:
                violations.append(
                    f"coordinate {model.names[col]} = {value} is negative and "
                    "no generator moves it"
                )
        elif len(touching) == 1:
            row, entry = touching[0]
            if entry == 1:
                lower[row] = max(lower[row], -value)
            else:
                upper[row] = min(upper[row], value)
        else:
            (r1, _), (r2, _) = touching
            diffs.append((r1, r2, -value))

    system = DiffConstraintSystem(
        n=m, diffs=tuple(diffs), lower=tuple(lower), upper=tuple(upper)
    )
    return system, signs, tuple(violations)


def monoid_saturation_witness(
    model: LatticeModel, x: Sequence[int], k: int
) -> tuple[int, ...]:
    """Certify that x is representable as (nonnegative vector) modulo the
    generator lattice, given that k*x is.

    Returns coefficients b with x + sum(b[r] * generator[r]) >= 0.  Raises
    ValueError when k*x has no such representation (the precondition
    fails), and AssertionError in the impossible case that k*x has one
    while x does not.
    """
    x = tuple(int(v) for v in x)
    if len(x) != model.n_coords:
        raise ValueError("x must have one entry per coordinate")
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    if all(v >= 0 for v in x):
        return (0,) * len(model.generators)

    def attempt(vec: tuple[int, ...]):
        system, signs, violations = build_witness_system(model, vec)
        if violations:
            return None, "; ".join(violations)
        result = solve_difference_constraints(system)
        if not result.feasible:
            return None, result.reason
        coeffs = tuple(v * s for v, s in zip(result.solution, signs))
        shifted = list(vec)
        for b, gen in zip(coeffs, model.generators):
            for col, entry in enumerate(gen):
                shifted[col] += b * entry
        assert all(v >= 0 for v in shifted), "witness fails re-substitution"
        return coeffs, None

    coeffs, reason = attempt(x)
    if coeffs is not None:
        return coeffs
    scaled, scaled_reason = attempt(tuple(k * v for v in x))
    if scaled is None:
        raise ValueError(
            f"precondition failed: {k} * x is not representable: {scaled_reason}"
        )
    raise AssertionError(
        f"saturation violated for x = {x}: the scaled point is representable "
        f"but x is not ({reason})"
    )
