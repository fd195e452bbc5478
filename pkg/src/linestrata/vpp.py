"""Virtual Poincare polynomials of compactified marked-line moduli.

All values are exact integer polynomials (:class:`~linestrata.exact_poly.UniPoly`).
The central routine computes the polynomial of a fiber product of marked-line
spaces over the common line-collision moduli; the polynomial of a single space
W_n is the one-factor case, and the line-collision moduli itself ("seam"
polynomial) is the zero-factor case.

The recursion stratifies by how the configuration degenerates seen from the
root screen:

* each factor independently carries a hierarchy of fully-fused screens (every
  fused level splits its content into at least two sub-screens at distinct
  heights, weight ``quotient_config_poly(#children)``);
* the leaves of those hierarchies are screens on which the lines separate into
  a shared partition P with at least two parts (weight
  ``quotient_config_poly(#P)`` once, since line positions are common to all
  factors);
* on each screen, marks over a single line form height configurations with
  point clusters (cluster of size m contributing the seam polynomial p_m),
  marks over a fat part are distributed into sub-screens whose pooled
  collection forms a smaller fiber product over that part;
* every screen is taken modulo its two-dimensional reparametrization group,
  dividing out one factor of x^2 (the division is checked to be exact);
* a fat part carrying no marks at all still degenerates the shared base and
  contributes the bare seam polynomial of the part.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from ._combi import set_partitions
from .exact_poly import UniPoly, config_poly, quotient_config_poly

__all__ = [
    "vpp",
    "vpp_seam",
    "vpp_fiber_product",
    "vpp_table",
    "vpp_by_strata",
    "stratum_vpp",
]

Vector = tuple[int, ...]

# Flag for cross-checking the closed-form shortcut for single-mark factors in
# tests; leave True in normal use.
_USE_BASIS_SHORTCUT = True


@lru_cache(maxsize=None)
def vpp_seam(r: int) -> UniPoly:
    """Polynomial of the compactified moduli of r collapsing lines.

    p_1 = p_2 = 1; for larger r, sum over partitions of the lines into at
    least two groups at distinct positions, each group recursively carrying
    its own collapsed moduli.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if r <= 2:
        return UniPoly.one()
    total = UniPoly.zero()
    for parts in set_partitions(list(range(r))):
        if len(parts) < 2:
            continue
        term = quotient_config_poly(len(parts))
        for block in parts:
            term = term * vpp_seam(len(block))
        total = total + term
    return total


def _validate_vector(v: Sequence[int], r: int) -> Vector:
    out = tuple(int(c) for c in v)
    if len(out) != r:
        raise ValueError(f"count vector {out} does not have length {r}")
    if any(c < 0 for c in out):
        raise ValueError(f"count vector {out} has a negative entry")
    return out


def _marks_of(v: Vector) -> list[tuple[int, int]]:
    """Labeled marks of a count vector: (line, index) pairs, lines 1-based."""
    return [(i + 1, j + 1) for i, c in enumerate(v) for j in range(c)]


def _count_vector(marks: Iterable[tuple[int, int]], r: int) -> Vector:
    out = [0] * r
    for line, _ in marks:
        out[line - 1] += 1
    return tuple(out)


@lru_cache(maxsize=None)
def _screen_distribution(v: Vector) -> tuple[tuple[tuple[Vector, ...], UniPoly], ...]:
    """Weighted multisets of screens a single factor can present to the root.

    A factor either opens directly as one screen carrying all its marks, or
    fuses at the top: the fused level splits the marks into at least two
    groups at distinct heights (weight quotient_config_poly(#groups)), each
    group recursively presenting its own screens.
    """
    r = len(v)
    out: dict[tuple[Vector, ...], UniPoly] = {(v,): UniPoly.one()}
    marks = _marks_of(v)
    for parts in set_partitions(marks):
        if len(parts) < 2:
            continue
        weight = quotient_config_poly(len(parts))
        combos: list[tuple[tuple[Vector, ...], UniPoly]] = [((), UniPoly.one())]
        for block in parts:
            sub = _screen_distribution(_count_vector(block, r))
            combos = [
                (screens + s2, w * w2)
                for screens, w in combos
                for s2, w2 in sub
            ]
        for screens, w in combos:
            key = tuple(sorted(screens))
            prev = out.get(key, UniPoly.zero())
            out[key] = prev + weight * w
    return tuple(sorted(out.items(), key=lambda kv: kv[0]))


@lru_cache(maxsize=None)
def _point_factor(c: int) -> UniPoly:
    """Height moduli of c marks on one line of a screen.

    Sum over clusterings: the clusters sit at distinct heights avoiding
    nothing (config_poly(#clusters, 0)); a cluster of size m carries the
    collapsed moduli p_m of its bubble.
    """
    total = UniPoly.zero()
    for parts in set_partitions(list(range(c))):
        term = config_poly(len(parts), 0)
        for block in parts:
            term = term * vpp_seam(len(block))
        total = total + term
    return total


def _fat_part_factor(part: tuple[int, ...], screens: tuple[Vector, ...]) -> UniPoly:
    """Contribution of a part with >= 2 lines across all screens.

    Each screen distributes its marks over the part into sub-screens at
    distinct heights (config_poly(#sub-screens, 0)); the pooled sub-screens
    form a fiber product over the part's own collision moduli.
    """
    m = len(part)
    per_screen: list[list[tuple[UniPoly, tuple[Vector, ...]]]] = []
    for s in screens:
        marks = [(line, j + 1) for line in part for j in range(s[line - 1])]
        options: list[tuple[UniPoly, tuple[Vector, ...]]] = []
        for parts_of_marks in set_partitions(marks):
            blocks = tuple(
                tuple(
                    sum(1 for line, _ in block if line == p_line)
                    for p_line in part
                )
                for block in parts_of_marks
            )
            options.append((config_poly(len(parts_of_marks), 0), blocks))
        per_screen.append(options)
    total = UniPoly.zero()
    for combo in product(*per_screen):
        weight = UniPoly.one()
        pooled: list[Vector] = []
        for w, blocks in combo:
            weight = weight * w
            pooled.extend(blocks)
        total = total + weight * _fiber(m, tuple(sorted(pooled)))
    return total


@lru_cache(maxsize=None)
def _all_root(r: int, screens: tuple[Vector, ...]) -> UniPoly:
    """Sum over shared line partitions for a fixed pooled screen multiset."""
    total = UniPoly.zero()
    for parts in set_partitions(list(range(1, r + 1))):
        if len(parts) < 2:
            continue
        prod = UniPoly.one()
        for part in parts:
            part_t = tuple(sorted(part))
            if len(part_t) == 1:
                line = part_t[0]
                for s in screens:
                    prod = prod * _point_factor(s[line - 1])
            else:
                prod = prod * _fat_part_factor(part_t, screens)
        # one x^2 of screen reparametrizations divided out per screen; the
        # division must be exact
        total = total + quotient_config_poly(len(parts)) * prod.shift_down(
            2 * len(screens)
        )
    return total


@lru_cache(maxsize=None)
def _fiber(r: int, factors: tuple[Vector, ...]) -> UniPoly:
    if r == 1:
        out = UniPoly.one()
        for f in factors:
            out = out * vpp_seam(sum(f) if sum(f) >= 1 else 1)
        return out
    if not factors:
        return vpp_seam(r)
    if _USE_BASIS_SHORTCUT and all(sum(f) == 1 for f in factors):
        # a single-mark factor is isomorphic to the base, so the fiber
        # product collapses to the base itself
        return vpp_seam(r)
    dists = [_screen_distribution(f) for f in factors]
    pooled: dict[tuple[Vector, ...], UniPoly] = {}
    for combo in product(*dists):
        screens: list[Vector] = []
        weight = UniPoly.one()
        for s, w in combo:
            screens.extend(s)
            weight = weight * w
        key = tuple(sorted(screens))
        pooled[key] = pooled.get(key, UniPoly.zero()) + weight
    total = UniPoly.zero()
    for screens, weight in sorted(pooled.items(), key=lambda kv: kv[0]):
        total = total + weight * _all_root(r, screens)
    return total


def vpp_fiber_product(r: int, factors: Iterable[Sequence[int]]) -> UniPoly:
    """Polynomial of the fiber product of marked-line spaces over r lines.

    Each factor is a count vector of length r saying how many marks it
    carries on each line; factors must carry at least one mark.  An empty
    factor list gives the bare collision moduli (vpp_seam(r)).
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    fs = tuple(_validate_vector(f, r) for f in factors)
    for f in fs:
        if sum(f) == 0:
            raise ValueError(f"factor {f} carries no marks")
    return _fiber(r, tuple(sorted(fs)))


def vpp(n: Sequence[int]) -> UniPoly:
    """Polynomial of the space of r marked lines with n_i marks on line i."""
    nt = tuple(int(c) for c in n)
    if not nt:
        raise ValueError("n must have at least one entry")
    if any(c < 0 for c in nt):
        raise ValueError(f"{nt} has a negative entry")
    r = len(nt)
    if sum(nt) == 0:
        return vpp_seam(r)
    # relabeling the lines is an isomorphism, so sort for the cache
    return _fiber(r, (tuple(sorted(nt)),))


def _ascending_vectors(r: int, total: int) -> list[Vector]:
    """Weakly increasing r-tuples of nonnegative ints with the given sum."""
    out: list[Vector] = []

    def rec(prefix: tuple[int, ...], minimum: int, left: int) -> None:
        if len(prefix) == r:
            if left == 0:
                out.append(prefix)
            return
        slots = r - len(prefix)
        for c in range(minimum, left + 1):
            if c * slots <= left:
                rec(prefix + (c,), c, left - c)

    rec((), 0, total)
    return out


def vpp_table(d: int) -> list[tuple[Vector, UniPoly]]:
    """All rows of dimension d: weakly increasing n with |n| + r = d + 3.

    Rows are grouped by increasing r and ordered lexicographically within
    each group, matching the published table layout.
    """
    if d < 0:
        raise ValueError("dimension must be nonnegative")
    rows: list[tuple[Vector, UniPoly]] = []
    for r in range(1, d + 3):
        total = d + 3 - r
        if total < 1:
            break
        for n in _ascending_vectors(r, total):
            rows.append((n, vpp(n)))
    return rows


# ---------------------------------------------------------------------------
# stratum-sum oracle
# ---------------------------------------------------------------------------


def stratum_vpp(tp) -> UniPoly:
    """Product formula for the open stratum of a single tree pair.

    Interior seam-tree vertices contribute the height moduli of their
    children; multi-line screens contribute the height configurations of
    their seam contents divided by the screen reparametrizations; single-line
    screens contribute their children's heights modulo affine maps.
    """
    out = UniPoly.one()
    for rho in tp.seam_tree.interior_vertices():
        out = out * quotient_config_poly(tp.seam_tree.in_degree(rho))
    for comp in tp.components():
        if comp.is_multi:
            factor = UniPoly.one()
            for seam in comp.seams:
                factor = factor * config_poly(len(seam.children), 0)
            out = out * factor.shift_down(2)
        else:
            out = out * quotient_config_poly(len(comp.seams[0].children))
    return out


def vpp_by_strata(n: Sequence[int]) -> UniPoly:
    """Sum of stratum polynomials over all tree pairs; equals vpp(n)."""
    from .tree_pairs import enumerate_tree_pairs

    total = UniPoly.zero()
    for tp in enumerate_tree_pairs(n):
        total = total + stratum_vpp(tp)
    return total
