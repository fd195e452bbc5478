"""Command-line front end.

Subcommands: enumerate, fvector, vpp, vpp-table, check-local-model,
chart-eval, transition-check.  Output is deterministic: identical
invocations print identical bytes.  Exit codes: 0 success, 1 domain or
check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from multiprocessing import Pool
from typing import Sequence

from .charts import (
    StableCurve,
    evaluate_chart,
    pinned_curve,
    transition_check,
    vertex_label,
)
from .local_models import (
    _incidence,
    canonical_generators,
    coherence_generators,
    lattice_is_saturated,
    lattice_span_equal,
    monoid_saturation_witness,
)
from .tree_pairs import enumerate_tree_pairs, f_vector, stratum_dimension
from .trees import StableTree
from .vpp import vpp, vpp_table

ENUM_GUARD = 12
VPP_GUARD = 8


def _vector(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        )
    if not parts or any(p < 0 for p in parts):
        raise argparse.ArgumentTypeError(
            f"expected nonnegative mark counts, got {text!r}"
        )
    return parts


def _emit_json(payload: object) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _read_spec(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as handle:
        return json.load(handle)


def _parse_vertex(label: str) -> frozenset[int]:
    return frozenset(int(p) for p in label.split("-"))


def _parse_slices(data: dict) -> dict:
    return {
        _parse_vertex(label): (_parse_vertex(pair[0]), _parse_vertex(pair[1]))
        for label, pair in data.items()
    }


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_enumerate(args: argparse.Namespace) -> int:
    n = args.n
    bound = args.max_size if args.max_size is not None else ENUM_GUARD
    if sum(n) + len(n) > bound:
        return _fail(
            f"|n| + r = {sum(n) + len(n)} exceeds the size bound {bound}; "
            "raise --max-size to proceed"
        )
    pairs = enumerate_tree_pairs(n)
    by_dim: dict[int, int] = {}
    for tp in pairs:
        d = stratum_dimension(tp)
        by_dim[d] = by_dim.get(d, 0) + 1
    if args.format == "json":
        _emit_json(
            {
                "n": list(n),
                "total": len(pairs),
                "by_dimension": {str(d): c for d, c in sorted(by_dim.items())},
            }
        )
    else:
        dims = ", ".join(f"{d}:{c}" for d, c in sorted(by_dim.items()))
        print(f"{len(pairs)} strata: dims [{dims}]")
    return 0


def _cmd_fvector(args: argparse.Namespace) -> int:
    n = args.n
    bound = args.max_size if args.max_size is not None else ENUM_GUARD
    if sum(n) + len(n) > bound:
        return _fail(
            f"|n| + r = {sum(n) + len(n)} exceeds the size bound {bound}; "
            "raise --max-size to proceed"
        )
    counts = f_vector(n)
    if args.format == "json":
        _emit_json({"n": list(n), "f_vector": list(counts)})
    else:
        print(list(counts))
    return 0


def _cmd_vpp(args: argparse.Namespace) -> int:
    n = args.n
    dimension = sum(n) + len(n) - 3
    bound = args.max_size if args.max_size is not None else VPP_GUARD
    if dimension > bound:
        return _fail(
            f"dimension {dimension} exceeds the size bound {bound}; "
            "raise --max-size to proceed"
        )
    poly = vpp(n)
    if args.format == "json":
        _emit_json({"n": list(n), "vpp": poly.to_json()})
    else:
        print(poly)
    return 0


def _cmd_vpp_table(args: argparse.Namespace) -> int:
    d = args.dimension
    bound = args.max_size if args.max_size is not None else VPP_GUARD
    if d > bound:
        return _fail(
            f"dimension {d} exceeds the size bound {bound}; "
            "raise --max-size to proceed"
        )
    rows = vpp_table(d)
    if args.format == "json":
        _emit_json(
            {
                "dimension": d,
                "rows": [
                    {"n": list(n), "vpp": poly.to_json()} for n, poly in rows
                ],
            }
        )
    else:
        for n, poly in rows:
            label = "(" + ",".join(str(c) for c in n) + ")"
            print(f"{label}: {poly}")
    return 0


def _check_one_model(
    packed: tuple[tuple[int, ...], int, int, int]
) -> tuple[int, str | None]:
    """Worker: all local-model checks for the index-th 0-dimensional
    stratum of type n.  Returns (index, failure message or None)."""
    n, index, trials, seed = packed
    models = [
        tp for tp in enumerate_tree_pairs(n) if stratum_dimension(tp) == 0
    ]
    tp = models[index]
    model = canonical_generators(tp)
    try:
        _incidence(model)
    except ValueError as exc:
        return index, f"incidence pattern violated: {exc}"
    if not lattice_span_equal(model, coherence_generators(tp)):
        return index, "canonical generators do not span the coherence lattice"
    if not lattice_is_saturated(model):
        return index, "lattice is not saturated"
    rng = random.Random(seed * 1_000_003 + index)
    rows = model.generators
    width = model.n_coords
    for _ in range(trials):
        base = [rng.randint(0, 4) for _ in range(width)]
        for row in rows:
            c = rng.randint(-3, 3)
            base = [b - c * g for b, g in zip(base, row)]
        try:
            monoid_saturation_witness(model, tuple(base), rng.randint(2, 4))
        except (ValueError, AssertionError) as exc:
            return index, f"witness failed on {tuple(base)}: {exc}"
    return index, None


def _cmd_check_local_model(args: argparse.Namespace) -> int:
    n = args.n
    bound = args.max_size if args.max_size is not None else ENUM_GUARD
    if sum(n) + len(n) > bound:
        return _fail(
            f"|n| + r = {sum(n) + len(n)} exceeds the size bound {bound}; "
            "raise --max-size to proceed"
        )
    models = [
        tp for tp in enumerate_tree_pairs(n) if stratum_dimension(tp) == 0
    ]
    if not models:
        print("no 0-dimensional strata")
        return 0
    jobs = [(n, i, args.trials, args.seed) for i in range(len(models))]
    if args.jobs > 1:
        with Pool(args.jobs) as pool:
            outcomes = pool.map(_check_one_model, jobs)
    else:
        outcomes = [_check_one_model(job) for job in jobs]
    outcomes.sort()
    failures = 0
    lines = []
    for index, message in outcomes:
        model = canonical_generators(models[index])
        if message is None:
            lines.append(
                f"model {index}: ok ({model.n_coords} coords, "
                f"{len(model.generators)} generators)"
            )
        else:
            failures += 1
            lines.append(f"model {index}: FAIL - {message}")
    if args.format == "json":
        _emit_json(
            {
                "n": list(n),
                "models": len(models),
                "failures": failures,
                "results": [
                    {"model": i, "ok": m is None, "message": m}
                    for i, m in outcomes
                ],
            }
        )
    else:
        for line in lines:
            print(line)
        verdict = "all ok" if failures == 0 else f"{failures} failure(s)"
        print(f"checked {len(models)} models: {verdict}")
    return 0 if failures == 0 else 1


def _cmd_chart_eval(args: argparse.Namespace) -> int:
    try:
        spec = _read_spec(args.spec)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read chart spec: {exc}")
    try:
        curve = StableCurve.from_json(spec["curve"])
        glue = {
            _parse_vertex(label): Fraction(value)
            for label, value in spec["glue"].items()
        }
        slices = _parse_slices(spec["slices"]) if "slices" in spec else None
        glued = evaluate_chart(curve, glue, slices=slices)
    except (KeyError, ValueError) as exc:
        return _fail(str(exc))
    if args.format == "json":
        _emit_json(glued.to_json())
    else:
        for vertex in glued.tree.interior_vertices():
            row = ", ".join(str(x) for x in glued.positions[vertex])
            print(f"screen {vertex_label(vertex)}: {row}")
    return 0


def _cmd_transition_check(args: argparse.Namespace) -> int:
    try:
        spec = _read_spec(args.spec)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read transition spec: {exc}")
    try:
        tree1 = StableTree.from_json(spec["tree1"])
        tree2 = StableTree.from_json(spec["tree2"])
        slices1 = _parse_slices(spec["slices1"])
        slices2 = _parse_slices(spec["slices2"])
    except (KeyError, ValueError) as exc:
        return _fail(str(exc))
    try:
        report = transition_check(
            tree1,
            slices1,
            tree2,
            slices2,
            samples=args.samples,
            seed=args.seed,
        )
    except (AssertionError, ValueError) as exc:
        return _fail(f"transition check failed: {exc}")
    if args.format == "json":
        _emit_json(
            {
                "samples": report.samples,
                "verified": report.verified,
                "skipped": report.skipped,
            }
        )
    else:
        print(
            f"verified {report.verified}/{report.samples} samples "
            f"({report.skipped} skipped)"
        )
    if report.verified == 0:
        return _fail("no sample verified; the charts do not overlap here")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linestrata",
        description=(
            "Exact stratification combinatorics, lattice models, gluing "
            "charts, and virtual Poincare polynomials for moduli of marked "
            "vertical lines"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format",
            choices=("json", "pretty"),
            default="pretty",
            help="output format (default pretty)",
        )
        p.add_argument(
            "--max-size",
            type=int,
            default=None,
            help="override the size guard",
        )

    p = sub.add_parser("enumerate", help="count strata by dimension")
    p.add_argument("n", type=_vector, help="mark counts, e.g. 2,0")
    common(p)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("fvector", help="strata counts per dimension")
    p.add_argument("n", type=_vector)
    common(p)
    p.set_defaults(func=_cmd_fvector)

    p = sub.add_parser("vpp", help="virtual Poincare polynomial")
    p.add_argument("n", type=_vector)
    common(p)
    p.set_defaults(func=_cmd_vpp)

    p = sub.add_parser("vpp-table", help="all types of a given dimension")
    p.add_argument("dimension", type=int)
    common(p)
    p.set_defaults(func=_cmd_vpp_table)

    p = sub.add_parser(
        "check-local-model",
        help="verify lattice models of the 0-dimensional strata",
    )
    p.add_argument("n", type=_vector)
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20, help="witness trials per model")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.set_defaults(func=_cmd_check_local_model)

    p = sub.add_parser("chart-eval", help="glue a curve at given coordinates")
    p.add_argument("spec", help="JSON file with curve/glue/slices, or -")
    common(p)
    p.set_defaults(func=_cmd_chart_eval)

    p = sub.add_parser(
        "transition-check", help="round-trip two charts on random points"
    )
    p.add_argument("spec", help="JSON file with tree1/slices1/tree2/slices2, or -")
    common(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_transition_check)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
