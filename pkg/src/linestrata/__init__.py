"""Exact combinatorics for compactified moduli of marked vertical lines.

The package computes with the stratification of these moduli spaces:
stable trees and tree pairs index the strata, integer lattice models
describe neighborhoods of the deepest strata, gluing charts move between
strata, and virtual Poincare polynomials are assembled either by a fiber
recursion or stratum by stratum.
"""

from .exact_poly import (
    MultiPoly,
    UniPoly,
    config_poly,
    monomial_content_split,
    multi_eval,
    quotient_config_poly,
)
from .trees import (
    StableTree,
    bracketing,
    enumerate_stable_trees,
    glue_tree,
    poset_leq_tree,
    top_tree,
    tree_dimension,
    tree_from_bracketing,
)
from .tree_pairs import (
    Component,
    Mark,
    Seam,
    TreePair,
    enumerate_stable_root_data,
    enumerate_tree_pairs,
    enumerate_two_bracketings_bruteforce,
    f_vector,
    glue_tree_pair,
    local_poset_elements,
    poset_leq_tree_pair,
    stratum_dimension,
    top_tree_pair,
    tree_pair_to_two_bracketing,
    two_bracketing_to_tree_pair,
    validate_tree_pair,
)
from .local_models import (
    DiffConstraintSystem,
    LatticeModel,
    SolveResult,
    canonical_generators,
    coherence_generators,
    lattice_is_saturated,
    lattice_span_equal,
    model_defining_relations,
    monoid_saturation_witness,
    solve_difference_constraints,
)
from .charts import (
    INFINITY,
    StableCurve,
    StablePlaneTree,
    default_slices,
    evaluate_chart,
    extract_q_factor,
    gluing_polynomial,
    gluing_polynomial_2d,
    invert_chart,
    normalize_to_slice,
    pinned_curve,
    transition_check,
)
from .vpp import stratum_vpp, vpp, vpp_by_strata, vpp_seam, vpp_table

__version__ = "0.1.0"

__all__ = [
    "UniPoly",
    "MultiPoly",
    "config_poly",
    "quotient_config_poly",
    "multi_eval",
    "monomial_content_split",
    "StableTree",
    "top_tree",
    "bracketing",
    "tree_from_bracketing",
    "enumerate_stable_trees",
    "poset_leq_tree",
    "tree_dimension",
    "glue_tree",
    "Mark",
    "Seam",
    "Component",
    "TreePair",
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
    "local_poset_elements",
    "glue_tree_pair",
    "LatticeModel",
    "canonical_generators",
    "coherence_generators",
    "lattice_span_equal",
    "lattice_is_saturated",
    "model_defining_relations",
    "DiffConstraintSystem",
    "SolveResult",
    "solve_difference_constraints",
    "monoid_saturation_witness",
    "INFINITY",
    "StableCurve",
    "pinned_curve",
    "default_slices",
    "gluing_polynomial",
    "extract_q_factor",
    "evaluate_chart",
    "normalize_to_slice",
    "invert_chart",
    "transition_check",
    "StablePlaneTree",
    "gluing_polynomial_2d",
    "vpp",
    "vpp_seam",
    "vpp_table",
    "stratum_vpp",
    "vpp_by_strata",
    "__version__",
]
