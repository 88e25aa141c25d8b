"""Exact scissors-congruence computations for rectilinear polytopes."""

from .assembler import (
    AssemblerSpec,
    FiniteSetAssembler,
    PieceMap,
    Span,
    Transform,
    check_assembler_axioms,
    compose_spans,
    embeddings_disjoint,
    parse_spec,
    span_equal,
)
from .constructors import (
    conjugator_from_disjoint,
    construct_congruence,
    construct_embedding_ea,
    construct_embedding_squeeze,
)
from .groups import (
    ON_CUT,
    ScissorsAuto,
    ScissorsCongruence,
    ScissorsEmbedding,
    apply,
    compose,
    extend_along,
    identity,
    invert,
    random_auto,
    rotation,
    verify,
)
from .invariants import RecInvariant, WedgeElement, check_k1_relations, realize_wedge, rec_invariant, saf
from .ktheory import (
    FGAbGroup,
    GradedAb,
    exterior_power_matrix,
    kunneth_smash,
    omega_infty_poincare,
    pt_group_1d,
    smith_normal_form,
    two_term_homology,
)
from .polytopes import Box, Cover, RectPolytope, canonicalize, refine_common, subtract, volume
from .scalars import SQRT2, TAU, CoefficientGroup, Scalar, linearize, parse_scalar
from .stability import (
    SimplicialComplex,
    build_destab_complex,
    check_connectivity_bound,
    complex_homology,
    symmetric_group_oracle,
)

__version__ = "0.1.0"
