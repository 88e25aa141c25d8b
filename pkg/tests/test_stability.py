import itertools
import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from scissors.ktheory import FGAbGroup, GradedAb
from scissors.stability import (
    ModelTooLarge,
    SimplicialComplex,
    build_destab_complex,
    check_connectivity_bound,
    complex_homology,
    connectivity_bound,
    symmetric_group_oracle,
)


def dense(cols, nrows, ncols):
    M = sympy.zeros(nrows, ncols)
    for c, col in cols.items():
        for r, v in col.items():
            M[r, c] = v
    return M


def rational_betti(K):
    """Reduced Betti numbers from ranks of dense boundary matrices over Q."""
    ranks = {}
    for p in range(K.dim + 2):
        cols, nrows, ncols = K.boundary(p)
        ranks[p] = dense(cols, nrows, ncols).rank() if ncols else 0
    return {p: len(K.simplices.get(p, [])) - ranks[p] - ranks[p + 1] for p in range(K.dim + 1)}


complexes = st.integers(2, 7).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(0, n - 1), min_size=1, max_size=4, unique=True), min_size=1, max_size=8
    ).map(lambda faces: SimplicialComplex.from_faces(list(range(n)), faces))
)


@settings(max_examples=60)
@given(complexes)
def test_homology_ranks_match_rational_oracle_and_euler(K):
    H, _ = complex_homology(K)
    betti = rational_betti(K)
    assert {p: H[p].rank for p in betti} == betti
    reduced_chi = K.euler_characteristic() - 1
    assert reduced_chi == sum((-1) ** p * b for p, b in betti.items())


@settings(max_examples=40)
@given(complexes)
def test_boundary_squares_to_zero(K):
    assert K.is_closed()
    for p in range(1, K.dim + 1):
        lower = dense(*K.boundary(p - 1))
        upper = dense(*K.boundary(p))
        assert (lower * upper).is_zero_matrix


def test_full_simplex_is_acyclic():
    K = SimplicialComplex.from_faces(range(4), [range(4)])
    assert K.f_vector() == [4, 6, 4, 1]
    H, conn = complex_homology(K)
    assert H.is_zero() and conn is None


def test_sphere_boundary_of_four_simplex():
    K = SimplicialComplex.from_faces(range(5), itertools.combinations(range(5), 4))
    H, conn = complex_homology(K)
    assert H == GradedAb({3: FGAbGroup.free(1)})
    assert conn == 2


def test_two_points_and_empty():
    H, conn = complex_homology(SimplicialComplex.from_faces(range(2), []))
    assert H == GradedAb({0: FGAbGroup.free(1)}) and conn == -1
    H, conn = complex_homology(SimplicialComplex([], {}))
    assert conn == -2 and H[-1] == FGAbGroup.free(1)


def test_torsion_in_projective_plane():
    # six-vertex triangulation of RP^2
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
             (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    H, conn = complex_homology(SimplicialComplex.from_faces(range(6), faces))
    assert H == GradedAb({1: FGAbGroup(0, (2,))})
    assert conn == 0


def test_finite_set_one_into_four_is_full_simplex():
    K = build_destab_complex(1, 4, "finite-set")
    assert K.f_vector() == [4, 6, 4, 1]
    assert complex_homology(K)[1] is None


def test_grid_one_into_five_is_contractible():
    K = build_destab_complex(1, 5, "grid-interval")
    H, conn = complex_homology(K)
    assert H.is_zero() and conn is None


def test_grid_two_into_four_vertex_count():
    K = build_destab_complex(2, 4, "grid-interval")
    assert len(K.vertices) == 12
    # disjoint pairs of ordered pairs: 12 * 2 / 2 edges
    assert K.f_vector() == [12, 12]


def test_matching_complex_two_into_six():
    # disjoint ordered pairs in a 6-set; vertices 30
    K = build_destab_complex(2, 6, "finite-set")
    assert len(K.vertices) == math.perm(6, 2)
    H, conn = complex_homology(K)
    assert conn is None or conn >= connectivity_bound(3)


def test_vertex_cap_and_bad_model():
    with pytest.raises(ModelTooLarge):
        build_destab_complex(2, 10, vertex_cap=10)
    with pytest.raises(ValueError):
        build_destab_complex(1, 3, "cubes")


def test_connectivity_bound_values():
    assert [connectivity_bound(k) for k in range(1, 8)] == [-1, -1, 0, 0, 1, 1, 2]


@pytest.mark.parametrize("X,B,model", [(1, 6, "finite-set"), (2, 6, "grid-interval"), (3, 7, "finite-set")])
def test_bound_reports(X, B, model):
    r = check_connectivity_bound(X, B, model)
    assert r["k"] == B // X and r["bound"] == connectivity_bound(B // X)
    assert r["holds"]
    assert r["acyclic"] == (r["connectivity"] is None)
    assert r["method"] == "homological"


def test_discrete_reports():
    r = check_connectivity_bound(2, 3)
    assert r["method"] == "discrete" and r["vertices"] == 6 and r["connectivity"] == -1
    r = check_connectivity_bound(1, 1)
    assert r["vertices"] == 1 and r["connectivity"] is None
    r = check_connectivity_bound(3, 2)
    assert r["vertices"] == 0 and r["connectivity"] == -2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_symmetric_group_oracle(n):
    r = symmetric_group_oracle(n)
    assert r["ok"] and r["order"] == math.factorial(n) and r["mismatches"] == 0
