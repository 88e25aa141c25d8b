import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scissors.assembler import PieceMap, Transform, brin_thompson, compose_spans, embeddings_disjoint, higman, iet, rec, v_tau
from scissors.constructors import (
    EmptyInput,
    NotDisjoint,
    NotReachable,
    VolumeNotSmaller,
    WrongMode,
    conjugator_from_disjoint,
    construct_congruence,
    construct_embedding_ea,
    construct_embedding_squeeze,
    grid_spacing,
    inclusion,
)
from scissors.groups import (
    ScissorsEmbedding,
    compose,
    extend_along,
    invert,
    random_auto,
    random_polytope,
    verify,
)
from scissors.polytopes import Box, RectPolytope, canonicalize, volume
from scissors.scalars import SQRT2, CoefficientGroup

half = Fraction(1, 2)
UNIT = RectPolytope.interval(0, 1)


def interval(a, b):
    return RectPolytope.interval(a, b)


# -- EA embeddings -----------------------------------------------------------------------


def test_ea_into_longer_interval():
    e = construct_embedding_ea(UNIT, interval(0, Fraction(3, 2)), iet())
    assert verify(e) == [] and volume(e.complement) == half


def test_ea_two_pieces_into_one():
    P = RectPolytope.of(Box.of((0, 1)), Box.of((2, Fraction(5, 2))))
    Q = interval(0, Fraction(7, 4))
    e = construct_embedding_ea(P, Q, iet())
    assert verify(e) == []
    assert volume(e.complement) == Fraction(1, 4)
    assert volume(P) + volume(e.complement) == volume(Q)


def test_ea_equal_volume_rejected():
    with pytest.raises(VolumeNotSmaller):
        construct_embedding_ea(UNIT, UNIT, iet())


def test_ea_empty_target_rejected():
    with pytest.raises((EmptyInput, VolumeNotSmaller)):
        construct_embedding_ea(UNIT, RectPolytope(1, ()), iet())


def test_ea_with_irrational_lattice():
    spec = rec(2, CoefficientGroup.lattice(1, "sqrt2"))
    P = RectPolytope.cube(2)
    Q = RectPolytope.of(Box.of((0, 1 + SQRT2 / 8), (0, 1)))
    e = construct_embedding_ea(P, Q, spec)
    assert verify(e) == []
    assert volume(P) + volume(e.complement) == volume(Q)


def test_grid_spacing_certifies_room():
    spec = rec(2)
    P = RectPolytope.cube(2)
    Q = RectPolytope.of(Box.of((0, Fraction(9, 8)), (0, 1)))
    h = grid_spacing(P, Q, spec)
    assert all(x > 0 for x in h)


# -- squeeze ------------------------------------------------------------------------------


def test_squeeze_uses_a_power_of_two():
    e = construct_embedding_squeeze(UNIT, interval(0, Fraction(1, 4)), higman(2))
    assert verify(e) == []
    scales = {p.transform.scales[0] for p in e.pieces}
    assert scales == {Fraction(1, 8)}


def test_squeeze_into_itself_leaves_room():
    e = construct_embedding_squeeze(UNIT, UNIT, higman(2))
    assert verify(e) == [] and not e.complement.is_empty()


def test_squeeze_needs_nonempty_target_and_scaling():
    with pytest.raises(EmptyInput):
        construct_embedding_squeeze(UNIT, RectPolytope(1, ()), higman(2))
    with pytest.raises(WrongMode):
        construct_embedding_squeeze(UNIT, UNIT, iet())


# -- congruences --------------------------------------------------------------------------


def test_congruence_unit_to_three_quarters():
    c = construct_congruence(UNIT, interval(0, Fraction(3, 4)), brin_thompson(1))
    assert verify(c) == []
    got = [(p.source.intervals[0], p.transform.scales[0], p.transform.translate[0]) for p in c.canonical_pieces()]
    assert got == [((0, half), 1, 0), ((half, 1), half, Fraction(1, 4))]


def test_congruence_onto_two_intervals():
    Q = RectPolytope.of(Box.of((0, 1)), Box.of((2, 3)))
    c = construct_congruence(UNIT, Q, brin_thompson(1))
    assert verify(c) == []
    assert canonicalize(c.image_polytope()) == canonicalize(Q)


def test_congruence_of_equal_polytopes_is_identity():
    sq = RectPolytope.cube(2)
    assert construct_congruence(sq, sq, brin_thompson(2)).is_identity()


def test_congruence_respects_cell_count_residue():
    two = RectPolytope.of(Box.of((0, 1)), Box.of((2, 3)))
    three = RectPolytope.of(Box.of((0, 1)), Box.of((2, 3)), Box.of((4, 5)))
    # ternary splits change the cell count by 2, so 1 and 2 cells are not congruent
    with pytest.raises(NotReachable):
        construct_congruence(UNIT, two, higman(3))
    assert verify(construct_congruence(UNIT, three, higman(3))) == []
    assert verify(construct_congruence(UNIT, two, v_tau())) == []


# -- conjugators --------------------------------------------------------------------------


def test_conjugator_swaps_slots():
    Q = interval(0, 2)
    spec = iet()
    e1 = inclusion(UNIT, Q, spec)
    e2 = ScissorsEmbedding(spec, UNIT, Q, [PieceMap(Box.of((0, 1)), Transform.translation([1]))])
    h = conjugator_from_disjoint(e1, e2)
    assert verify(h) == []
    assert h.apply([Fraction(1, 4)]) == (Fraction(5, 4),)
    assert h.apply([Fraction(5, 4)]) == (Fraction(1, 4),)
    assert compose_spans(e1, h) == e2


def test_conjugator_rejects_overlap():
    e = inclusion(UNIT, interval(0, 2), iet())
    with pytest.raises(NotDisjoint):
        conjugator_from_disjoint(e, e)


# -- properties -----------------------------------------------------------------------------

EA_SPECS = [
    rec(1), rec(2),
    rec(1, CoefficientGroup.localization(2)), rec(2, CoefficientGroup.localization(2)),
    rec(1, CoefficientGroup.lattice(1, "sqrt2")),
]


@settings(max_examples=40)
@given(st.sampled_from(EA_SPECS), st.integers(0, 10**6))
def test_ea_embeddings_verify(spec, seed):
    rng = random.Random(seed)
    P, Q = random_polytope(spec, rng), random_polytope(spec, rng)
    if volume(P) == volume(Q):
        return
    if volume(Q) < volume(P):
        P, Q = Q, P
    e = construct_embedding_ea(P, Q, spec)
    assert verify(e) == []
    assert volume(P) + volume(e.complement) == volume(Q)


@settings(max_examples=40)
@given(st.sampled_from([brin_thompson(1), brin_thompson(2)]), st.integers(0, 10**6))
def test_congruence_round_trip(spec, seed):
    rng = random.Random(seed)
    P, Q = random_polytope(spec, rng), random_polytope(spec, rng)
    there, back = construct_congruence(P, Q, spec), construct_congruence(Q, P, spec)
    assert verify(there) == [] and verify(back) == []
    assert compose(there, back).is_identity()


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_extension_is_independent_of_embedding(seed):
    spec = iet()
    Q = RectPolytope.of(Box.of((0, 2)), Box.of((3, Fraction(7, 2))))
    left = construct_embedding_ea(UNIT, RectPolytope.of(Box.of((0, Fraction(5, 4)))), spec)
    right = construct_embedding_ea(UNIT, RectPolytope.of(Box.of((Fraction(5, 4), 2)), Box.of((3, Fraction(7, 2)))), spec)
    e = ScissorsEmbedding(spec, UNIT, Q, left.pieces)
    e2 = ScissorsEmbedding(spec, UNIT, Q, right.pieces)
    assert embeddings_disjoint(e, e2)
    h = conjugator_from_disjoint(e, e2)
    f = random_auto(spec, UNIT, seed, 3)
    assert compose(compose(invert(h), extend_along(f, e)), h) == extend_along(f, e2)
