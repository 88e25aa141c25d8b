import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scissors.assembler import ON_CUT, OutsideBase, PieceMap, Transform, brin_thompson, higman, iet, rec, v_tau
from scissors.constructors import inclusion
from scissors.groups import (
    BaseMismatch,
    ScissorsAuto,
    VerificationFailed,
    check,
    commutator,
    compose,
    element_from_json,
    extend_along,
    identity,
    invert,
    random_auto,
    rotation,
    verify,
)
from scissors.polytopes import Box, RectPolytope
from scissors.scalars import SQRT2, CoefficientGroup

Q = iet()
UNIT = RectPolytope.interval(0, 1)
third = Fraction(1, 3)


def errors(f):
    return {e["error"] for e in verify(f)}


# -- verify --------------------------------------------------------------------------


def test_verify_examples():
    assert verify(rotation(Q, third)) == []
    overlapping = ScissorsAuto(Q, UNIT, [
        PieceMap(Box.of((0, Fraction(1, 2))), Transform.translation([0])),
        PieceMap(Box.of((Fraction(1, 2), 1)), Transform.translation([-Fraction(1, 6)])),
    ])
    assert "OverlappingImages" in errors(overlapping)
    shifted = ScissorsAuto(Q, UNIT, [PieceMap(Box.of((0, 1)), Transform.translation([SQRT2]))])
    assert "DisallowedTransformation" in errors(shifted)
    with pytest.raises(VerificationFailed):
        check(overlapping)


def test_verify_reports_uncovered_source_and_bad_scaling():
    gap = ScissorsAuto(Q, UNIT, [PieceMap(Box.of((0, Fraction(1, 2))), Transform.identity(1))])
    assert "SourceNotCovered" in errors(gap)
    doubling = ScissorsAuto(higman(2), UNIT, [
        PieceMap(Box.of((0, Fraction(1, 2))), Transform.affine([2], [0])),
        PieceMap(Box.of((Fraction(1, 2), 1)), Transform.identity(1)),
    ])
    assert errors(doubling) & {"OverlappingImages", "ImageOutsideTarget", "VolumeMismatch"}


def test_cut_outside_cut_group():
    pieces = [
        PieceMap(Box.of((0, SQRT2 - 1)), Transform.identity(1)),
        PieceMap(Box.of((SQRT2 - 1, 1)), Transform.identity(1)),
    ]
    assert "CutOutsideL" in errors(ScissorsAuto(Q, UNIT, pieces))


# -- group operations -------------------------------------------------------------------


def test_compose_rotations():
    rr = compose(rotation(Q, third), rotation(Q, third))
    got = [(p.source.intervals[0], p.transform.translate[0]) for p in rr.canonical_pieces()]
    assert got == [((0, third), 2 * third), ((third, 1), -third)]


def test_invert_examples():
    assert invert(rotation(Q, third)) == rotation(Q, 2 * third)
    assert invert(identity(Q, UNIT)).is_identity()


def test_apply_examples():
    r = rotation(Q, third)
    assert r.apply([Fraction(1, 4)]) == (Fraction(7, 12),)
    assert r.apply([2 * third]) is ON_CUT
    assert identity(Q, UNIT).apply([Fraction(2, 7)]) == (Fraction(2, 7),)
    with pytest.raises(OutsideBase):
        r.apply([2])


def test_random_auto_complexity_zero_is_identity():
    assert random_auto(Q, UNIT, 1, 0).is_identity()


def test_compose_rejects_different_bases():
    with pytest.raises(BaseMismatch):
        compose(rotation(Q, third), rotation(Q, third, 0, 2))


def test_extend_along_examples():
    big = RectPolytope.interval(0, 2)
    e = inclusion(UNIT, big, Q)
    ext = extend_along(rotation(Q, third), e)
    want = ScissorsAuto(Q, big, list(rotation(Q, third).pieces) + [PieceMap(Box.of((1, 2)), Transform.identity(1))])
    assert ext == want
    assert extend_along(identity(Q, UNIT), e).is_identity()


def test_element_json_round_trip():
    for spec in (iet(CoefficientGroup.q_span(1, "sqrt2")), rec(2), v_tau()):
        base = RectPolytope.cube(spec.dim)
        f = random_auto(spec, base, 3, 3)
        g = element_from_json(f.to_json())
        assert g == f and g.to_json() == f.to_json()


# -- properties ------------------------------------------------------------------------------

FAMILIES = [iet(), iet(CoefficientGroup.q_span(1, "sqrt2")), rec(2), brin_thompson(2), higman(3), v_tau()]


@given(st.sampled_from(FAMILIES), st.integers(0, 10**6))
def test_group_axioms(spec, seed):
    base = RectPolytope.cube(spec.dim)
    f, g, h = (random_auto(spec, base, seed + k, 2) for k in range(3))
    one = identity(spec, base)
    for x in (f, g, h, compose(f, g)):
        assert verify(x) == []
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    assert compose(f, one) == f == compose(one, f)
    assert compose(f, invert(f)).is_identity() and compose(invert(f), f).is_identity()


@given(st.integers(0, 10**6))
def test_apply_respects_composition(seed):
    spec = iet(CoefficientGroup.q_span(1, "sqrt2"))
    f, g = random_auto(spec, UNIT, seed, 3), random_auto(spec, UNIT, seed + 1, 3)
    fg = compose(f, g)
    rng = random.Random(seed)
    for _ in range(20):
        x = Fraction(rng.randrange(1, 1000), 1000) + SQRT2 / 10**6
        if x >= 1:
            continue
        y = f.apply([x])
        if y is ON_CUT:
            continue
        z = g.apply(y)
        if z is not ON_CUT:
            assert fg.apply([x]) == z


@given(st.integers(0, 10**6))
def test_extend_along_is_a_homomorphism(seed):
    spec = iet()
    e = inclusion(UNIT, RectPolytope.of(Box.of((0, 1)), Box.of((2, 3))), spec)
    f, g = random_auto(spec, UNIT, seed, 2), random_auto(spec, UNIT, seed + 1, 2)
    assert extend_along(compose(f, g), e) == compose(extend_along(f, e), extend_along(g, e))


@given(st.integers(0, 10**6))
def test_commutator_of_commuting_rotations_is_trivial(seed):
    rng = random.Random(seed)
    a, b = (Fraction(rng.randrange(1, 12), 12) for _ in range(2))
    assert commutator(rotation(Q, a), rotation(Q, b)).is_identity()
