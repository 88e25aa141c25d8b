import json
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from scissors.assembler import PieceMap, Transform, iet, rec
from scissors.groups import (
    ScissorsAuto,
    commutator,
    compose,
    disjoint_union,
    identity,
    invert,
    random_auto,
    rotation,
)
from scissors.invariants import (
    RecInvariant,
    WedgeElement,
    check_k1_relations,
    realize_wedge,
    rec_invariant,
    saf,
    wedge,
)
from scissors.polytopes import Box, RectPolytope
from scissors.scalars import SQRT2, CoefficientGroup, linearize

G2 = CoefficientGroup.q_span(1, "sqrt2")
G3 = CoefficientGroup.q_span(1, "sqrt2", "sqrt3")
UNIT = RectPolytope.interval(0, 1)


def saf_oracle(f, gamma):
    """Sum of length (x) translation as a matrix, then antisymmetrised."""
    d = gamma.dim
    M = [[Fraction(0)] * d for _ in range(d)]
    for p in f.pieces:
        (lo, hi), = p.source.intervals
        a, b = linearize(hi - lo, gamma), linearize(p.transform.translate[0], gamma)
        for i in range(d):
            for j in range(d):
                M[i][j] += a[i] * b[j]
    return {(i, j): M[i][j] - M[j][i] for i in range(d) for j in range(i + 1, d) if M[i][j] != M[j][i]}


# -- examples --------------------------------------------------------------------------


def test_saf_examples():
    spec = iet(G2)
    assert saf(identity(spec, UNIT), G2).is_zero()
    assert saf(rotation(spec, Fraction(1, 2)), G2).is_zero()
    r = rotation(spec, SQRT2 - 1)
    assert saf(r, G2) == WedgeElement(2, {(0, 1): 2})
    assert saf(r, G2).coeffs == saf_oracle(r, G2)
    assert saf(r, G2).to_json() == [{"pair": [0, 1], "num": 2, "den": 1}]


def test_wedge_convention():
    # e0 ^ e1 = -(e1 ^ e0) and x ^ x = 0
    assert wedge([1, 0], [0, 1]) == -wedge([0, 1], [1, 0])
    assert wedge([Fraction(3), Fraction(5)], [Fraction(3), Fraction(5)]).is_zero()


def test_rec_invariant_examples():
    spec = rec(2, G2)
    sq = RectPolytope.cube(2)
    assert rec_invariant(identity(spec, sq), G2).is_zero()
    a = SQRT2 - 1
    f = ScissorsAuto(spec, sq, [
        PieceMap(Box.of((0, 1 - a), (0, 1)), Transform.translation([a, 0])),
        PieceMap(Box.of((1 - a, 1), (0, 1)), Transform.translation([a - 1, 0])),
    ])
    inv = rec_invariant(f, G2)
    assert inv == RecInvariant((2, 2), ({((0, 1), (0,)): 2}, {}))
    assert inv.to_json() == [[{"pair": [0, 1], "index": [0], "num": 2, "den": 1}], []]


def test_realize_wedge_hits_single_pairs():
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        f, c = realize_wedge(i, j, G3)
        assert c != 0
        assert saf(f, G3) == WedgeElement(3, {(i, j): c})
        assert saf(f, G3).coeffs == saf_oracle(f, G3)


def test_realized_wedges_span_full_rank():
    rows = [saf(realize_wedge(i, j, G3)[0], G3).vector() for i, j in [(0, 1), (0, 2), (1, 2)]]
    assert sympy.Matrix(rows).rank() == 3


def test_realize_wedge_needs_divisible_group():
    with pytest.raises(ValueError):
        realize_wedge(0, 1, CoefficientGroup.lattice(1, "sqrt2"))


def test_k1_relation_instances(tmp_path):
    report = check_k1_relations(G2, seed=3, count=10, counterexample_path=str(tmp_path / "cx.json"))
    assert report["ok"] and report["violations"] == []
    assert not (tmp_path / "cx.json").exists()
    assert json.loads(json.dumps(report))["relations"] == ["A", "B", "C"]


def test_disjoint_union_adds():
    spec = iet(G2)
    f = rotation(spec, SQRT2 - 1)
    g = rotation(spec, SQRT2 - 1, 2, 3)
    assert saf(disjoint_union(f, g), G2) == saf(f, G2) + saf(g, G2)


# -- properties -----------------------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_saf_homomorphism(seed):
    spec = iet(G2)
    f, g = random_auto(spec, UNIT, seed, 3), random_auto(spec, UNIT, seed + 1, 3)
    assert saf(compose(f, g), G2) == saf(f, G2) + saf(g, G2)
    assert saf(invert(f), G2) == -saf(f, G2)
    assert saf(commutator(f, g), G2).is_zero()
    assert saf(f, G2).coeffs == saf_oracle(f, G2)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_rec_invariant_homomorphism(seed):
    spec = rec(2, G2)
    sq = RectPolytope.cube(2)
    f, g = random_auto(spec, sq, seed, 2), random_auto(spec, sq, seed + 1, 2)
    assert rec_invariant(compose(f, g), G2) == rec_invariant(f, G2) + rec_invariant(g, G2)


@given(st.integers(0, 10**6))
def test_saf_refinement_invariant(seed):
    spec = iet(G2)
    f = random_auto(spec, UNIT, seed, 3)
    finer = []
    for p in f.pieces:
        (lo, hi), = p.source.intervals
        m = (lo + hi) / 2
        finer += [PieceMap(Box.of((lo, m)), p.transform), PieceMap(Box.of((m, hi)), p.transform)]
    assert saf(ScissorsAuto(spec, UNIT, finer), G2) == saf(f, G2)
