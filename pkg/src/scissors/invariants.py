"""Abelianization invariants of exchange maps.

For an interval exchange with pieces of length ``l_k`` translated by ``t_k``
the invariant is ``sum_k l_k ^ t_k`` in the second exterior power of
``Gamma (x) Q``.  The exterior square is taken as the tensor square modulo
``x (x) x``, so ``e_i ^ e_j`` has coefficient ``a_i b_j - a_j b_i`` for
``a ^ b``.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .assembler import PieceMap, parse_spec
from .groups import (
    ScissorsAuto,
    compose,
    disjoint_union,
    identity,
    invert,
    random_auto,
    rotation,
    small_elements,
)
from .polytopes import Box, RectPolytope
from .scalars import CoefficientGroup, NotInSpan, Scalar, linearize

__all__ = [
    "WedgeElement",
    "RecInvariant",
    "NotInSpan",
    "saf",
    "rec_invariant",
    "realize_wedge",
    "check_k1_relations",
    "wedge",
]


def _clean(coeffs: Mapping) -> dict:
    return {k: Fraction(v) for k, v in coeffs.items() if v}


@dataclass(frozen=True)
class WedgeElement:
    """Sparse element of the exterior square of ``Q^d`` on the basis ``e_i ^ e_j``."""

    d: int
    coeffs: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        coeffs = _clean(self.coeffs)
        for i, j in coeffs:
            if not 0 <= i < j < self.d:
                raise ValueError(f"bad basis pair {(i, j)} for d = {self.d}")
        object.__setattr__(self, "coeffs", dict(sorted(coeffs.items())))

    @classmethod
    def zero(cls, d: int) -> "WedgeElement":
        return cls(d, {})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "WedgeElement") -> "WedgeElement":
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return WedgeElement(self.d, out)

    def __neg__(self):
        return WedgeElement(self.d, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return WedgeElement(self.d, {k: v * c for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, WedgeElement):
            return NotImplemented
        return self.d == other.d and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, tuple(self.coeffs.items())))

    def vector(self) -> list[Fraction]:
        return [self.coeffs.get(p, Fraction(0)) for p in itertools.combinations(range(self.d), 2)]

    def to_json(self) -> list[dict]:
        return [
            {"pair": list(k), "num": v.numerator, "den": v.denominator} for k, v in self.coeffs.items()
        ]

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{v}*e{i}^e{j}" for (i, j), v in self.coeffs.items())


def wedge(a: Sequence[Fraction], b: Sequence[Fraction]) -> WedgeElement:
    d = len(a)
    return WedgeElement(
        d, {(i, j): a[i] * b[j] - a[j] * b[i] for i, j in itertools.combinations(range(d), 2)}
    )


def _coords(x: Scalar, gamma: CoefficientGroup) -> tuple[Fraction, ...]:
    c = linearize(x, gamma)
    if c is None:
        raise NotInSpan(f"{x} is not in the span of {gamma}")
    return c


def _translation_pieces(f) -> list[PieceMap]:
    pieces = list(f.pieces)
    for p in pieces:
        if not p.transform.is_translation():
            raise ValueError("invariant is defined for exchange maps (pure translations) only")
    return pieces


def saf(f: ScissorsAuto, gamma: CoefficientGroup) -> WedgeElement:
    """Sum over pieces of ``length ^ translation``."""
    if f.dim != 1:
        raise ValueError("saf needs a one-dimensional exchange map")
    total = WedgeElement.zero(gamma.dim)
    for p in _translation_pieces(f):
        (lo, hi), = p.source.intervals
        total = total + wedge(_coords(hi - lo, gamma), _coords(p.transform.translate[0], gamma))
    return total


@dataclass(frozen=True)
class RecInvariant:
    """Component ``i`` lives in ``Lambda^2(Q^d_i) (x) (x)_{j != i} Q^d_j``.

    Keys are ``(pair, multi_index)`` where ``multi_index`` lists basis indices
    for the other axes in increasing axis order.
    """

    dims: tuple[int, ...]
    components: tuple[Mapping, ...]

    def __post_init__(self):
        comps = tuple(dict(sorted(_clean(c).items())) for c in self.components)
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "RecInvariant":
        return cls(tuple(dims), tuple({} for _ in dims))

    def is_zero(self) -> bool:
        return not any(self.components)

    def __add__(self, other: "RecInvariant") -> "RecInvariant":
        if other.dims != self.dims:
            raise ValueError("dimension mismatch")
        comps = []
        for a, b in zip(self.components, other.components):
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) + v
            comps.append(out)
        return RecInvariant(self.dims, tuple(comps))

    def __neg__(self):
        return RecInvariant(self.dims, tuple({k: -v for k, v in c.items()} for c in self.components))

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, RecInvariant):
            return NotImplemented
        return self.dims == other.dims and self.components == other.components

    def __hash__(self):
        return hash((self.dims, tuple(tuple(c.items()) for c in self.components)))

    def to_json(self) -> list[list[dict]]:
        return [
            [
                {"pair": list(pair), "index": list(idx), "num": v.numerator, "den": v.denominator}
                for (pair, idx), v in comp.items()
            ]
            for comp in self.components
        ]


def rec_invariant(f: ScissorsAuto, gammas: Sequence[CoefficientGroup] | CoefficientGroup) -> RecInvariant:
    """Per-axis ``(length_i ^ t_i) (x) (x)_{j != i} length_j`` summed over pieces."""
    n = f.dim
    if isinstance(gammas, CoefficientGroup):
        gammas = [gammas] * n
    if len(gammas) != n:
        raise ValueError("need one coefficient group per axis")
    comps = [dict() for _ in range(n)]
    for p in _translation_pieces(f):
        lengths = [_coords(hi - lo, g) for (lo, hi), g in zip(p.source.intervals, gammas)]
        trans = [_coords(t, g) for t, g in zip(p.transform.translate, gammas)]
        for i in range(n):
            w = wedge(lengths[i], trans[i])
            if w.is_zero():
                continue
            others = [j for j in range(n) if j != i]
            for idx in itertools.product(*(range(gammas[j].dim) for j in others)):
                weight = Fraction(1)
                for j, k in zip(others, idx):
                    weight *= lengths[j][k]
                if not weight:
                    continue
                for pair, v in w.coeffs.items():
                    key = (pair, idx)
                    comps[i][key] = comps[i].get(key, 0) + v * weight
    return RecInvariant(tuple(g.dim for g in gammas), tuple(comps))


def realize_wedge(i: int, j: int, gamma: CoefficientGroup, spec=None) -> tuple[ScissorsAuto, Fraction]:
    """An exchange of ``[0,1]`` whose invariant is ``c * e_i ^ e_j``; returns ``(f, c)``.

    Rotates a window ``[0, a]`` by ``b`` with ``a`` a scaled copy of basis
    element ``i`` and ``b < a`` a scaled copy of basis element ``j``; the
    invariant of such a rotation is ``2 a ^ b``.
    """
    if not 0 <= i < j < gamma.dim:
        raise ValueError("need 0 <= i < j < dim")
    if gamma.ring == 1:
        raise ValueError("rescaling basis elements needs a Q-span or Z[1/d]-span")
    spec = spec or parse_spec("iet")
    bi, bj = gamma.basis[i], gamma.basis[j]
    a = next(h for h in small_elements(gamma, bi) if h <= 1)
    b = next(h for h in small_elements(gamma, bj) if h < a)
    window = rotation(spec, b, 0, a)
    if a < 1:
        window = disjoint_union(window, identity(spec, RectPolytope.interval(a, 1)))
    f = ScissorsAuto(spec, RectPolytope.interval(0, 1), window.pieces).canonical()
    ra = _coords(a, gamma)[i]
    rb = _coords(b, gamma)[j]
    return f, 2 * ra * rb


# -- relation checks --------------------------------------------------------------------


def _refined_identity(spec, base: RectPolytope, rng: random.Random) -> ScissorsAuto:
    """Identity presented on a random subdivision (a span ``P <- R -> P`` with equal legs)."""
    from .groups import random_cut_point

    from .assembler import Transform

    (lo, hi), = base.boxes[0].intervals
    cuts = sorted({lo, hi} | {random_cut_point(spec, 0, lo, hi, rng) for _ in range(3)})
    tr = Transform.identity(1)
    return ScissorsAuto(spec, base, [PieceMap(Box.of((a, b)), tr) for a, b in zip(cuts, cuts[1:])])


def check_k1_relations(gamma: CoefficientGroup, seed: int = 0, count: int = 100,
                       complexity: int = 3, counterexample_path: str | None = None) -> dict:
    """Sample spans and check the three presentation relations under ``saf``.

    (A) a span with equal legs maps to 0; (B) composites map to sums;
    (C) disjoint unions map to sums.
    """
    from .assembler import iet

    spec = iet(gamma)
    rng = random.Random(seed)
    unit = RectPolytope.interval(0, 1)
    far = RectPolytope.interval(2, 3)
    violations = []
    for k in range(count):
        s1, s2 = rng.randrange(1 << 30), rng.randrange(1 << 30)
        f = random_auto(spec, unit, s1, complexity)
        g = random_auto(spec, unit, s2, complexity)
        # (A): P <- R -> P with both legs equal to f, and a refined identity
        equal_legs = compose(invert(f), f)
        for name, elt in (("A", equal_legs), ("A", _refined_identity(spec, unit, rng))):
            if not saf(elt, gamma).is_zero():
                violations.append({"relation": name, "sample": k, "seeds": [s1]})
        # (B)
        if saf(compose(f, g), gamma) != saf(f, gamma) + saf(g, gamma):
            violations.append({"relation": "B", "sample": k, "seeds": [s1, s2]})
        # (C)
        h = random_auto(spec, far, s2, complexity)
        if saf(disjoint_union(f, h), gamma) != saf(f, gamma) + saf(h, gamma):
            violations.append({"relation": "C", "sample": k, "seeds": [s1, s2]})
    report = {
        "gamma": gamma.label,
        "samples": count,
        "seed": seed,
        "relations": ["A", "B", "C"],
        "violations": violations,
        "ok": not violations,
    }
    if violations and counterexample_path:
        with open(counterexample_path, "w") as fh:
            json.dump(report, fh, indent=2)
    return report
