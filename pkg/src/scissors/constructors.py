"""Explicit scissors embeddings, squeezes, congruences and conjugators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .assembler import AssemblerSpec, PieceMap, Span, Transform, embeddings_disjoint
from .groups import (
    ScissorsAuto,
    ScissorsCongruence,
    ScissorsEmbedding,
    TranslationSearchFailed,
    check,
    small_elements,
)
from .polytopes import Box, RectPolytope, canonicalize, contains, intersect, subtract, volume
from .scalars import Scalar

__all__ = [
    "VolumeNotSmaller",
    "EmptyInput",
    "NotReachable",
    "NotDisjoint",
    "WrongMode",
    "TranslationSearchFailed",
    "construct_embedding_ea",
    "construct_embedding_squeeze",
    "construct_congruence",
    "conjugator_from_disjoint",
    "inclusion",
    "grid_spacing",
]

MAX_REFINEMENTS = 80


class VolumeNotSmaller(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class NotReachable(ValueError):
    pass


class NotDisjoint(ValueError):
    pass


class WrongMode(ValueError):
    pass


def inclusion(P: RectPolytope, Q: RectPolytope, spec: AssemblerSpec) -> ScissorsEmbedding:
    tr = Transform.identity(P.dim)
    return ScissorsEmbedding(spec, P, Q, [PieceMap(b, tr) for b in canonicalize(P).boxes])


# -- (E): embeddings from volume ------------------------------------------------------


def _common_spacings(spec: AssemblerSpec):
    """Per-axis spacings drawn from decreasing sequences in translations and cuts."""
    gens = []
    for axis in range(spec.dim):
        gamma, cuts = spec.translations[axis], spec.cuts[axis]
        seq = small_elements(gamma)

        def admissible(seq=seq, cuts=cuts):
            for h in seq:
                if cuts.contains(h):
                    yield h

        gens.append(admissible())
    while True:
        yield tuple(next(g) for g in gens)


def _outer_bound(P: RectPolytope, h) -> Scalar:
    """Upper bound for the number of grid cells meeting ``P``."""
    total = Scalar(0)
    for b in P.boxes:
        term = Scalar(1)
        for (lo, hi), hi_ in zip(b.intervals, h):
            term = term * ((hi - lo) / hi_ + 2)
        total = total + term
    return total


def _inner_bound(Q: RectPolytope, h) -> Scalar:
    """Lower bound for the number of grid cells inside ``Q``."""
    total = Scalar(0)
    for b in Q.boxes:
        term = Scalar(1)
        for (lo, hi), hi_ in zip(b.intervals, h):
            m = (hi - lo) / hi_ - 2
            if m.sign() <= 0:
                term = Scalar(0)
                break
            term = term * m
        total = total + term
    return total


def grid_spacing(P: RectPolytope, Q: RectPolytope, spec: AssemblerSpec) -> tuple[Scalar, ...]:
    """First spacing in the per-axis sequences for which the a priori count certificate holds."""
    for step, h in enumerate(_common_spacings(spec)):
        if _outer_bound(P, h) <= _inner_bound(Q, h):
            return h
        if step >= MAX_REFINEMENTS:
            break
    raise TranslationSearchFailed("grid refinement limit reached")


def _cells_meeting(P: RectPolytope, h):
    cells = set()
    for b in P.boxes:
        ranges = [range((lo / s).floor(), (hi / s).ceil()) for (lo, hi), s in zip(b.intervals, h)]
        cells.update(itertools.product(*ranges))
    return sorted(cells)


def _cells_inside(Q: RectPolytope, h):
    cells = set()
    for b in Q.boxes:
        ranges = [range((lo / s).ceil(), (hi / s).floor()) for (lo, hi), s in zip(b.intervals, h)]
        cells.update(itertools.product(*ranges))
    return sorted(cells)


def construct_embedding_ea(P: RectPolytope, Q: RectPolytope, spec: AssemblerSpec) -> ScissorsEmbedding:
    """Embed ``P`` into ``Q`` by translating grid pieces, when ``vol(P) < vol(Q)``.

    The overlap ``P & Q`` stays fixed.  The rest of ``P`` is cut along a grid
    whose spacing lies in both translation and cut groups; each piece is moved
    into its own grid cell lying inside ``Q - P``.  Cells are matched in
    lexicographic order, so translations are integer multiples of the spacing.
    """
    if spec.mode != "EA":
        raise WrongMode(f"{spec} is not an EA assembler")
    if volume(P) >= volume(Q):
        raise VolumeNotSmaller(f"vol(P) = {volume(P)} is not below vol(Q) = {volume(Q)}")
    P, Q = canonicalize(P), canonicalize(Q)
    if contains(Q, P):
        return check(inclusion(P, Q, spec))
    fixed = intersect(P, Q)
    moving = subtract(P, fixed)
    free = subtract(Q, fixed)
    h = grid_spacing(moving, free, spec)
    src_cells = _cells_meeting(moving, h)
    dst_cells = _cells_inside(free, h)
    if len(src_cells) > len(dst_cells):
        raise TranslationSearchFailed("certificate held but too few target cells")
    ident = Transform.identity(P.dim)
    pieces = [PieceMap(b, ident) for b in fixed.boxes]
    for k, kk, length in _matched_runs(src_cells, dst_cells[:len(src_cells)]):
        block = Box(
            tuple((s * i, s * (i + 1)) for s, i in zip(h[:-1], k[:-1]))
            + ((h[-1] * k[-1], h[-1] * (k[-1] + length)),)
        )
        t = Transform.translation([s * (j - i) for s, i, j in zip(h, k, kk)])
        for b in moving.boxes:
            piece = b.intersection(block)
            if piece is not None:
                pieces.append(PieceMap(piece, t))
    return check(ScissorsEmbedding(spec, P, Q, pieces).canonical())


def _runs(cells):
    """Maximal runs of lexicographically consecutive cells along the last axis."""
    out = []
    for c in cells:
        if out:
            start, n = out[-1]
            if start[:-1] == c[:-1] and start[-1] + n == c[-1]:
                out[-1] = (start, n + 1)
                continue
        out.append((c, 1))
    return out


def _matched_runs(src, dst):
    """Pair source and target cells in order, yielding ``(src_start, dst_start, length)`` blocks."""
    a, b = _runs(src), _runs(dst)
    i = j = 0
    off_a = off_b = 0
    while i < len(a) and j < len(b):
        (sa, na), (sb, nb) = a[i], b[j]
        n = min(na - off_a, nb - off_b)
        yield sa[:-1] + (sa[-1] + off_a,), sb[:-1] + (sb[-1] + off_b,), n
        off_a += n
        off_b += n
        if off_a == na:
            i, off_a = i + 1, 0
        if off_b == nb:
            j, off_b = j + 1, 0


# -- (S): squeezing ---------------------------------------------------------------------


def construct_embedding_squeeze(P: RectPolytope, Q: RectPolytope, spec: AssemblerSpec) -> ScissorsEmbedding:
    """Shrink ``P`` by scaling powers until it fits in half of the first box of ``Q``."""
    if spec.mode != "S":
        raise WrongMode(f"{spec} is not an S assembler")
    if P.is_empty() or Q.is_empty():
        raise EmptyInput("squeezing needs nonempty polytopes")
    P, Q = canonicalize(P), canonicalize(Q)
    bbox = P.bounding_box()
    target = Q.boxes[0]
    scales, trans = [], []
    for axis in range(spec.dim):
        g = spec.scaling_generator(axis)
        length = bbox.intervals[axis][1] - bbox.intervals[axis][0]
        room = (target.intervals[axis][1] - target.intervals[axis][0]) / 2
        s = Scalar(1)
        while s * length > room:
            s = s * g
        scales.append(s)
        trans.append(target.intervals[axis][0] - s * bbox.intervals[axis][0])
    tr = Transform.affine(scales, trans)
    return check(ScissorsEmbedding(spec, P, Q, [PieceMap(b, tr) for b in P.boxes]).canonical())


# -- congruences from standard cells ---------------------------------------------------


@dataclass(frozen=True)
class _Leaf:
    lower: tuple[Scalar, ...]
    exps: tuple[int, ...]

    def box(self, gens) -> Box:
        return Box(tuple((a, a + g ** e) for a, g, e in zip(self.lower, gens, self.exps)))

    def key(self):
        return (self.lower, self.exps)


def _segments(lo: Scalar, hi: Scalar, g: Scalar, limit: int = 400):
    """Greedy expansion of ``hi - lo`` as a sum of powers of ``g`` (largest first)."""
    rest = hi - lo
    e = 0
    while g ** e <= rest:
        e -= 1
    out = []
    pos = lo
    for _ in range(limit):
        if rest.is_zero():
            return out
        while g ** e > rest:
            e += 1
        out.append((pos, e))
        pos = pos + g ** e
        rest = rest - g ** e
    raise NotReachable(f"length {hi - lo} has no finite expansion in powers of {g}")


def _leaves(P: RectPolytope, gens) -> list[_Leaf]:
    leaves = []
    for b in P.boxes:
        per_axis = [_segments(lo, hi, g) for (lo, hi), g in zip(b.intervals, gens)]
        for combo in itertools.product(*per_axis):
            leaves.append(_Leaf(tuple(c[0] for c in combo), tuple(c[1] for c in combo)))
    leaves.sort(key=lambda l: l.key())
    return leaves


def _split(leaf: _Leaf, spec: AssemblerSpec, gens) -> list[_Leaf]:
    """Subdivide a leaf along the first axis using the assembler's split rule."""
    g = gens[0]
    e = leaf.exps[0]
    length = g ** e
    out = []
    pos = leaf.lower[0]
    for r in spec.split_ratios:
        piece = length * r
        k = _log(piece, g)
        out.append(_Leaf((pos,) + leaf.lower[1:], (k,) + leaf.exps[1:]))
        pos = pos + piece
    return out


def _log(x: Scalar, g: Scalar) -> int:
    import math

    k = round(math.log(float(x)) / math.log(float(g)))
    if g ** k != x:
        raise NotReachable(f"{x} is not a power of {g}")
    return k


def construct_congruence(P: RectPolytope, Q: RectPolytope, spec: AssemblerSpec) -> ScissorsCongruence:
    """Congruence ``P -> Q`` matching standard cells in lexicographic order.

    Both sides are cut into boxes whose sides are powers of the scaling
    generator; the side with fewer cells has its first cell split until the
    counts agree.  The construction is symmetric, so the congruence built for
    ``(Q, P)`` is the inverse of the one built for ``(P, Q)``.
    """
    if spec.mode != "S" or not spec.split_ratios:
        raise WrongMode(f"{spec} has no scaling split rule")
    if P.is_empty() or Q.is_empty():
        raise EmptyInput("congruence needs nonempty polytopes")
    P, Q = canonicalize(P), canonicalize(Q)
    gens = [spec.scaling_generator(a) for a in range(spec.dim)]
    left, right = _leaves(P, gens), _leaves(Q, gens)
    growth = len(spec.split_ratios) - 1
    if (len(left) - len(right)) % growth:
        raise NotReachable(
            f"cell counts {len(left)} and {len(right)} differ by a non-multiple of {growth}"
        )
    while len(left) != len(right):
        if len(left) < len(right):
            left = sorted(_split(left[0], spec, gens) + left[1:], key=lambda l: l.key())
        else:
            right = sorted(_split(right[0], spec, gens) + right[1:], key=lambda l: l.key())
    pieces = []
    for a, b in zip(left, right):
        scales = [g ** (eb - ea) for g, ea, eb in zip(gens, a.exps, b.exps)]
        trans = [lb - s * la for s, la, lb in zip(scales, a.lower, b.lower)]
        pieces.append(PieceMap(a.box(gens), Transform.affine(scales, trans)))
    out = ScissorsCongruence(spec, P, Q, pieces).canonical()
    if P == Q and not out.is_identity():
        raise AssertionError("congruence of a polytope with itself must be the identity")
    return check(out)


# -- conjugators --------------------------------------------------------------------------


def conjugator_from_disjoint(e1: ScissorsEmbedding, e2: ScissorsEmbedding) -> ScissorsAuto:
    """Automorphism of the target swapping the images of ``e1`` and ``e2``.

    Acts as ``e2 o e1^-1`` on image(e1), as ``e1 o e2^-1`` on image(e2) and as
    the identity elsewhere, so composing ``e1`` with it gives ``e2``.
    """
    if canonicalize(e1.source) != canonicalize(e2.source):
        raise NotDisjoint("embeddings have different sources")
    if not embeddings_disjoint(e1, e2):
        raise NotDisjoint("embedding images overlap")
    im1, im2 = e1.image_polytope(), e2.image_polytope()
    P = e1.source

    def back(e, image):
        return Span(image, P, [PieceMap(p.image, p.transform.inverse()) for p in e.pieces])

    forward1 = back(e1, im1).then(Span(P, im2, e2.pieces))
    forward2 = back(e2, im2).then(Span(P, im1, e1.pieces))
    ident = Transform.identity(P.dim)
    rest = subtract(subtract(e1.target, im1), im2)
    pieces = list(forward1.canonical_pieces()) + list(forward2.canonical_pieces())
    pieces += [PieceMap(b, ident) for b in rest.boxes]
    return check(ScissorsAuto(e1.spec, e1.target, pieces).canonical())
