"""Scissors automorphisms and embeddings of rectilinear polytopes.

Elements are :class:`~scissors.assembler.Span` objects tied to an assembler
spec; equality is a.e. equality of the underlying piecewise maps.
"""

from __future__ import annotations

import json
import random
from typing import Sequence

from .assembler import (
    DIAGRAMMATIC,
    FUNCTIONAL,
    ON_CUT,
    AssemblerSpec,
    DisallowedTransformation,
    OutsideBase,
    PieceMap,
    Span,
    Transform,
    compose_spans,
    parse_spec,
)
from .polytopes import (
    Box,
    OverlappingBoxes,
    RectPolytope,
    canonicalize,
    contains,
    subtract,
    union,
    volume,
)
from .scalars import CoefficientGroup, Scalar, parse_scalar

__all__ = [
    "ScissorsCongruence",
    "ScissorsAuto",
    "ScissorsEmbedding",
    "BaseMismatch",
    "VerificationFailed",
    "TranslationSearchFailed",
    "verify",
    "compose",
    "invert",
    "apply",
    "identity",
    "rotation",
    "random_auto",
    "random_polytope",
    "random_cut_point",
    "small_elements",
    "extend_along",
    "disjoint_union",
    "element_from_json",
    "ON_CUT",
    "OutsideBase",
]


class BaseMismatch(ValueError):
    pass


class TranslationSearchFailed(ValueError):
    pass


class VerificationFailed(ValueError):
    def __init__(self, errors: list[dict]):
        super().__init__("; ".join(f"{e['error']}: {e['reason']}" for e in errors))
        self.errors = errors


class ScissorsCongruence(Span):
    """Scissors congruence from ``source`` onto ``target``."""

    def __init__(self, spec: AssemblerSpec, source: RectPolytope, target: RectPolytope,
                 pieces: Sequence[PieceMap]):
        super().__init__(source, target, pieces)
        self.spec = spec

    def __eq__(self, other):
        if getattr(other, "spec", self.spec) != self.spec:
            return False
        return Span.__eq__(self, other)

    __hash__ = Span.__hash__

    def to_json(self) -> dict:
        out = {
            "spec": _spec_json(self.spec),
            "base": canonicalize(self.source).to_json(),
            "pieces": [p.to_json() for p in self.canonical_pieces()],
        }
        if canonicalize(self.target) != canonicalize(self.source):
            out["kind"] = "congruence"
            out["target"] = canonicalize(self.target).to_json()
        return out


class ScissorsAuto(ScissorsCongruence):
    """Scissors automorphism of ``base`` for the given assembler."""

    def __init__(self, spec: AssemblerSpec, base: RectPolytope, pieces: Sequence[PieceMap]):
        super().__init__(spec, base, base, pieces)

    @property
    def base(self) -> RectPolytope:
        return self.source


class ScissorsEmbedding(Span):
    """Scissors embedding of ``source`` into ``target``; images are disjoint."""

    def __init__(self, spec: AssemblerSpec, source: RectPolytope, target: RectPolytope,
                 pieces: Sequence[PieceMap]):
        super().__init__(source, target, pieces)
        self.spec = spec

    @property
    def complement(self) -> RectPolytope:
        return subtract(self.target, self.image_polytope())

    def __eq__(self, other):
        if getattr(other, "spec", self.spec) != self.spec:
            return False
        return Span.__eq__(self, other)

    __hash__ = Span.__hash__

    def to_json(self) -> dict:
        return {
            "kind": "embedding",
            "spec": _spec_json(self.spec),
            "base": canonicalize(self.source).to_json(),
            "target": canonicalize(self.target).to_json(),
            "pieces": [p.to_json() for p in self.canonical_pieces()],
            "complement": self.complement.to_json(),
        }


def _spec_json(spec: AssemblerSpec):
    if spec.name:
        try:
            if parse_spec(spec.name) == spec:
                return spec.name
        except ValueError:
            pass
    return spec.to_json()


def element_from_json(obj, spec: AssemblerSpec | None = None) -> ScissorsCongruence | ScissorsEmbedding:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if spec is None:
        spec = parse_spec(obj["spec"])
    base = RectPolytope.from_json(obj["base"])
    pieces = [PieceMap.from_json(p) for p in obj["pieces"]]
    if obj.get("kind") == "embedding":
        return ScissorsEmbedding(spec, base, RectPolytope.from_json(obj["target"]), pieces)
    if "target" in obj:
        return ScissorsCongruence(spec, base, RectPolytope.from_json(obj["target"]), pieces)
    return ScissorsAuto(spec, base, pieces)


# -- verification ------------------------------------------------------------------


def _err(name: str, reason: str, piece: int | None = None) -> dict:
    out = {"error": name, "reason": reason}
    if piece is not None:
        out["piece"] = piece
    return out


def verify(f: Span) -> list[dict]:
    """List of problems with ``f``; empty means the element is valid."""
    spec: AssemblerSpec = f.spec
    errors: list[dict] = []
    n = spec.dim
    if f.source.dim != n or f.target.dim != n:
        return [_err("DimensionMismatch", f"element is not {n}-dimensional")]
    for k, p in enumerate(f.pieces):
        reason = spec.check_transform(p.transform)
        if reason:
            errors.append(_err("DisallowedTransformation", reason, k))
        for box, what in ((p.source, "source"), (p.image, "image")):
            for axis, (lo, hi) in enumerate(box.intervals):
                for c in (lo, hi):
                    if not spec.cut_ok(axis, c):
                        errors.append(_err("CutOutsideL", f"{what} coordinate {c} on axis {axis}", k))
    srcs = [p.source for p in f.pieces]
    imgs = [p.image for p in f.pieces]
    try:
        covered = union(RectPolytope(n, tuple(srcs)), dim=n)
        if covered != canonicalize(f.source):
            errors.append(_err("SourceNotCovered", "piece sources do not tile the source polytope"))
    except OverlappingBoxes:
        errors.append(_err("SourceNotCovered", "piece sources overlap"))
    try:
        image = union(RectPolytope(n, tuple(imgs)), dim=n)
    except OverlappingBoxes:
        errors.append(_err("OverlappingImages", _overlap_witness(imgs)))
        return errors
    if isinstance(f, ScissorsEmbedding):
        if not contains(f.target, image):
            errors.append(_err("ImageOutsideTarget", "piece images leave the target"))
        else:
            isometric = all(abs(s) == 1 for p in f.pieces for s in p.transform.scales)
            moved = volume(f.source) if isometric else volume(image)
            if moved + volume(f.complement) != volume(f.target):
                errors.append(_err("VolumeMismatch", "volumes of image and complement do not add up"))
    elif image != canonicalize(f.target):
        errors.append(_err("ImageNotCovered", "piece images do not tile the base"))
    return errors


def _overlap_witness(boxes: Sequence[Box]) -> str:
    for i, a in enumerate(boxes):
        for j in range(i + 1, len(boxes)):
            if a.overlaps(boxes[j]):
                return f"images of pieces {i} and {j} overlap: {a} and {boxes[j]}"
    return "piece images overlap"


def check(f: Span) -> Span:
    errors = verify(f)
    if errors:
        raise VerificationFailed(errors)
    return f


# -- group operations -----------------------------------------------------------------


def identity(spec: AssemblerSpec, base: RectPolytope) -> ScissorsAuto:
    tr = Transform.identity(base.dim)
    return ScissorsAuto(spec, base, [PieceMap(b, tr) for b in canonicalize(base).boxes])


def compose(f: ScissorsAuto, g: ScissorsAuto, order: str = DIAGRAMMATIC) -> ScissorsAuto:
    """Apply ``f`` then ``g`` (or ``f o g`` with ``order="functional"``)."""
    autos = isinstance(f, ScissorsAuto) and isinstance(g, ScissorsAuto)
    if autos and canonicalize(f.base) != canonicalize(g.base):
        raise BaseMismatch("elements live on different polytopes")
    if f.spec != g.spec:
        raise BaseMismatch("elements belong to different assemblers")
    return compose_spans(f, g, order)


def invert(f: Span) -> Span:
    return f.inverse()


def apply(f: Span, x: Sequence):
    return f.apply(x)


def commutator(f: ScissorsAuto, g: ScissorsAuto) -> ScissorsAuto:
    return compose(compose(f, g), compose(invert(f), invert(g)))


def rotation(spec: AssemblerSpec, alpha, lo=0, hi=1) -> ScissorsAuto:
    """Circle rotation by ``alpha`` of the interval ``[lo, hi]``."""
    lo, hi, alpha = parse_scalar(lo), parse_scalar(hi), parse_scalar(alpha)
    length = hi - lo
    base = RectPolytope.interval(lo, hi)
    if not alpha or alpha == length:
        return identity(spec, base)
    if not (0 < alpha < length):
        raise ValueError("rotation amount must lie in (0, length)")
    cut = hi - alpha
    pieces = [
        PieceMap(Box.of((lo, cut)), Transform.translation([alpha])),
        PieceMap(Box.of((cut, hi)), Transform.translation([alpha - length])),
    ]
    return ScissorsAuto(spec, base, pieces)


def disjoint_union(f: ScissorsAuto, g: ScissorsAuto) -> ScissorsAuto:
    base = union(f.base, g.base)
    return ScissorsAuto(f.spec, base, list(f.pieces) + list(g.pieces))


def extend_along(f: ScissorsAuto, e: ScissorsEmbedding) -> ScissorsAuto:
    """Conjugate ``f`` onto the image of ``e`` and extend by the identity."""
    if canonicalize(f.base) != canonicalize(e.source):
        raise BaseMismatch("automorphism and embedding have different bases")
    image = e.image_polytope()
    back = Span(image, e.source, [PieceMap(p.image, p.transform.inverse()) for p in e.pieces])
    onto = Span(e.source, image, e.pieces)
    inner = back.then(f).then(onto)
    tr = Transform.identity(f.dim)
    rest = [PieceMap(b, tr) for b in subtract(e.target, image).boxes]
    return ScissorsAuto(f.spec, e.target, list(inner.canonical_pieces()) + rest).canonical()


# -- random generation ------------------------------------------------------------------


def small_elements(group: CoefficientGroup, start: Scalar | None = None):
    """Decreasing positive elements of ``group`` tending to 0.

    Powers of 1/2 times ``start`` for Q-spans, powers of 1/d for Z[1/d]-spans,
    and continued-fraction values |q*theta - p| for lattices Z + Z*theta.
    """
    start = Scalar(1) if start is None else abs(start)
    if group.ring is None or group.ring >= 2:
        ratio = Scalar(1) / (2 if group.ring is None else group.ring)
        h = start
        while True:
            yield h
            h = h * ratio
    if group.ring == 1 and group.dim == 2:
        theta = group.basis[1]
        yield Scalar(1)
        yield from _convergent_gaps(theta)
        return
    raise TranslationSearchFailed(f"no small-element search for {group}")


def _convergent_gaps(theta: Scalar):
    """|q*theta - p| over the continued-fraction convergents p/q of theta."""
    x = theta
    p0, q0, p1, q1 = 0, 1, 1, 0
    last = None
    for _ in range(200):
        a = x.floor()
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        gap = abs(theta * q1 - p1)
        if gap.is_zero():
            return
        if last is None or gap < last:
            yield gap
            last = gap
        frac = x - a
        if frac.is_zero():
            return
        x = frac.inverse()
    raise TranslationSearchFailed("continued fraction did not produce small elements")


def _step_below(group: CoefficientGroup, bound: Scalar, rng: random.Random | None = None) -> Scalar:
    """An element of ``group`` in (0, bound]; random basis direction for Q-spans."""
    start = None
    if rng is not None and group.ring != 1 and group.dim > 1:
        start = group.basis[rng.randrange(group.dim)]
    for h in small_elements(group, start):
        if h <= bound:
            return h
    raise TranslationSearchFailed("no small element found")


def random_cut_point(spec: AssemblerSpec, axis: int, lo: Scalar, hi: Scalar,
                     rng: random.Random, near_middle: bool = False) -> Scalar:
    """A cut coordinate strictly inside ``(lo, hi)`` of the form ``lo + k*h``."""
    group = spec.cuts[axis]
    length = hi - lo
    h = _step_below(group, length / (2 if near_middle else rng.randint(2, 6)), None if near_middle else rng)
    if not (spec.translations[axis].contains(h) or group.ring == 1):
        h = _step_below(spec.translations[axis], length / 2)
    kmax = (length / h).ceil() - 1
    k = max(1, kmax // 2) if near_middle else rng.randint(1, max(1, kmax))
    return lo + h * k


def random_polytope(spec: AssemblerSpec, rng: random.Random, max_boxes: int = 2) -> RectPolytope:
    """One or more disjoint boxes with coordinates in the cut groups."""
    n = spec.dim
    boxes = []
    offset = [Scalar(0)] * n
    for _ in range(rng.randint(1, max_boxes)):
        ivs = []
        for axis in range(n):
            h = _step_below(spec.cuts[axis], Scalar(1) / 4)
            lo = offset[axis] + h * rng.randint(0, 2)
            hi = lo + h * rng.randint(1, 5)
            ivs.append((lo, hi))
        box = Box(tuple(ivs))
        boxes.append(box)
        offset = [box.intervals[0][1] + Scalar(1) if a == 0 else Scalar(0) for a in range(n)]
    return RectPolytope(n, tuple(boxes))


def _exchange_move(spec, base, rng) -> ScissorsAuto:
    box = rng.choice(base.boxes)
    axis = rng.randrange(spec.dim)
    lo, hi = box.intervals[axis]
    cuts = {lo, hi}
    for _ in range(rng.randint(1, 2)):
        cuts.add(random_cut_point(spec, axis, lo, hi, rng))
    cuts = sorted(cuts)
    slabs = list(zip(cuts, cuts[1:]))
    order = list(range(len(slabs)))
    while len(order) > 1 and order == sorted(order):
        rng.shuffle(order)
    pos = lo
    pieces = []
    for k in order:
        a, b = slabs[k]
        t = [Scalar(0)] * spec.dim
        t[axis] = pos - a
        pieces.append(PieceMap(box.replace(axis, a, b), Transform.translation(t)))
        pos = pos + (b - a)
    return _with_identity(spec, base, box, pieces)


def _tree_move(spec, base, rng) -> ScissorsAuto:
    """Re-bracketing: subdivide the first child on the source, the last on the target."""
    box = rng.choice(base.boxes)
    axis = rng.randrange(spec.dim)
    lo, hi = box.intervals[axis]
    ratios = spec.split_ratios
    length = hi - lo

    def children(a, length, ratios):
        out = []
        for r in ratios:
            out.append((a, a + length * r))
            a = a + length * r
        return out

    top = children(lo, length, ratios)
    first = children(top[0][0], top[0][1] - top[0][0], ratios)
    last = children(top[-1][0], top[-1][1] - top[-1][0], ratios)
    src = first + top[1:]
    dst = top[:-1] + last
    pieces = []
    for (a, b), (c, d) in zip(src, dst):
        s = (d - c) / (b - a)
        scales = [Scalar(1)] * spec.dim
        t = [Scalar(0)] * spec.dim
        scales[axis] = s
        t[axis] = c - s * a
        pieces.append(PieceMap(box.replace(axis, a, b), Transform.affine(scales, t)))
    return _with_identity(spec, base, box, pieces)


def _with_identity(spec, base, box, pieces) -> ScissorsAuto:
    tr = Transform.identity(spec.dim)
    rest = [PieceMap(b, tr) for b in base.boxes if b != box]
    return ScissorsAuto(spec, base, pieces + rest)


def random_generator(spec: AssemblerSpec, base: RectPolytope, rng: random.Random) -> ScissorsAuto:
    """Adjacent-slab exchanges (grid rotations included) and, for S-mode, tree moves."""
    moves = [_exchange_move]
    if spec.mode == "S" and spec.split_ratios:
        moves.append(_tree_move)
    g = rng.choice(moves)(spec, base, rng)
    return g.inverse() if rng.random() < 0.5 else g


def random_auto(spec: AssemblerSpec, base: RectPolytope, seed: int, complexity: int = 3) -> ScissorsAuto:
    """Deterministic random element: a product of ``complexity`` random generators."""
    rng = random.Random(seed)
    f = identity(spec, base)
    for _ in range(complexity):
        f = compose(f, random_generator(spec, base, rng))
    return f.canonical()
