"""Rectilinear polytopes: finite unions of axis-aligned boxes with disjoint interiors."""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .scalars import Scalar, parse_scalar, scalar_from_json, scalar_to_json

__all__ = [
    "Box",
    "RectPolytope",
    "Cover",
    "OverlappingBoxes",
    "TargetMismatch",
    "NotContained",
    "DegenerateBox",
    "canonicalize",
    "volume",
    "refine_common",
    "subtract",
    "intersect",
    "union",
    "contains",
    "merge_labelled",
]


class OverlappingBoxes(ValueError):
    pass


class TargetMismatch(ValueError):
    pass


class NotContained(ValueError):
    pass


class DegenerateBox(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    """Closed box ``prod [lo_i, hi_i]`` with ``lo_i < hi_i``."""

    intervals: tuple[tuple[Scalar, Scalar], ...]

    def __post_init__(self):
        ivs = tuple((_sc(lo), _sc(hi)) for lo, hi in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for lo, hi in ivs:
            if not lo < hi:
                raise DegenerateBox(f"degenerate interval [{lo}, {hi}]")

    @classmethod
    def of(cls, *intervals) -> "Box":
        """``Box.of((0, 1), ("1/2", "sqrt2"))``."""
        return cls(tuple((parse_scalar(lo), parse_scalar(hi)) for lo, hi in intervals))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def lower(self) -> tuple[Scalar, ...]:
        return tuple(lo for lo, _ in self.intervals)

    @property
    def upper(self) -> tuple[Scalar, ...]:
        return tuple(hi for _, hi in self.intervals)

    def lengths(self) -> tuple[Scalar, ...]:
        return tuple(hi - lo for lo, hi in self.intervals)

    def volume(self) -> Scalar:
        v = Scalar(1)
        for lo, hi in self.intervals:
            v = v * (hi - lo)
        return v

    def intersection(self, other: "Box") -> "Box | None":
        """Intersection with positive volume, else None."""
        out = []
        for (a, b), (c, d) in zip(self.intervals, other.intervals):
            lo = a if a >= c else c
            hi = b if b <= d else d
            if not lo < hi:
                return None
            out.append((lo, hi))
        return Box(tuple(out))

    def overlaps(self, other: "Box") -> bool:
        for (a, b), (c, d) in zip(self.intervals, other.intervals):
            if not (a < d and c < b):
                return False
        return True

    def contains_box(self, other: "Box") -> bool:
        return all(a <= c and d <= b for (a, b), (c, d) in zip(self.intervals, other.intervals))

    def contains_point(self, x: Sequence[Scalar]) -> bool:
        return all(lo <= xi <= hi for (lo, hi), xi in zip(self.intervals, x))

    def interior_contains(self, x: Sequence[Scalar]) -> bool:
        return all(lo < xi < hi for (lo, hi), xi in zip(self.intervals, x))

    def translate(self, t: Sequence[Scalar]) -> "Box":
        return Box(tuple((lo + ti, hi + ti) for (lo, hi), ti in zip(self.intervals, t)))

    def replace(self, axis: int, lo: Scalar, hi: Scalar) -> "Box":
        ivs = list(self.intervals)
        ivs[axis] = (lo, hi)
        return Box(tuple(ivs))

    def sort_key(self):
        return tuple(self.lower) + tuple(self.upper)

    def to_json(self) -> list:
        return [[scalar_to_json(lo), scalar_to_json(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, obj) -> "Box":
        return cls(tuple((scalar_from_json(lo), scalar_from_json(hi)) for lo, hi in obj))

    def __str__(self):
        return "x".join(f"[{lo},{hi}]" for lo, hi in self.intervals)


def _sc(x) -> Scalar:
    return x if isinstance(x, Scalar) else parse_scalar(x)


@dataclass(frozen=True)
class RectPolytope:
    """Finite union of interior-disjoint boxes; the empty list is the empty polytope."""

    dim: int
    boxes: tuple[Box, ...] = ()

    def __post_init__(self):
        boxes = tuple(self.boxes)
        object.__setattr__(self, "boxes", boxes)
        for b in boxes:
            if b.dim != self.dim:
                raise ValueError(f"box {b} has dimension {b.dim}, expected {self.dim}")

    @classmethod
    def of(cls, *boxes: Box) -> "RectPolytope":
        if not boxes:
            raise ValueError("use RectPolytope(dim) for the empty polytope")
        return cls(boxes[0].dim, tuple(boxes))

    @classmethod
    def interval(cls, lo, hi) -> "RectPolytope":
        return cls(1, (Box.of((lo, hi)),))

    @classmethod
    def cube(cls, n: int, lo=0, hi=1) -> "RectPolytope":
        return cls(n, (Box.of(*[(lo, hi)] * n),))

    def is_empty(self) -> bool:
        return not self.boxes

    def volume(self) -> Scalar:
        return volume(self)

    def canonical(self) -> "RectPolytope":
        return canonicalize(self)

    def same_set(self, other: "RectPolytope") -> bool:
        return canonicalize(self) == canonicalize(other)

    def bounding_box(self) -> Box:
        if not self.boxes:
            raise ValueError("empty polytope has no bounding box")
        ivs = []
        for i in range(self.dim):
            ivs.append((min(b.intervals[i][0] for b in self.boxes),
                        max(b.intervals[i][1] for b in self.boxes)))
        return Box(tuple(ivs))

    def coordinates(self, axis: int) -> list[Scalar]:
        return sorted({c for b in self.boxes for c in b.intervals[axis]})

    def translate(self, t) -> "RectPolytope":
        return RectPolytope(self.dim, tuple(b.translate(t) for b in self.boxes))

    def to_json(self) -> dict:
        return {"dim": self.dim, "boxes": [b.to_json() for b in self.boxes]}

    @classmethod
    def from_json(cls, obj) -> "RectPolytope":
        return cls(obj["dim"], tuple(Box.from_json(b) for b in obj["boxes"]))

    def __str__(self):
        if not self.boxes:
            return "{}"
        return "{" + ", ".join(map(str, self.boxes)) + "}"


@dataclass(frozen=True)
class Cover:
    """Interior-disjoint pieces whose union is ``target``."""

    target: RectPolytope
    pieces: tuple[RectPolytope, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    def is_valid(self) -> bool:
        try:
            joined = union(*self.pieces, dim=self.target.dim)
        except OverlappingBoxes:
            return False
        return canonicalize(joined) == canonicalize(self.target)

    def validate(self):
        joined = union(*self.pieces, dim=self.target.dim)
        if canonicalize(joined) != canonicalize(self.target):
            raise TargetMismatch("pieces do not cover the target")

    def to_json(self) -> dict:
        return {"target": self.target.to_json(), "pieces": [p.to_json() for p in self.pieces]}


# -- grid machinery ----------------------------------------------------------


def _grid(boxes: Iterable[Box], dim: int):
    coords = []
    for axis in range(dim):
        coords.append(sorted({c for b in boxes for c in b.intervals[axis]}))
    index = [{c: i for i, c in enumerate(cs)} for cs in coords]
    return coords, index


def _cell_segments(items, dim: int, index) -> dict:
    """Axis-0 index segments ``(lo, hi, label)`` of each grid cell of axes ``1..dim-1``."""
    buckets: dict[tuple, list] = {}
    for box, value in items:
        lo, hi = box.intervals[0]
        seg = (index[0][lo], index[0][hi], value)
        rest = [range(index[a][box.intervals[a][0]], index[a][box.intervals[a][1]]) for a in range(1, dim)]
        for cell in itertools.product(*rest):
            buckets.setdefault(cell, []).append(seg)
    for segs in buckets.values():
        segs.sort(key=lambda t: t[0])
    return buckets


def _merge_segments(segs):
    """Join touching equal-label segments of a sorted list; raise on overlap."""
    out = []
    for lo, hi, v in segs:
        if out and lo < out[-1][1]:
            raise OverlappingBoxes("boxes overlap")
        if out and lo == out[-1][1] and v == out[-1][2]:
            out[-1] = (out[-1][0], hi, v)
        else:
            out.append((lo, hi, v))
    return out


def _assemble(buckets: dict, coords, dim: int) -> list[tuple[Box, Hashable]]:
    regions = [
        (((lo, hi),) + tuple((i, i + 1) for i in cell), v)
        for cell, segs in buckets.items()
        for lo, hi, v in _merge_segments(segs)
    ]
    for axis in range(1, dim):
        groups: dict = {}
        for ranges, value in regions:
            key = (ranges[:axis] + ranges[axis + 1:], value)
            groups.setdefault(key, []).append(ranges)
        merged = []
        for (_, value), members in groups.items():
            members.sort(key=lambda r: r[axis][0])
            cur = members[0]
            for nxt in members[1:]:
                if nxt[axis][0] == cur[axis][1]:
                    cur = cur[:axis] + ((cur[axis][0], nxt[axis][1]),) + cur[axis + 1:]
                else:
                    merged.append((cur, value))
                    cur = nxt
            merged.append((cur, value))
        regions = merged
    out = []
    for ranges, value in regions:
        box = Box(tuple((coords[a][s], coords[a][e]) for a, (s, e) in enumerate(ranges)))
        out.append((box, value))
    out.sort(key=lambda bv: bv[0].sort_key())
    return out


def merge_labelled(items: Iterable[tuple[Box, Hashable]], dim: int) -> list[tuple[Box, Hashable]]:
    """Canonical merge of labelled boxes with disjoint interiors.

    On the grid spanned by all box coordinates, cells are merged greedily
    along axis 0, then axis 1, and so on, joining neighbours only when their
    labels agree; the result is sorted by lower corner.  It depends only on
    the labelled point set.  Axis 0 is handled as sorted 1-D segments per cell
    of the remaining axes, so cells are never enumerated along it.
    Raises OverlappingBoxes if two boxes share interior points.
    """
    items = list(items)
    if not items:
        return []
    coords, index = _grid([b for b, _ in items], dim)
    return _assemble(_cell_segments(items, dim, index), coords, dim)


# -- operations ----------------------------------------------------------------


def canonicalize(P: RectPolytope) -> RectPolytope:
    """Unique representative of the point set of ``P``."""
    if not P.boxes:
        return P
    return RectPolytope(P.dim, tuple(b for b, _ in merge_labelled(((b, True) for b in P.boxes), P.dim)))


def volume(P: RectPolytope) -> Scalar:
    total = Scalar(0)
    for b in P.boxes:
        total = total + b.volume()
    return total


def union(*polys: RectPolytope, dim: int | None = None) -> RectPolytope:
    """Disjoint union; raises OverlappingBoxes if interiors meet."""
    if dim is None:
        if not polys:
            raise ValueError("dimension required for an empty union")
        dim = polys[0].dim
    boxes = tuple(b for p in polys for b in p.boxes)
    return canonicalize(RectPolytope(dim, boxes))


def _overlay(P: RectPolytope, Q: RectPolytope):
    """Per-cell merged 1-D segments of ``P`` and ``Q`` on their common grid."""
    dim = P.dim
    if Q.dim != dim:
        raise ValueError("dimension mismatch")
    coords, index = _grid(list(P.boxes) + list(Q.boxes), dim)
    ps = _cell_segments(((b, True) for b in P.boxes), dim, index)
    qs = _cell_segments(((b, True) for b in Q.boxes), dim, index)
    ps = {c: [(lo, hi) for lo, hi, _ in _merge_segments(v)] for c, v in ps.items()}
    qs = {c: [(lo, hi) for lo, hi, _ in _merge_segments(v)] for c, v in qs.items()}
    return coords, ps, qs


def _intervals_op(a, b, keep_b: bool):
    """Index intervals of ``a`` inside ``b`` (``keep_b``) or outside it, as labelled segments."""
    cuts = sorted({x for iv in a for x in iv} | {x for iv in b for x in iv})
    out = []
    ia = ib = 0
    for lo, hi in zip(cuts, cuts[1:]):
        while ia < len(a) and a[ia][1] <= lo:
            ia += 1
        while ib < len(b) and b[ib][1] <= lo:
            ib += 1
        in_a = ia < len(a) and a[ia][0] <= lo
        in_b = ib < len(b) and b[ib][0] <= lo
        if in_a and in_b == keep_b:
            out.append((lo, hi, True))
    return out


def _from_cells(cells: dict, coords, dim: int) -> RectPolytope:
    cells = {c: v for c, v in cells.items() if v}
    return RectPolytope(dim, tuple(b for b, _ in _assemble(cells, coords, dim)))


def intersect(P: RectPolytope, Q: RectPolytope) -> RectPolytope:
    coords, ps, qs = _overlay(P, Q)
    cells = {c: _intervals_op(ps[c], qs[c], True) for c in ps.keys() & qs.keys()}
    return _from_cells(cells, coords, P.dim)


def _difference(ps: dict, qs: dict) -> dict:
    """Per-cell parts of ``ps`` outside ``qs``."""
    out = {}
    for c, a in ps.items():
        b = qs.get(c, [])
        out[c] = _intervals_op(a, b, False) if b else [(lo, hi, True) for lo, hi in a]
    return out


def contains(Q: RectPolytope, P: RectPolytope) -> bool:
    """Whether the point set of ``P`` lies in ``Q``."""
    if not P.boxes:
        return True
    _, ps, qs = _overlay(P, Q)
    return not any(_difference(ps, qs).values())


def subtract(Q: RectPolytope, P: RectPolytope) -> RectPolytope:
    """Closure of ``Q`` minus ``P``; requires ``P`` inside ``Q``."""
    if Q.dim != P.dim:
        raise ValueError("dimension mismatch")
    if not P.boxes:
        return canonicalize(Q)
    coords, ps, qs = _overlay(P, Q)
    if any(_difference(ps, qs).values()):
        raise NotContained("polytope is not contained in the minuend")
    return _from_cells(_difference(qs, ps), coords, Q.dim)


def refine_common(A: Cover, B: Cover) -> Cover:
    """Pairwise-intersection common refinement of two covers of one target."""
    if canonicalize(A.target) != canonicalize(B.target):
        raise TargetMismatch("covers have different targets")
    A.validate()
    B.validate()
    pieces = []
    for a in A.pieces:
        for b in B.pieces:
            c = intersect(a, b)
            if not c.is_empty():
                pieces.append(c)
    pieces.sort(key=lambda p: p.boxes[0].sort_key())
    return Cover(A.target, tuple(pieces))


def locate(x: Sequence[Scalar], coords: Sequence[Sequence[Scalar]]):
    """Cell index of a point strictly inside a grid cell, or None if on a grid line."""
    cell = []
    for xi, cs in zip(x, coords):
        k = bisect_left(cs, xi)
        if k < len(cs) and cs[k] == xi:
            return None
        cell.append(k - 1)
    return tuple(cell)
