"""Assembler engine: allowed transformations, spans as canonical piecewise maps,
composition by refinement, and a finite-set assembler used as an exact model.

Transformations follow ``y_i = s_i * x_{perm^-1(i)} + t_i``: source axis ``j``
is sent to target axis ``perm[j]``.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .polytopes import (
    Box,
    Cover,
    OverlappingBoxes,
    RectPolytope,
    canonicalize,
    contains,
    merge_labelled,
    subtract,
    union,
    volume,
)
from .scalars import (
    TAU,
    CoefficientGroup,
    Scalar,
    parse_scalar,
    scalar_from_json,
    scalar_to_json,
)

__all__ = [
    "Transform",
    "PieceMap",
    "Span",
    "AssemblerSpec",
    "FiniteSetAssembler",
    "FiniteSetSpan",
    "SourceTargetMismatch",
    "DisallowedTransformation",
    "AxiomFailure",
    "ON_CUT",
    "OutsideBase",
    "compose_spans",
    "span_equal",
    "embeddings_disjoint",
    "factors_through_complement",
    "check_assembler_axioms",
    "preset",
    "parse_spec",
]

DIAGRAMMATIC = "diagrammatic"  # compose(f, g): apply f, then g
FUNCTIONAL = "functional"  # compose(f, g): apply g, then f (f o g)


class SourceTargetMismatch(ValueError):
    pass


class DisallowedTransformation(ValueError):
    pass


class OutsideBase(ValueError):
    pass


class AxiomFailure(AssertionError):
    def __init__(self, name: str, witness=None):
        super().__init__(f"axiom {name} failed: {witness}")
        self.name = name
        self.witness = witness


class _OnCut:
    """Returned by ``apply`` for points on a piece boundary."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ON_CUT"


ON_CUT = _OnCut()


# -- transformations -----------------------------------------------------------


@dataclass(frozen=True)
class Transform:
    perm: tuple[int, ...]
    scales: tuple[Scalar, ...]
    translate: tuple[Scalar, ...]

    @classmethod
    def identity(cls, n: int) -> "Transform":
        return cls(tuple(range(n)), (Scalar(1),) * n, (Scalar(0),) * n)

    @classmethod
    def translation(cls, t: Sequence) -> "Transform":
        t = tuple(parse_scalar(x) for x in t)
        return cls(tuple(range(len(t))), (Scalar(1),) * len(t), t)

    @classmethod
    def affine(cls, scales: Sequence, t: Sequence, perm: Sequence[int] | None = None) -> "Transform":
        scales = tuple(parse_scalar(x) for x in scales)
        t = tuple(parse_scalar(x) for x in t)
        return cls(tuple(perm) if perm is not None else tuple(range(len(t))), scales, t)

    @property
    def dim(self) -> int:
        return len(self.perm)

    @cached_property
    def source_axis(self) -> tuple[int, ...]:
        inv = [0] * len(self.perm)
        for j, i in enumerate(self.perm):
            inv[i] = j
        return tuple(inv)

    def is_identity(self) -> bool:
        return (
            self.perm == tuple(range(self.dim))
            and all(s == 1 for s in self.scales)
            and all(not t for t in self.translate)
        )

    def is_translation(self) -> bool:
        return self.perm == tuple(range(self.dim)) and all(s == 1 for s in self.scales)

    def __call__(self, x: Sequence[Scalar]) -> tuple[Scalar, ...]:
        a = self.source_axis
        return tuple(self.scales[i] * x[a[i]] + self.translate[i] for i in range(self.dim))

    def then(self, g: "Transform") -> "Transform":
        """``g o self``."""
        a = self.source_axis
        b = g.source_axis
        n = self.dim
        src = [a[b[k]] for k in range(n)]
        perm = [0] * n
        for k, j in enumerate(src):
            perm[j] = k
        scales = tuple(g.scales[k] * self.scales[b[k]] for k in range(n))
        trans = tuple(g.scales[k] * self.translate[b[k]] + g.translate[k] for k in range(n))
        return Transform(tuple(perm), scales, trans)

    def inverse(self) -> "Transform":
        n = self.dim
        a = self.source_axis
        # x_{a(i)} = y_i / s_i - t_i / s_i; target axis a(i) reads source axis i
        scales = [Scalar(0)] * n
        trans = [Scalar(0)] * n
        for i in range(n):
            inv = self.scales[i].inverse()
            scales[a[i]] = inv
            trans[a[i]] = -(self.translate[i] * inv)
        return Transform(tuple(a), tuple(scales), tuple(trans))

    def image(self, box: Box) -> Box:
        a = self.source_axis
        ivs = []
        for i in range(self.dim):
            lo, hi = box.intervals[a[i]]
            s, t = self.scales[i], self.translate[i]
            u, v = s * lo + t, s * hi + t
            ivs.append((u, v) if s.sign() > 0 else (v, u))
        return Box(tuple(ivs))

    def to_json(self) -> dict:
        return {
            "perm": list(self.perm),
            "scales": [scalar_to_json(s) for s in self.scales],
            "translate": [scalar_to_json(t) for t in self.translate],
        }

    def __str__(self):
        parts = []
        a = self.source_axis
        for i in range(self.dim):
            s, t = self.scales[i], self.translate[i]
            parts.append(f"{s}*x{a[i]}+{t}" if s != 1 else f"x{a[i]}+{t}")
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class PieceMap:
    """A source box together with the transformation applied to it."""

    source: Box
    transform: Transform

    @property
    def image(self) -> Box:
        return self.transform.image(self.source)

    def to_json(self) -> dict:
        d = self.transform.to_json()
        return {"box": self.source.to_json(), **d}

    @classmethod
    def from_json(cls, obj) -> "PieceMap":
        box = Box.from_json(obj["box"])
        n = box.dim
        perm = tuple(obj.get("perm", range(n)))
        scales = tuple(scalar_from_json(s) for s in obj.get("scales", [1] * n))
        trans = tuple(scalar_from_json(t) for t in obj.get("translate", [0] * n))
        return cls(box, Transform(perm, scales, trans))


# -- spans ------------------------------------------------------------------------


class Span:
    """Scissors congruence stored as a piecewise map from ``source`` onto ``target``.

    The left leg is the cover of ``source`` by piece boxes; the right leg is
    the family of piece images.  Equality is equality of canonical forms,
    i.e. agreement almost everywhere.
    """

    def __init__(self, source: RectPolytope, target: RectPolytope, pieces: Iterable[PieceMap]):
        self.source = source
        self.target = target
        self.pieces = tuple(pieces)
        self._canon = None

    @property
    def dim(self) -> int:
        return self.source.dim

    @classmethod
    def identity(cls, P: RectPolytope) -> "Span":
        tr = Transform.identity(P.dim)
        return cls(P, P, [PieceMap(b, tr) for b in P.boxes])

    @property
    def left(self) -> Cover:
        return Cover(self.source, tuple(RectPolytope(self.dim, (p.source,)) for p in self.pieces))

    @property
    def right(self) -> Cover:
        return Cover(self.target, tuple(RectPolytope(self.dim, (p.image,)) for p in self.pieces))

    def image_polytope(self) -> RectPolytope:
        return union(*(RectPolytope(self.dim, (p.image,)) for p in self.pieces), dim=self.dim)

    def _rebuild(self, source, target, pieces):
        obj = object.__new__(type(self))
        obj.__dict__.update(self.__dict__)
        obj.source, obj.target, obj.pieces, obj._canon = source, target, tuple(pieces), None
        return obj

    def canonical_pieces(self) -> tuple[PieceMap, ...]:
        if self._canon is None:
            self._canon = _canonical_pieces(self.pieces, self.dim)
        return self._canon

    def canonical(self):
        pieces = self.canonical_pieces()
        out = self._rebuild(canonicalize(self.source), canonicalize(self.target), pieces)
        out._canon = pieces
        return out

    def then(self, g: "Span"):
        """Composite ``g o self``; refines the middle object as needed."""
        pieces = []
        for fp in self.pieces:
            img = fp.image
            for gp in g.pieces:
                c = img.intersection(gp.source)
                if c is None:
                    continue
                src = fp.transform.inverse().image(c)
                pieces.append(PieceMap(src, fp.transform.then(gp.transform)))
        out = self._rebuild(self.source, g.target, pieces)
        return out.canonical()

    def inverse(self):
        pieces = [PieceMap(p.image, p.transform.inverse()) for p in self.pieces]
        return self._rebuild(self.target, self.source, pieces).canonical()

    def apply(self, x: Sequence) -> tuple[Scalar, ...] | _OnCut:
        x = tuple(parse_scalar(v) for v in x)
        if len(x) != self.dim:
            raise ValueError("point has wrong dimension")
        if not any(b.contains_point(x) for b in self.source.boxes):
            raise OutsideBase(f"point {tuple(map(str, x))} is outside the source")
        for p in self.canonical_pieces():
            if p.source.interior_contains(x):
                return p.transform(x)
        return ON_CUT

    def __eq__(self, other):
        if not isinstance(other, Span):
            return NotImplemented
        return (
            canonicalize(self.source) == canonicalize(other.source)
            and canonicalize(self.target) == canonicalize(other.target)
            and self.canonical_pieces() == other.canonical_pieces()
        )

    def __hash__(self):
        return hash(self.canonical_pieces())

    def is_identity(self) -> bool:
        return all(p.transform.is_identity() for p in self.canonical_pieces())

    def piece_table(self) -> list[str]:
        return [f"{p.source} -> {p.image}  via {p.transform}" for p in self.canonical_pieces()]

    def __repr__(self):
        return f"{type(self).__name__}({'; '.join(self.piece_table())})"


def _canonical_pieces(pieces: Sequence[PieceMap], dim: int) -> tuple[PieceMap, ...]:
    if not pieces:
        return ()
    merged = merge_labelled(((p.source, p.transform) for p in pieces), dim)
    return tuple(PieceMap(b, t) for b, t in merged)


def compose_spans(f: Span, g: Span, order: str = DIAGRAMMATIC) -> Span:
    """Compose ``f: P -> Q`` with ``g: Q -> R``.

    With ``order="functional"`` the arguments are read as ``f o g`` instead,
    so ``g: P -> Q`` and ``f: Q -> R``.
    """
    if order == FUNCTIONAL:
        f, g = g, f
    elif order != DIAGRAMMATIC:
        raise ValueError(f"unknown composition order {order!r}")
    if f.dim != g.dim or canonicalize(f.target) != canonicalize(g.source):
        raise SourceTargetMismatch("target of the first span is not the source of the second")
    spec_f = getattr(f, "spec", None)
    spec_g = getattr(g, "spec", None)
    if spec_f is not None and spec_g is not None and spec_f != spec_g:
        raise DisallowedTransformation("spans belong to different assemblers")
    return f.then(g)


def span_equal(f: Span, g: Span) -> bool:
    return f == g


def embeddings_disjoint(e1: Span, e2: Span) -> bool:
    """Whether two embeddings into a common target have interior-disjoint images."""
    if canonicalize(e1.target) != canonicalize(e2.target):
        raise SourceTargetMismatch("embeddings have different targets")
    for p in e1.pieces:
        img = p.image
        for q in e2.pieces:
            if img.overlaps(q.image):
                return False
    return True


def factors_through_complement(e1: Span, e2: Span) -> bool:
    """Whether the image of ``e2`` lies in the complement of the image of ``e1``."""
    comp = subtract(e1.target, e1.image_polytope())
    return contains(comp, e2.image_polytope())


# -- assembler specifications -----------------------------------------------------


def _perm_closure(gens: Sequence[Sequence[int]], n: int) -> frozenset:
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    gens = [tuple(g) for g in gens]
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = tuple(g[p[j]] for j in range(n))
            if q not in seen:
                seen.add(q)
                frontier.append(q)
    return frozenset(seen)


@dataclass(frozen=True)
class AssemblerSpec:
    """Rectilinear assembler: cut coordinates, translations, scalings, flips, permutations."""

    dim: int
    translations: tuple[CoefficientGroup, ...]
    cuts: tuple[CoefficientGroup, ...]
    scalings: tuple[tuple[Scalar, ...], ...] = ()
    flips: tuple[bool, ...] = ()
    permutations: tuple[tuple[int, ...], ...] = ()
    name: str = ""
    # rule for subdividing an interval into standard children (S-mode moves)
    split_ratios: tuple[Scalar, ...] = ()

    def __post_init__(self):
        n = self.dim
        if len(self.translations) != n or len(self.cuts) != n:
            raise ValueError("need one translation group and one cut group per axis")
        if not self.scalings:
            object.__setattr__(self, "scalings", ((),) * n)
        if not self.flips:
            object.__setattr__(self, "flips", (False,) * n)
        object.__setattr__(
            self, "scalings", tuple(tuple(parse_scalar(g) for g in gs) for gs in self.scalings)
        )
        object.__setattr__(self, "permutations", tuple(tuple(p) for p in self.permutations))
        object.__setattr__(self, "split_ratios", tuple(parse_scalar(r) for r in self.split_ratios))
        for gens in self.scalings:
            for g in gens:
                if g.sign() <= 0:
                    raise ValueError("scaling generators must be positive")

    @cached_property
    def allowed_perms(self) -> frozenset:
        return _perm_closure(self.permutations, self.dim)

    @property
    def mode(self) -> str | None:
        """``"EA"`` (isometric pieces only), ``"S"`` (can squeeze every axis) or None."""
        nontrivial = [any(g != 1 for g in gens) for gens in self.scalings]
        if not any(nontrivial):
            return "EA"
        if all(nontrivial):
            return "S"
        return None

    def scaling_generator(self, axis: int) -> Scalar | None:
        """A generator of the axis's scaling group that is < 1."""
        for g in self.scalings[axis]:
            if g != 1:
                return g if g < 1 else g.inverse()
        return None

    def scale_allowed(self, axis: int, s: Scalar) -> bool:
        sign = s.sign()
        if sign == 0:
            return False
        if sign < 0 and not self.flips[axis]:
            return False
        mag = abs(s)
        gens = [g for g in self.scalings[axis] if g != 1]
        if mag == 1:
            return True
        if not gens:
            return False
        return _in_multiplicative_group(mag, gens)

    def check_transform(self, tr: Transform) -> str | None:
        """Reason the transformation is disallowed, or None."""
        if tr.dim != self.dim:
            return "dimension mismatch"
        if tr.perm not in self.allowed_perms:
            return f"coordinate permutation {tr.perm} not allowed"
        for i in range(self.dim):
            if not self.scale_allowed(i, tr.scales[i]):
                return f"scale {tr.scales[i]} not allowed on axis {i}"
            if not self.translations[i].contains(tr.translate[i]):
                return f"translation {tr.translate[i]} not in {self.translations[i]} on axis {i}"
        return None

    def cut_ok(self, axis: int, c: Scalar) -> bool:
        return self.cuts[axis].contains(c)

    def box_ok(self, box: Box) -> bool:
        return all(self.cut_ok(i, lo) and self.cut_ok(i, hi) for i, (lo, hi) in enumerate(box.intervals))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "gamma": [g.to_json() for g in self.translations],
            "cuts": [g.to_json() for g in self.cuts],
            "scalings": [[scalar_to_json(g) for g in gs] for gs in self.scalings],
            "flips": list(self.flips),
            "permutations": [list(p) for p in self.permutations],
            "split_ratios": [scalar_to_json(r) for r in self.split_ratios],
        }

    @classmethod
    def from_json(cls, obj) -> "AssemblerSpec":
        if isinstance(obj, str):
            return parse_spec(obj)
        if "preset" in obj:
            return parse_spec(obj["preset"])
        n = obj["dim"]
        gamma = [CoefficientGroup.from_json(g) for g in obj["gamma"]]
        cuts = [CoefficientGroup.from_json(g) for g in obj.get("cuts", obj["gamma"])]
        return cls(
            n,
            tuple(gamma),
            tuple(cuts),
            tuple(tuple(scalar_from_json(g) for g in gs) for gs in obj.get("scalings", [[]] * n)),
            tuple(obj.get("flips", [False] * n)),
            tuple(tuple(p) for p in obj.get("permutations", [])),
            obj.get("name", ""),
            tuple(scalar_from_json(r) for r in obj.get("split_ratios", [])),
        )

    def __str__(self):
        return self.name or f"AssemblerSpec(dim={self.dim})"


def _in_multiplicative_group(x: Scalar, gens: Sequence[Scalar], bound: int = 24) -> bool:
    """Whether ``x`` is a product of integer powers of ``gens``."""
    logs = [math.log(float(g)) for g in gens]
    lx = math.log(float(x))
    if len(gens) == 1:
        k = round(lx / logs[0])
        return gens[0] ** k == x
    for exps in itertools.product(range(-bound, bound + 1), repeat=len(gens) - 1):
        rest = lx - sum(e * l for e, l in zip(exps, logs))
        k = round(rest / logs[-1])
        cand = Scalar(1)
        for e, g in zip(exps, gens):
            cand = cand * g ** e
        if cand * gens[-1] ** k == x:
            return True
    return False


# -- presets ----------------------------------------------------------------------


def _gamma_args(gamma: CoefficientGroup) -> list[str]:
    """Preset arguments that rebuild ``gamma`` when it is a Q-span, else its label."""
    if gamma.ring is None:
        return [str(b) for b in gamma.basis] if gamma.dim > 1 else []
    return [gamma.label]


def iet(gamma: CoefficientGroup | None = None) -> AssemblerSpec:
    gamma = gamma or CoefficientGroup.rationals()
    args = _gamma_args(gamma)
    return AssemblerSpec(1, (gamma,), (gamma,), name=f"iet({','.join(args)})" if args else "iet")


def rec(n: int, gamma: CoefficientGroup | None = None) -> AssemblerSpec:
    gamma = gamma or CoefficientGroup.rationals()
    return AssemblerSpec(n, (gamma,) * n, (gamma,) * n, name=f"rec({','.join([str(n)] + _gamma_args(gamma))})")


def higman(d: int, n: int = 1) -> AssemblerSpec:
    g = CoefficientGroup.localization(d)
    ratios = (Fraction(1, d),) * d
    name = f"higman({d})" if n == 1 else f"higman({d},{n})"
    return AssemblerSpec(n, (g,) * n, (g,) * n, ((Scalar(d),),) * n, name=name, split_ratios=ratios)


def brin_thompson(n: int) -> AssemblerSpec:
    spec = higman(2, n)
    return AssemblerSpec(
        n, spec.translations, spec.cuts, spec.scalings, name=f"brin-thompson({n})",
        split_ratios=spec.split_ratios,
    )


def v_tau() -> AssemblerSpec:
    g = CoefficientGroup.z_tau()
    return AssemblerSpec(1, (g,), (g,), ((TAU,),), name="v-tau", split_ratios=(TAU, TAU * TAU))


def dyadic_theta(theta="sqrt2", n: int = 1) -> AssemblerSpec:
    """Cut points and translations ``(a + b*theta)/2^k``, scalings by powers of 2."""
    g = CoefficientGroup.localization(2, parse_scalar(theta))
    return AssemblerSpec(
        n, (g,) * n, (g,) * n, ((Scalar(2),),) * n, name=f"dyadic-theta({theta})",
        split_ratios=(Fraction(1, 2),) * 2,
    )


_PRESET_RE = re.compile(r"^\s*([a-z\-]+)\s*(?:\((.*)\))?\s*$")


def _gamma_from_args(args: Sequence[str]) -> CoefficientGroup:
    if not args or args == ["Q"] or args == ["1"]:
        return CoefficientGroup.rationals()
    return CoefficientGroup.q_span(*args)


def preset(name: str, *args, gamma: CoefficientGroup | None = None) -> AssemblerSpec:
    """Named assembler presets: iet, rec, brin-thompson, higman, v-tau, dyadic-theta."""
    key = name.strip().lower().replace("_", "-")
    if key == "iet":
        return iet(gamma or _gamma_from_args(list(args)))
    if key == "rec":
        n = int(args[0]) if args else 2
        return rec(n, gamma or _gamma_from_args(list(args[1:])))
    if key in ("brin-thompson", "nv", "bt"):
        return brin_thompson(int(args[0]) if args else 1)
    if key == "higman":
        d = int(args[0]) if args else 2
        n = int(args[1]) if len(args) > 1 else 1
        return higman(d, n)
    if key in ("v-tau", "vtau"):
        return v_tau()
    if key == "dyadic-theta":
        return dyadic_theta(args[0] if args else "sqrt2", int(args[1]) if len(args) > 1 else 1)
    raise ValueError(f"unknown assembler preset {name!r}")


def parse_spec(text, gamma: CoefficientGroup | None = None) -> AssemblerSpec:
    """Parse ``"iet(1,sqrt2)"``, ``"rec(2)"``, ``"higman(3)"``, ``"v-tau"`` or JSON."""
    if isinstance(text, AssemblerSpec):
        return text
    if isinstance(text, dict):
        return AssemblerSpec.from_json(text)
    s = text.strip()
    if s.startswith("{"):
        return AssemblerSpec.from_json(json.loads(s))
    m = _PRESET_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse assembler spec {text!r}")
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    return preset(m.group(1), *[a for a in args if a], gamma=gamma)


# -- finite-set assembler ----------------------------------------------------------


@dataclass(frozen=True)
class FiniteSetSpan:
    """Scissors congruence between finite sets.

    Each piece is a pair of equal-length tuples; ``src[k]`` maps to ``dst[k]``.
    The sources form a partition of ``source``, the targets one of ``target``.
    """

    source: frozenset
    target: frozenset
    pieces: tuple[tuple[tuple, tuple], ...]

    def bijection(self) -> dict:
        out = {}
        for src, dst in self.pieces:
            out.update(zip(src, dst))
        return out

    def is_valid(self) -> bool:
        srcs = [x for s, _ in self.pieces for x in s]
        dsts = [y for _, d in self.pieces for y in d]
        return (
            all(len(s) == len(d) and s for s, d in self.pieces)
            and len(set(srcs)) == len(srcs) == len(self.source)
            and set(srcs) == set(self.source)
            and len(set(dsts)) == len(dsts)
            and set(dsts) == set(self.target)
        )

    def __eq__(self, other):
        if not isinstance(other, FiniteSetSpan):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and \
            self.bijection() == other.bijection()

    def __hash__(self):
        return hash(tuple(sorted(self.bijection().items())))


@dataclass(frozen=True)
class FiniteSetAssembler:
    """Objects are subsets of ``{1..N}``; covers are partitions; morphisms injections."""

    size: int

    def ground(self) -> frozenset:
        return frozenset(range(1, self.size + 1))

    def span_from_bijection(self, mapping: dict, rng: random.Random | None = None) -> FiniteSetSpan:
        """Present a bijection as a span, cutting the source into random blocks."""
        items = sorted(mapping.items())
        if rng is not None:
            rng.shuffle(items)
        blocks = []
        i = 0
        while i < len(items):
            k = rng.randint(1, len(items) - i) if rng is not None else 1
            chunk = items[i:i + k]
            blocks.append((tuple(a for a, _ in chunk), tuple(b for _, b in chunk)))
            i += k
        return FiniteSetSpan(frozenset(mapping), frozenset(mapping.values()), tuple(blocks))

    def compose(self, f: FiniteSetSpan, g: FiniteSetSpan, order: str = DIAGRAMMATIC) -> FiniteSetSpan:
        """Ore composition: refine f's target cover by g's source cover and transport."""
        if order == FUNCTIONAL:
            f, g = g, f
        if f.target != g.source:
            raise SourceTargetMismatch("finite-set spans do not match")
        pieces = []
        for fs, fd in f.pieces:
            back = dict(zip(fd, fs))
            for gs, gd in g.pieces:
                fwd = dict(zip(gs, gd))
                common = [y for y in fd if y in fwd]
                if common:
                    pieces.append((tuple(back[y] for y in common), tuple(fwd[y] for y in common)))
        return FiniteSetSpan(f.source, g.target, tuple(pieces))

    def inverse(self, f: FiniteSetSpan) -> FiniteSetSpan:
        return FiniteSetSpan(f.target, f.source, tuple((d, s) for s, d in f.pieces))

    def is_cover(self, target: Iterable, blocks: Sequence[Iterable]) -> bool:
        seen = []
        for b in blocks:
            seen.extend(b)
        return len(seen) == len(set(seen)) and set(seen) == set(target)


# -- axiom checks --------------------------------------------------------------------


def _random_cover(P: RectPolytope, spec: AssemblerSpec, rng: random.Random, cuts: int = 2) -> Cover:
    from .groups import random_cut_point

    pieces = []
    for box in P.boxes:
        parts = [box]
        for _ in range(cuts):
            target = rng.randrange(len(parts))
            b = parts.pop(target)
            axis = rng.randrange(P.dim)
            lo, hi = b.intervals[axis]
            c = random_cut_point(spec, axis, lo, hi, rng)
            parts += [b.replace(axis, lo, c), b.replace(axis, c, hi)]
        pieces += [RectPolytope(P.dim, (b,)) for b in parts]
    return Cover(P, tuple(pieces))


def check_assembler_axioms(spec: AssemblerSpec, samples: int = 5, seed: int = 0) -> dict:
    """Check density, refinement (R), archimedean (A) and (E)/(S) witnesses on samples.

    Returns a report; raises :class:`AxiomFailure` with a witness on failure.
    """
    from . import constructors
    from .groups import random_polytope

    rng = random.Random(seed)
    report: dict = {"spec": str(spec), "mode": spec.mode, "samples": samples, "checked": []}
    for i in range(spec.dim):
        for kind, g in (("translations", spec.translations[i]), ("cuts", spec.cuts[i])):
            if not g.contains(Scalar(1)):
                raise AxiomFailure("unit", f"{kind} group on axis {i} misses 1")
            if not g.is_dense():
                raise AxiomFailure("density", f"{kind} group {g} on axis {i} is not dense")
        if not all(spec.cuts[i].contains(b) for b in spec.translations[i].basis):
            raise AxiomFailure("compatibility", f"translations on axis {i} do not preserve cuts")
        for g in spec.scalings[i]:
            for b in spec.cuts[i].basis:
                if not (spec.cuts[i].contains(g * b) and spec.cuts[i].contains(b / g)):
                    raise AxiomFailure("compatibility", f"scaling {g} does not preserve cuts on axis {i}")
    report["checked"] += ["density", "compatibility"]

    for _ in range(samples):
        P = random_polytope(spec, rng)
        A = _random_cover(P, spec, rng)
        B = _random_cover(P, spec, rng)
        from .polytopes import refine_common

        R = refine_common(A, B)
        if not R.is_valid():
            raise AxiomFailure("R", (A, B))
        for piece in R.pieces:
            if not any(contains(a, piece) for a in A.pieces) or not any(contains(b, piece) for b in B.pieces):
                raise AxiomFailure("R", piece)
    report["checked"].append("R")

    if spec.mode == "EA":
        for _ in range(samples):
            P = random_polytope(spec, rng)
            Q = random_polytope(spec, rng)
            pieces = _archimedean_cover(Q, volume(P), spec, rng)
            if any(2 * volume(p) > volume(P) for p in pieces):
                raise AxiomFailure("A", (P, Q))
        report["checked"].append("A")
        witnesses = 0
        for _ in range(samples):
            P = random_polytope(spec, rng)
            Q = random_polytope(spec, rng)
            if volume(P) < volume(Q):
                P, Q = P, Q
            elif volume(Q) < volume(P):
                P, Q = Q, P
            else:
                continue
            e = constructors.construct_embedding_ea(P, Q, spec)
            from .groups import verify

            problems = verify(e)
            if problems:
                raise AxiomFailure("E", problems)
            witnesses += 1
        report["E_witnesses"] = witnesses
        report["checked"].append("E")
    elif spec.mode == "S":
        from .groups import verify

        witnesses = 0
        for _ in range(samples):
            P = random_polytope(spec, rng)
            Q = random_polytope(spec, rng)
            e = constructors.construct_embedding_squeeze(P, Q, spec)
            problems = verify(e)
            if problems or e.complement.is_empty():
                raise AxiomFailure("S", problems or "empty complement")
            witnesses += 1
        report["S_witnesses"] = witnesses
        report["checked"].append("S")
    report["ok"] = True
    return report


def _archimedean_cover(Q: RectPolytope, bound: Scalar, spec: AssemblerSpec, rng) -> list[RectPolytope]:
    """Bisect pieces of ``Q`` along their longest axis until ``2 vol <= bound``."""
    from .groups import random_cut_point

    todo = list(Q.boxes)
    done = []
    while todo:
        b = todo.pop()
        if 2 * b.volume() <= bound:
            done.append(RectPolytope(Q.dim, (b,)))
            continue
        axis = max(range(Q.dim), key=lambda i: float(b.intervals[i][1] - b.intervals[i][0]))
        lo, hi = b.intervals[axis]
        c = random_cut_point(spec, axis, lo, hi, rng, near_middle=True)
        todo += [b.replace(axis, lo, c), b.replace(axis, c, hi)]
    return done
