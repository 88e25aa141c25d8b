"""Finitely generated abelian groups, Smith normal form, exterior powers of
integer matrices, two-term complex homology, Kunneth and Poincare series."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, gcd, prod
from typing import Iterable, Mapping, Sequence

from sympy import Matrix as SympyMatrix
from sympy import ZZ, factorint
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors
from sympy.matrices.normalforms import smith_normal_decomp

__all__ = [
    "SingularMultiplier",
    "smith_normal_form",
    "invariant_factors",
    "determinant",
    "exterior_power_matrix",
    "FGAbGroup",
    "GradedAb",
    "two_term_homology",
    "two_term_pieces",
    "kunneth_smash",
    "smash_power",
    "omega_infty_poincare",
    "wedge_generator_dims",
    "pt_group_1d",
]

Matrix = list[list[int]]


class SingularMultiplier(ValueError):
    pass


# -- Smith normal form ------------------------------------------------------------


def _to_list(A) -> Matrix:
    return [[int(A[i, j]) for j in range(A.cols)] for i in range(A.rows)]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(D, U, V)`` with ``U M V = D`` diagonal, ``d_1 | d_2 | ...``, ``d_i >= 0``."""
    rows = [list(map(int, r)) for r in M]
    m, n = len(rows), len(rows[0]) if rows else 0
    if not m or not n:
        return [[0] * n for _ in range(m)], _identity(m), _identity(n)
    D, U, V = smith_normal_decomp(SympyMatrix(rows), domain=ZZ)
    D, U, V = _to_list(D), _to_list(U), _to_list(V)
    for i in range(min(m, n)):
        if D[i][i] < 0:
            D[i][i] = -D[i][i]
            U[i] = [-x for x in U[i]]
    return D, U, V


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def invariant_factors(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    if not M or not M[0]:
        return []
    factors = sympy_invariant_factors(SympyMatrix([list(map(int, r)) for r in M]), domain=ZZ)
    return [abs(int(f)) for f in factors if f]


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k]), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def exterior_power_matrix(M: Sequence[Sequence[int]], j: int) -> Matrix:
    """Matrix of the j-th exterior power on the sorted basis ``e_I``; entries are minors."""
    d = len(M)
    if not 0 <= j <= d:
        raise ValueError("need 0 <= j <= d")
    subsets = list(itertools.combinations(range(d), j))
    return [[determinant([[M[r][c] for c in J] for r in I]) for J in subsets] for I in subsets]


# -- finitely generated abelian groups -----------------------------------------------


def _prime_powers(n: int, inverted: frozenset) -> list[int]:
    return [p ** e for p, e in factorint(n).items() if p not in inverted]


def _chain(prime_powers: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors from a multiset of prime powers."""
    by_prime: dict[int, list[int]] = {}
    for q in prime_powers:
        p = next(iter(factorint(q)))
        by_prime.setdefault(p, []).append(q)
    for qs in by_prime.values():
        qs.sort(reverse=True)
    length = max((len(v) for v in by_prime.values()), default=0)
    factors = [prod(v[k] for v in by_prime.values() if k < len(v)) for k in range(length)]
    return tuple(sorted(factors))


@dataclass(frozen=True)
class FGAbGroup:
    """``Z_S^rank (+) (+)_i Z/d_i`` where ``Z_S`` inverts the primes in ``inverted``."""

    rank: int = 0
    torsion: tuple[int, ...] = ()
    inverted: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        inv = frozenset(self.inverted)
        object.__setattr__(self, "inverted", inv)
        powers = []
        for d in self.torsion:
            d = abs(int(d))
            if d == 0:
                raise ValueError("use rank for free summands")
            if d > 1:
                powers += _prime_powers(d, inv)
        object.__setattr__(self, "torsion", _chain(powers))
        if self.rank < 0:
            raise ValueError("negative rank")

    @classmethod
    def free(cls, rank: int, inverted=frozenset()) -> "FGAbGroup":
        return cls(rank, (), inverted)

    @classmethod
    def cyclic(cls, n: int, inverted=frozenset()) -> "FGAbGroup":
        return cls(1, (), inverted) if n == 0 else cls(0, (n,), inverted)

    @classmethod
    def from_relations(cls, matrix: Sequence[Sequence[int]], ngens: int, inverted=frozenset()) -> "FGAbGroup":
        """Cokernel of the relation matrix (one column per relation, one row per generator)."""
        factors = invariant_factors(matrix) if matrix and matrix[0] else []
        return cls(ngens - len(factors), tuple(f for f in factors if f > 1), inverted)

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def order(self) -> int | None:
        return None if self.rank else prod(self.torsion)

    def _key(self):
        return (self.rank, self.torsion, self.inverted if self.rank else frozenset())

    def __eq__(self, other):
        if not isinstance(other, FGAbGroup):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _merge_inverted(self, other) -> frozenset:
        return self.inverted | other.inverted

    def __add__(self, other: "FGAbGroup") -> "FGAbGroup":
        inv = self._merge_inverted(other)
        return FGAbGroup(self.rank + other.rank, self.torsion + other.torsion, inv)

    def tensor(self, other: "FGAbGroup") -> "FGAbGroup":
        inv = self._merge_inverted(other)
        tors = [gcd(a, b) for a in self.torsion for b in other.torsion]
        tors += list(self.torsion) * other.rank + list(other.torsion) * self.rank
        return FGAbGroup(self.rank * other.rank, tuple(tors), inv)

    def tor(self, other: "FGAbGroup") -> "FGAbGroup":
        inv = self._merge_inverted(other)
        return FGAbGroup(0, tuple(gcd(a, b) for a in self.torsion for b in other.torsion), inv)

    def is_divisible_by(self, q: int) -> bool:
        """Whether multiplication by ``q`` is invertible, i.e. a ``Z[1/q]``-module."""
        primes = set(factorint(q))
        if self.rank and not primes <= self.inverted:
            return False
        return all(gcd(t, q) == 1 for t in self.torsion)

    def to_json(self) -> dict:
        out: dict = {}
        if self.rank:
            out["rank"] = self.rank
        if self.torsion:
            out["torsion"] = list(self.torsion)
        if self.rank and self.inverted:
            out["inverted"] = sorted(self.inverted)
        return out

    @classmethod
    def from_json(cls, obj) -> "FGAbGroup":
        return cls(obj.get("rank", 0), tuple(obj.get("torsion", ())), frozenset(obj.get("inverted", ())))

    def __str__(self):
        if self.is_zero():
            return "0"
        base = "Z" if not self.inverted else "Z[1/" + "".join(map(str, sorted(self.inverted))) + "]"
        parts = []
        if self.rank:
            parts.append(base if self.rank == 1 else f"{base}^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts)


class GradedAb:
    """Finitely supported family of abelian groups indexed by integer degree."""

    def __init__(self, groups: Mapping[int, FGAbGroup] | None = None):
        self.groups = {int(k): v for k, v in sorted((groups or {}).items()) if not v.is_zero()}

    def __getitem__(self, deg: int) -> FGAbGroup:
        return self.groups.get(deg, FGAbGroup())

    def degrees(self) -> list[int]:
        return list(self.groups)

    def is_zero(self) -> bool:
        return not self.groups

    def __eq__(self, other):
        if not isinstance(other, GradedAb):
            return NotImplemented
        return self.groups == other.groups

    def __hash__(self):
        return hash(tuple(self.groups.items()))

    def to_json(self) -> dict:
        return {str(k): v.to_json() for k, v in self.groups.items()}

    @classmethod
    def from_json(cls, obj) -> "GradedAb":
        return cls({int(k): FGAbGroup.from_json(v) for k, v in obj.items()})

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self.groups.items())
        return f"GradedAb({{{body}}})"


# -- two-term complexes ---------------------------------------------------------------


def _lambda_minus_one(M, j: int) -> Matrix:
    L = exterior_power_matrix(M, j)
    return [[L[r][c] - int(r == c) for c in range(len(L))] for r in range(len(L))]


def two_term_pieces(M: Sequence[Sequence[int]], localize: bool = False) -> list[dict]:
    """Kernel and cokernel of ``Lambda^j(M) - 1`` for ``1 <= j <= d``."""
    d = len(M)
    det = determinant(M)
    if det == 0:
        raise SingularMultiplier("multiplier is not invertible over Q")
    inverted = frozenset(factorint(abs(det))) if localize else frozenset()
    out = []
    for j in range(1, d + 1):
        A = _lambda_minus_one(M, j)
        size = len(A)
        factors = invariant_factors(A)
        coker = FGAbGroup(size - len(factors), tuple(f for f in factors if f > 1), inverted)
        ker = FGAbGroup.free(size - len(factors), inverted)
        out.append({"j": j, "coker": coker, "ker": ker})
    return out


def two_term_homology(M: Sequence[Sequence[int]], localize: bool = False,
                      with_report: bool = False):
    """Homology of the coefficient lattice with multiplier ``M``.

    Degree ``j-1`` receives ``coker(Lambda^j(M) - 1)`` and ``ker(Lambda^{j-1}(M) - 1)``;
    degree ``d`` receives ``ker(Lambda^d(M) - 1)``.  With ``localize`` the primes
    of ``det M`` are inverted.  Kernels are free, so each splice splits.
    """
    pieces = two_term_pieces(M, localize)
    d = len(M)
    groups: dict[int, FGAbGroup] = {}
    for p in pieces:
        j = p["j"]
        groups[j - 1] = groups.get(j - 1, FGAbGroup()) + p["coker"]
        groups[j] = groups.get(j, FGAbGroup()) + p["ker"]
    result = GradedAb(groups)
    if not with_report:
        return result
    report = {
        "pieces": [
            {"j": p["j"], "coker": p["coker"].to_json(), "ker": p["ker"].to_json()} for p in pieces
        ],
        # a kernel is a free module over the coefficient ring, so no extension can be nonsplit
        "nonsplit_possible": False,
        "top_degree": d,
    }
    return result, report


# -- Kunneth ---------------------------------------------------------------------------


def kunneth_smash(X: GradedAb, Y: GradedAb) -> GradedAb:
    out: dict[int, FGAbGroup] = {}
    for i, a in X.groups.items():
        for j, b in Y.groups.items():
            out[i + j] = out.get(i + j, FGAbGroup()) + a.tensor(b)
            out[i + j + 1] = out.get(i + j + 1, FGAbGroup()) + a.tor(b)
    return GradedAb(out)


def smash_power(X: GradedAb, n: int) -> GradedAb:
    if n < 1:
        raise ValueError("need n >= 1")
    out = X
    for _ in range(n - 1):
        out = kunneth_smash(out, X)
    return out


# -- Poincare series ---------------------------------------------------------------------


def omega_infty_poincare(Kq: Mapping[int, int] | Sequence[int], N: int) -> list[int]:
    """Graded dimensions up to ``N`` of the free graded-commutative algebra on ``Kq``.

    ``Kq`` maps degree ``q >= 1`` to the number of generators; a sequence is
    read as ``[dim K_1, dim K_2, ...]``.
    """
    if not isinstance(Kq, Mapping):
        Kq = {q + 1: v for q, v in enumerate(Kq)}
    series = [1] + [0] * N
    for q, dim in Kq.items():
        if q < 1:
            raise ValueError("generators must sit in positive degrees")
        for _ in range(dim):
            if q % 2:  # exterior: multiply by 1 + t^q
                series = [series[k] + (series[k - q] if k >= q else 0) for k in range(N + 1)]
            else:  # polynomial: multiply by 1/(1 - t^q)
                for k in range(q, N + 1):
                    series[k] += series[k - q]
    return series


def wedge_generator_dims(d: int) -> dict[int, int]:
    """Rational dimensions of ``Lambda^{n+1}(Q^d)`` in degree ``n >= 1``."""
    return {n: comb(d, n + 1) for n in range(1, d) if comb(d, n + 1)}


# -- one-dimensional polytope group ------------------------------------------------------


def pt_group_1d(cuts: Sequence) -> tuple[FGAbGroup, bool]:
    """Polytope group of intervals with endpoints in ``cuts`` versus a wedge of circles.

    The group is generated by all intervals ``[c_a, c_b]`` subject to
    ``[c_a, c_c] = [c_a, c_b] + [c_b, c_c]``.  The comparison space is the
    path graph on the cut points with its vertex set coned off; its reduced
    first homology is computed from boundary matrices.
    """
    from .scalars import parse_scalar

    pts = sorted({parse_scalar(c) for c in cuts})
    k = len(pts)
    intervals = list(itertools.combinations(range(k), 2))
    index = {iv: n for n, iv in enumerate(intervals)}
    relations = []
    for a, b, c in itertools.combinations(range(k), 3):
        col = [0] * len(intervals)
        col[index[(a, c)]] += 1
        col[index[(a, b)]] -= 1
        col[index[(b, c)]] -= 1
        relations.append(col)
    matrix = [list(r) for r in zip(*relations)] if relations else []
    pt = FGAbGroup.from_relations(matrix, len(intervals)) if matrix else FGAbGroup.free(len(intervals))

    # graph: vertices = cut points + cone point, edges = elementary intervals + cone edges
    from .stability import SimplicialComplex, complex_homology

    cone = k
    edges = [(i, i + 1) for i in range(k - 1)] + [(i, cone) for i in range(k)]
    if k == 0:
        circles = FGAbGroup()
    else:
        K = SimplicialComplex.from_faces(list(range(k + 1)), [tuple(e) for e in edges] or [(cone,)])
        H, _ = complex_homology(K)
        circles = H[1]
    return pt, pt == circles
