"""Exact real numbers in the multi-quadratic tower Q(sqrt n : n squarefree).

A :class:`Scalar` is a finite sum ``sum_n c_n * sqrt(n)`` with rational
coefficients and squarefree radicands.  Square roots of distinct squarefree
integers are linearly independent over Q, so the zero test is structural and
the order is decided by interval refinement.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Scalar",
    "CoefficientGroup",
    "PrecisionCapExceeded",
    "NotInSpan",
    "compare",
    "linearize",
    "parse_scalar",
    "scalar_from_json",
    "scalar_to_json",
    "squarefree_decompose",
    "TAU",
    "SQRT2",
]

INITIAL_PRECISION = 64
DEFAULT_PRECISION_CAP = 1 << 16
PRECISION_CAP_ENV = "SCISSORS_PRECISION_CAP"


class PrecisionCapExceeded(ArithmeticError):
    """Raised when sign refinement exceeds the configured bit cap.

    Nonzero elements always resolve, so hitting the cap indicates a bug.
    """


class NotInSpan(ValueError):
    """A scalar does not lie in the span of a coefficient group."""


def _precision_cap() -> int:
    value = os.environ.get(PRECISION_CAP_ENV)
    return int(value) if value else DEFAULT_PRECISION_CAP


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(g, m)`` with ``n == g*g*m`` and ``m`` squarefree."""
    if n <= 0:
        raise ValueError(f"radicand must be positive, got {n}")
    g, m = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        g *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1 if p == 2 else 2
    return g, m * n


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class Scalar:
    """Immutable exact real ``sum c_n sqrt(n)``.

    ``terms`` maps squarefree radicands (1 for the rational part) to nonzero
    :class:`~fractions.Fraction` coefficients.
    """

    __slots__ = ("_terms", "_hash", "__weakref__")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self._terms = value._terms
        elif isinstance(value, Mapping):
            acc: dict[int, Fraction] = {}
            for rad, coef in value.items():
                coef = _as_fraction(coef)
                if coef == 0:
                    continue
                g, m = squarefree_decompose(int(rad))
                acc[m] = acc.get(m, Fraction(0)) + coef * g
            self._terms = tuple(sorted((r, c) for r, c in acc.items() if c != 0))
        else:
            q = _as_fraction(value)
            self._terms = ((1, q),) if q else ()
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple) -> "Scalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def sqrt(cls, n, coef=1) -> "Scalar":
        """``coef * sqrt(n)`` for a nonnegative integer ``n``."""
        if n == 0:
            return cls(0)
        return cls({int(n): coef})

    # -- structure -------------------------------------------------------

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def radicands(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def rational_part(self) -> Fraction:
        if self._terms and self._terms[0][0] == 1:
            return self._terms[0][1]
        return Fraction(0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part()

    # -- arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Scalar | None":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for r, c in other._terms:
            v = acc.get(r)
            acc[r] = c if v is None else v + c
        return Scalar._raw(tuple(sorted((r, c) for r, c in acc.items() if c)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(tuple((r, -c) for r, c in self._terms))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Scalar._raw(())
            return Scalar._raw(tuple((r, c * other) for r, c in self._terms))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other._terms) == 1 and other._terms[0][0] == 1:
            return self * other._terms[0][1]
        if len(self._terms) == 1 and self._terms[0][0] == 1:
            return other * self._terms[0][1]
        acc: dict[int, Fraction] = {}
        for r1, c1 in self._terms:
            for r2, c2 in other._terms:
                # sqrt(r1)*sqrt(r2) = g*sqrt(r1*r2/g^2) for squarefree r1, r2
                g = math.gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                acc[r] = acc.get(r, Fraction(0)) + c1 * c2 * g
        return Scalar._raw(tuple(sorted((r, c) for r, c in acc.items() if c)))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self._terms:
            raise ZeroDivisionError("division by zero Scalar")
        if self.is_rational():
            return Scalar._raw(((1, 1 / self._terms[0][1]),))
        # x = a + b*sqrt(p) with a, b free of the prime p; 1/x = (a - b sqrt p)/(a^2 - p b^2)
        p = _smallest_prime_factor(max(r for r, _ in self._terms if r > 1))
        a_terms, b_terms = [], []
        for r, c in self._terms:
            if r % p == 0:
                b_terms.append((r // p, c))
            else:
                a_terms.append((r, c))
        a = Scalar._raw(tuple(sorted(a_terms)))
        b = Scalar._raw(tuple(sorted(b_terms)))
        sp = Scalar.sqrt(p)
        conj = a - b * sp
        denom = a * a - b * b * p
        return conj * denom.inverse()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Scalar(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- ordering --------------------------------------------------------

    def sign(self) -> int:
        terms = self._terms
        if not terms:
            return 0
        if len(terms) == 1:
            c = terms[0][1]
            return 1 if c > 0 else -1
        try:
            approx = 0.0
            mag = 0.0
            for r, c in terms:
                v = float(c) * math.sqrt(r)
                approx += v
                mag += abs(v)
            if abs(approx) > 1e-12 * mag:
                return 1 if approx > 0 else -1
        except OverflowError:
            pass
        return _refined_sign(terms)

    def _cmp(self, other) -> int:
        other = self._coerce(other)
        if other is None:
            raise TypeError(f"cannot compare Scalar with {type(other).__name__}")
        if self.is_rational() and other.is_rational():
            a, b = self.rational_part(), other.rational_part()
            return (a > b) - (a < b)
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_part() == other
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            if self.is_rational():
                h = hash(self.rational_part())
            else:
                h = hash(self._terms)
            self._hash = h
        return h

    def __bool__(self):
        return bool(self._terms)

    def __float__(self):
        return float(sum(float(c) * math.sqrt(r) for r, c in self._terms))

    def floor(self) -> int:
        """Greatest integer not exceeding the value."""
        if self.is_rational():
            return math.floor(self.rational_part())
        k = math.floor(_approx_fraction(self._terms))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def ceil(self) -> int:
        return -((-self).floor())

    # -- display ---------------------------------------------------------

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for r, c in self._terms:
            if r == 1:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"sqrt{r}")
            elif c == -1:
                parts.append(f"-sqrt{r}")
            else:
                parts.append(f"{c}*sqrt{r}")
        return "+".join(parts).replace("+-", "-")

    def __reduce__(self):
        return (Scalar, (dict(self._terms),))


def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return n


def _approx_fraction(terms) -> Fraction:
    bits = INITIAL_PRECISION
    acc = Fraction(0)
    for r, c in terms:
        acc += c * Fraction(math.isqrt(r << (2 * bits)), 1 << bits)
    return acc


def _refined_sign(terms) -> int:
    """Sign of a nonzero sum by dyadic enclosure of each square root."""
    bits = INITIAL_PRECISION
    cap = _precision_cap()
    while bits <= cap:
        lo = Fraction(0)
        hi = Fraction(0)
        scale = 1 << bits
        for r, c in terms:
            if r == 1:
                lo += c
                hi += c
                continue
            s = math.isqrt(r << (2 * bits))  # floor(sqrt(r) * 2^bits)
            a = Fraction(s, scale)
            b = Fraction(s + 1, scale)
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    raise PrecisionCapExceeded(f"sign undecided after {cap} bits")


SQRT2 = Scalar.sqrt(2)
TAU = Scalar({1: Fraction(-1, 2), 5: Fraction(1, 2)})


# -- text and JSON formats ----------------------------------------------------

_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:/\d+)?)\s*\*?\s*)?
        (?:(?P<sqrt>sqrt\s*\(?\s*(?P<rad>\d+)\s*\)?)|(?P<tau>tau))?
        (?:\s*/\s*(?P<div>\d+))?\s*""",
    re.VERBOSE,
)


def compare(a, b) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    return Scalar(a)._cmp(b)


def parse_scalar(text) -> Scalar:
    """Parse ``"3/4"``, ``"2*sqrt2 - 1"``, ``"-1/2+1/2*sqrt(5)"``, ``"tau"`` or JSON."""
    if isinstance(text, Scalar):
        return text
    if isinstance(text, (int, Fraction)):
        return Scalar(text)
    if isinstance(text, Mapping):
        return scalar_from_json(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse scalar from {text!r}")
    s = text.strip()
    if not s:
        raise ValueError("empty scalar")
    pos = 0
    total = Scalar(0)
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or not (m.group("coef") or m.group("sqrt") or m.group("tau")):
            raise ValueError(f"cannot parse scalar {text!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("div"):
            coef /= int(m.group("div"))
        if m.group("sqrt"):
            term = Scalar.sqrt(int(m.group("rad")), sign * coef)
        elif m.group("tau"):
            term = TAU * (sign * coef)
        else:
            term = Scalar(sign * coef)
        total = total + term
        pos = m.end()
    return total


def scalar_to_json(x: Scalar) -> dict:
    x = Scalar(x)
    return {
        "terms": [
            {"rad": r, "num": c.numerator, "den": c.denominator} for r, c in x._terms
        ]
    }


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, Scalar):
        return obj
    if isinstance(obj, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(obj, (int, str)):
        return parse_scalar(obj) if isinstance(obj, str) else Scalar(obj)
    if isinstance(obj, Mapping) and "terms" in obj:
        return Scalar({t["rad"]: Fraction(t["num"], t.get("den", 1)) for t in obj["terms"]})
    raise ValueError(f"bad scalar encoding {obj!r}")


# -- coefficient groups -------------------------------------------------------


@dataclass(frozen=True)
class CoefficientGroup:
    """Additive subgroup of R spanned by ``basis`` (first entry 1).

    ``ring`` selects the coefficients: ``None`` for the Q-span, an integer
    ``d >= 2`` for the Z[1/d]-span and ``1`` for the plain Z-span.
    """

    basis: tuple[Scalar, ...]
    label: str = ""
    ring: int | None = None

    def __post_init__(self):
        basis = tuple(Scalar(b) if not isinstance(b, Scalar) else b for b in self.basis)
        object.__setattr__(self, "basis", basis)
        if not basis or basis[0] != 1:
            raise ValueError("coefficient group basis must start with 1")
        if self.ring is not None and self.ring < 1:
            raise ValueError("ring must be None, 1, or an integer d >= 2")
        if self._elimination is None:
            raise ValueError(f"basis {list(map(str, basis))} is not Q-linearly independent")

    # constructors

    @classmethod
    def rationals(cls) -> "CoefficientGroup":
        return cls((Scalar(1),), "Q")

    @classmethod
    def q_span(cls, *basis, label: str = "") -> "CoefficientGroup":
        basis = tuple(parse_scalar(b) for b in basis)
        return cls(basis, label or "Q<" + ",".join(map(str, basis)) + ">")

    @classmethod
    def localization(cls, d: int, *extra, label: str = "") -> "CoefficientGroup":
        basis = (Scalar(1),) + tuple(parse_scalar(b) for b in extra)
        name = f"Z[1/{d}]" if not extra else f"Z[1/{d}]<" + ",".join(map(str, basis)) + ">"
        return cls(basis, label or name, ring=d)

    @classmethod
    def lattice(cls, *basis, label: str = "") -> "CoefficientGroup":
        basis = tuple(parse_scalar(b) for b in basis)
        return cls(basis, label or "Z<" + ",".join(map(str, basis)) + ">", ring=1)

    @classmethod
    def z_tau(cls) -> "CoefficientGroup":
        return cls((Scalar(1), TAU), "Z[tau]", ring=1)

    @property
    def dim(self) -> int:
        return len(self.basis)

    # linear algebra

    @cached_property
    def _radicands(self) -> tuple[int, ...]:
        rads = set()
        for b in self.basis:
            rads.update(b.radicands)
        return tuple(sorted(rads))

    @cached_property
    def _elimination(self):
        """Row-reduce the radicand-by-basis matrix; ``None`` if rank-deficient."""
        rads = self._radicands
        cols = [b.terms for b in self.basis]
        rows = [[cols[j].get(r, Fraction(0)) for j in range(len(cols))] for r in rads]
        return _rref_pivots(rows, len(cols))

    def coordinates(self, x: Scalar) -> tuple[Fraction, ...] | None:
        x = Scalar(x)
        rads = self._radicands
        xt = x.terms
        if any(r not in rads for r in xt):
            return None
        rhs = [xt.get(r, Fraction(0)) for r in rads]
        transform, pivots, nrows = self._elimination
        # apply stored row operations to the right-hand side
        b = [sum((transform[i][k] * rhs[k] for k in range(nrows)), Fraction(0)) for i in range(nrows)]
        n = self.dim
        sol = [Fraction(0)] * n
        for i, col in enumerate(pivots):
            sol[col] = b[i]
        if any(b[i] != 0 for i in range(len(pivots), nrows)):
            return None
        return tuple(sol)

    def contains(self, x: Scalar) -> bool:
        coords = self.coordinates(x)
        if coords is None:
            return False
        if self.ring is None:
            return True
        return all(_denominator_ok(c.denominator, self.ring) for c in coords)

    def element(self, coords: Sequence) -> Scalar:
        total = Scalar(0)
        for c, b in zip(coords, self.basis):
            total = total + b * _as_fraction(c)
        return total

    def is_dense(self) -> bool:
        if self.ring is None or self.ring >= 2:
            return True
        return self.dim >= 2

    def is_ring(self) -> bool:
        """Whether the group is closed under multiplication."""
        return all(self.contains(a * b) for a in self.basis for b in self.basis)

    def to_json(self) -> dict:
        out = {"basis": [scalar_to_json(b) for b in self.basis], "label": self.label}
        if self.ring is not None:
            out["ring"] = self.ring
        return out

    @classmethod
    def from_json(cls, obj) -> "CoefficientGroup":
        basis = tuple(scalar_from_json(b) for b in obj["basis"])
        return cls(basis, obj.get("label", ""), obj.get("ring"))

    def __str__(self):
        return self.label or repr(self)


def _denominator_ok(den: int, d: int) -> bool:
    if d == 1:
        return den == 1
    g = math.gcd(den, d)
    while g > 1:
        while den % g == 0:
            den //= g
        g = math.gcd(den, d)
    return den == 1


def _rref_pivots(rows: list[list[Fraction]], ncols: int):
    """Gauss-Jordan elimination tracking the row transform.

    Returns ``(transform, pivot_columns, nrows)`` or ``None`` when the columns
    are dependent.
    """
    m = len(rows)
    a = [list(r) for r in rows]
    t = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            return None
        a[r], a[p] = a[p], a[r]
        t[r], t[p] = t[p], t[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        t[r] = [v * inv for v in t[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
                t[i] = [vi - f * vr for vi, vr in zip(t[i], t[r])]
        pivots.append(c)
        r += 1
    return t, pivots, m


def linearize(x: Scalar, group: CoefficientGroup) -> tuple[Fraction, ...] | None:
    """Rational coordinates of ``x`` in the Q-span of ``group.basis``, or None."""
    return group.coordinates(x)
