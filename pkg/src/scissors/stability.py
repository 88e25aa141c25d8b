"""Destabilisation complexes of finite models and their integral homology.

A vertex is an embedding of X into B (an injection of cells or points); a set
of vertices spans a simplex when the embeddings have pairwise disjoint images.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .ktheory import FGAbGroup, GradedAb, invariant_factors

__all__ = [
    "ModelTooLarge",
    "SimplicialComplex",
    "build_destab_complex",
    "complex_homology",
    "connectivity_bound",
    "check_connectivity_bound",
    "symmetric_group_oracle",
    "DEFAULT_VERTEX_CAP",
]

DEFAULT_VERTEX_CAP = 5000
MODELS = ("finite-set", "grid-interval")


class ModelTooLarge(ValueError):
    pass


@dataclass
class SimplicialComplex:
    """Vertices with all simplices listed per dimension as sorted index tuples."""

    vertices: list
    simplices: dict[int, list[tuple[int, ...]]]

    @classmethod
    def from_faces(cls, vertices: Sequence, faces: Sequence[Sequence[int]]) -> "SimplicialComplex":
        """Downward closure of the given faces."""
        seen: set[tuple[int, ...]] = set()
        for f in faces:
            f = tuple(sorted(f))
            for r in range(1, len(f) + 1):
                seen.update(itertools.combinations(f, r))
        for v in range(len(vertices)):
            seen.add((v,))
        by_dim: dict[int, list] = {}
        for s in seen:
            by_dim.setdefault(len(s) - 1, []).append(s)
        return cls(list(vertices), {d: sorted(v) for d, v in sorted(by_dim.items())})

    @property
    def dim(self) -> int:
        return max(self.simplices, default=-1)

    def is_empty(self) -> bool:
        return not self.vertices

    def f_vector(self) -> list[int]:
        return [len(self.simplices.get(d, [])) for d in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector()))

    def boundary(self, p: int) -> tuple[dict, int, int]:
        """Sparse boundary from p-simplices to (p-1)-simplices as ``{col: {row: val}}``.

        For ``p = 0`` the target is the augmentation (one row).
        """
        cols = self.simplices.get(p, [])
        if p == 0:
            return {c: {0: 1} for c in range(len(cols))}, 1, len(cols)
        rows = {s: i for i, s in enumerate(self.simplices.get(p - 1, []))}
        out = {}
        for c, s in enumerate(cols):
            col = {}
            for k in range(len(s)):
                col[rows[s[:k] + s[k + 1:]]] = (-1) ** k
            out[c] = col
        return out, len(rows), len(cols)

    def is_closed(self) -> bool:
        for d in range(1, self.dim + 1):
            lower = set(self.simplices.get(d - 1, []))
            for s in self.simplices[d]:
                if any(s[:k] + s[k + 1:] not in lower for k in range(len(s))):
                    return False
        return True


# -- sparse elimination ------------------------------------------------------------------


def _sparse_invariants(cols: dict, nrows: int) -> tuple[int, list[int]]:
    """Rank and nontrivial invariant factors of a sparse integer matrix.

    Unit pivots are eliminated first (these never change the invariant
    factors); whatever is left goes through a dense Smith form.
    """
    cols = {c: dict(v) for c, v in cols.items() if v}
    rows: dict[int, set] = {}
    for c, col in cols.items():
        for r in col:
            rows.setdefault(r, set()).add(c)
    rank = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda c: len(cols[c])):
            col = cols.get(c)
            if not col:
                continue
            units = [r for r, v in col.items() if v in (1, -1)]
            if not units:
                continue
            r = min(units, key=lambda r: len(rows[r]))
            pv = col[r]
            # clear row r from the other columns using column c
            for c2 in list(rows[r]):
                if c2 == c:
                    continue
                col2 = cols[c2]
                f = col2[r] * pv  # pv = +-1 so pv^-1 = pv
                for rr, v in col.items():
                    nv = col2.get(rr, 0) - f * v
                    if nv:
                        if rr not in col2:
                            rows.setdefault(rr, set()).add(c2)
                        col2[rr] = nv
                    elif rr in col2:
                        del col2[rr]
                        rows[rr].discard(c2)
            # column c now only matters through row r; drop both
            for rr in col:
                rows[rr].discard(c)
            del cols[c]
            rows.pop(r, None)
            rank += 1
            progress = True
    cols = {c: col for c, col in cols.items() if col}
    if not cols:
        return rank, []
    rest_rows = sorted({r for col in cols.values() for r in col})
    ridx = {r: i for i, r in enumerate(rest_rows)}
    dense = [[0] * len(cols) for _ in rest_rows]
    for j, col in enumerate(cols.values()):
        for r, v in col.items():
            dense[ridx[r]][j] = v
    diag = invariant_factors(dense)
    return rank + len(diag), [d for d in diag if d > 1]


def complex_homology(K: SimplicialComplex) -> tuple[GradedAb, int | None]:
    """Reduced integral homology and homological connectivity.

    Connectivity is the largest ``c`` with vanishing reduced homology in
    degrees ``<= c``; ``None`` when all reduced homology vanishes; ``-2`` for
    the empty complex.
    """
    if K.is_empty():
        # reduced homology of the empty complex: Z in degree -1
        return GradedAb({-1: FGAbGroup.free(1)}), -2
    top = K.dim
    ranks, tors = {}, {}
    for p in range(0, top + 1):
        cols, nrows, _ = K.boundary(p)
        ranks[p], tors[p] = _sparse_invariants(cols, nrows)
    groups = {}
    for p in range(0, top + 1):
        n_p = len(K.simplices.get(p, []))
        free = n_p - ranks[p] - ranks.get(p + 1, 0)
        groups[p] = FGAbGroup(free, tuple(tors.get(p + 1, [])))
    H = GradedAb(groups)
    if H.is_zero():
        return H, None
    return H, min(H.degrees()) - 1


# -- destabilisation complexes ---------------------------------------------------------------


def _injections(x: int, b: int):
    return list(itertools.permutations(range(b), x))


def build_destab_complex(X: int, B: int, model: str = "finite-set",
                         vertex_cap: int = DEFAULT_VERTEX_CAP) -> SimplicialComplex:
    """Complex of pairwise disjoint embeddings of ``X`` cells into ``B`` cells.

    In both models an embedding is an injection of cells (points for the
    finite-set model, unit cells of a ``(1/m)Z`` grid for the grid-interval
    model), so both enumerate ordered injections ``{0..X-1} -> {0..B-1}``.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    if X < 1 or B < 0:
        raise ValueError("need X >= 1 and B >= 0")
    nverts = math.perm(B, X) if X <= B else 0
    if nverts > vertex_cap:
        raise ModelTooLarge(f"{nverts} vertices exceeds the cap of {vertex_cap}")
    verts = _injections(X, B) if X <= B else []
    masks = [sum(1 << c for c in v) for v in verts]
    simplices: dict[int, list[tuple[int, ...]]] = {}
    if verts:
        simplices[0] = [(i,) for i in range(len(verts))]
    # later vertices disjoint from each vertex
    later = [[j for j in range(i + 1, len(verts)) if not masks[i] & masks[j]] for i in range(len(verts))]
    level = [((i,), masks[i], later[i]) for i in range(len(verts))]
    d = 0
    while level:
        nxt = []
        for simplex, mask, cands in level:
            for j in cands:
                if mask & masks[j]:
                    continue
                rest = [c for c in cands if c > j and not masks[c] & masks[j]]
                nxt.append((simplex + (j,), mask | masks[j], rest))
        d += 1
        if nxt:
            simplices[d] = sorted(s for s, _, _ in nxt)
        level = nxt
    return SimplicialComplex(verts, simplices)


def connectivity_bound(k: int) -> int:
    return (k - 3) // 2


def check_connectivity_bound(X: int, B: int, model: str = "finite-set",
                             vertex_cap: int = DEFAULT_VERTEX_CAP) -> dict:
    """Compare measured homological connectivity with ``floor((k-3)/2)``."""
    k = B // X
    bound = connectivity_bound(k)
    report = {"model": model, "X": X, "B": B, "k": k, "bound": bound}
    if k <= 1:
        # no two embeddings are disjoint: a discrete set of perm(B, X) points
        n = math.perm(B, X) if X <= B else 0
        measured = -2 if n == 0 else (-1 if n > 1 else None)
        report.update(vertices=n, faces=[n], homology=None, method="discrete")
    else:
        K = build_destab_complex(X, B, model, vertex_cap)
        H, measured = complex_homology(K)
        report.update(vertices=len(K.vertices), faces=K.f_vector(), homology=H.to_json(),
                      method="homological")
    report["connectivity"] = measured
    report["acyclic"] = measured is None
    report["holds"] = measured is None or measured >= bound
    report["margin"] = None if measured is None else measured - bound
    return report


# -- symmetric group oracle ----------------------------------------------------------------


def symmetric_group_oracle(n: int, seed: int = 0) -> dict:
    """Multiplication table of span automorphisms of an n-point set versus S_n."""
    from .assembler import FiniteSetAssembler

    A = FiniteSetAssembler(n)
    rng = random.Random(seed)
    ground = sorted(A.ground())
    perms = list(itertools.permutations(ground))
    spans = [A.span_from_bijection(dict(zip(ground, p)), rng) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    mismatches = []
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            comp = A.compose(spans[i], spans[j])
            if not comp.is_valid():
                mismatches.append((i, j, "invalid"))
                continue
            image = comp.bijection()
            got = tuple(image[x] for x in ground)
            # p then q
            want = tuple(q[p[x - 1] - 1] for x in ground)
            if got != want or index.get(got) is None:
                mismatches.append((i, j, got))
    distinct = len({s for s in spans})
    return {
        "n": n,
        "order": len(perms),
        "expected_order": math.factorial(n),
        "distinct_elements": distinct,
        "table_size": len(perms) ** 2,
        "mismatches": len(mismatches),
        "ok": not mismatches and distinct == math.factorial(n),
    }
