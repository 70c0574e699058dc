"""Exact rational polytope engine for order-(K-1) DoF regions.

A region is a finite set of halfspaces ``a . d <= 1`` with nonnegative
rational coefficients, intersected with the nonnegative orthant.  Three
builders produce the regions of interest:

* :func:`no_csit_region` -- the single-inequality region valid without
  transmitter CSI,
* :func:`delayed_csit_region` -- the K-inequality region valid with
  delayed CSI,
* :func:`raw_outer_region` -- the K(K-1)-inequality outer bound obtained
  by permuting receiver indexes, before redundancy elimination.

Every operation is pure and exact; no floating point enters this module.

Corner points of the no-CSIT region (the axis points ``min(M, N2)`` for
the first coordinate and ``min(M, N1)`` for the others) are achievable
by plain time sharing, so no transmission machinery exists for them;
:func:`vertices` reads them off the polytope directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from bcdof.config import AntennaConfig

DoFPoint = tuple[Fraction, ...]

#: complexity guard for exhaustive basis enumeration
MAX_VERTEX_DIMENSION = 8


@dataclass(frozen=True)
class HalfSpace:
    """One inequality ``sum_i a_i * d_i <= 1`` with ``a_i >= 0``."""

    a: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(x) for x in self.a)
        object.__setattr__(self, "a", coeffs)
        if any(x < 0 for x in coeffs):
            raise ValueError(f"halfspace coefficients must be nonnegative: {coeffs}")
        if all(x == 0 for x in coeffs):
            raise ValueError("halfspace needs at least one positive coefficient")

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * Fraction(x) for c, x in zip(self.a, point)), Fraction(0))

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        return self.evaluate(point) <= 1

    def __str__(self) -> str:
        from bcdof.rationals import format_rational

        terms = [
            f"{format_rational(c)}*d[-{i + 1}]" for i, c in enumerate(self.a) if c != 0
        ]
        return " + ".join(terms) + " <= 1"


@dataclass(frozen=True)
class DoFRegion:
    """Bounded intersection of halfspaces with the nonnegative orthant."""

    K: int
    halfspaces: tuple[HalfSpace, ...]

    def __post_init__(self):
        seen = []
        for h in self.halfspaces:
            if len(h.a) != self.K:
                raise ValueError(f"halfspace dimension {len(h.a)} != region dimension {self.K}")
            if h not in seen:
                seen.append(h)
        hs = tuple(sorted(seen, key=lambda h: h.a))
        object.__setattr__(self, "halfspaces", hs)
        for i in range(self.K):
            if not any(h.a[i] > 0 for h in hs):
                raise ValueError(f"coordinate {i} is unbounded: no halfspace covers it")

    def to_json_dict(self) -> dict:
        return {
            "K": self.K,
            "halfspaces": [
                [[c.numerator, c.denominator] for c in h.a] for h in self.halfspaces
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DoFRegion":
        hs = tuple(
            HalfSpace(tuple(Fraction(num, den) for num, den in row))
            for row in data["halfspaces"]
        )
        return cls(K=int(data["K"]), halfspaces=hs)


# ---------------------------------------------------------------------------
# region builders
# ---------------------------------------------------------------------------


def no_csit_region(cfg: AntennaConfig) -> DoFRegion:
    """DoF region without transmitter CSI: a single inequality.

    sum_{i>=2} d_{-i} / min(M, N1)  +  d_{-1} / min(M, N2)  <=  1
    """
    M, N, K = cfg.M, cfg.N, cfg.K
    a = [Fraction(0)] * K
    a[0] = Fraction(1, min(M, N[1]))
    for i in range(1, K):
        a[i] = Fraction(1, min(M, N[0]))
    return DoFRegion(K=K, halfspaces=(HalfSpace(tuple(a)),))


def delayed_csit_region(cfg: AntennaConfig) -> DoFRegion:
    """DoF region with delayed transmitter CSI: K inequalities.

    Receiver 1's inequality pairs the weakest receiver with the second
    weakest; receiver j >= 2 pairs with the weakest.  Duplicates (which
    appear when mins collapse) are merged by the region constructor.
    """
    M, N, K = cfg.M, cfg.N, cfg.K
    hs = []
    a = [Fraction(0)] * K
    a[0] = Fraction(1, min(M, N[0] + N[1]))
    for i in range(1, K):
        a[i] = Fraction(1, min(M, N[0]))
    hs.append(HalfSpace(tuple(a)))
    for j in range(1, K):
        a = [Fraction(0)] * K
        for i in range(K):
            if i == j:
                a[i] = Fraction(1, min(M, N[0] + N[j]))
            else:
                a[i] = Fraction(1, min(M, N[j]))
        hs.append(HalfSpace(tuple(a)))
    return DoFRegion(K=K, halfspaces=tuple(hs))


def raw_outer_region(cfg: AntennaConfig) -> DoFRegion:
    """Outer bound from exhaustively permuting receiver indexes.

    For each observing receiver j and each partner i != j:

        sum_{k != j} d_{-k} / min(M, Nj)  +  d_{-j} / min(M, Nj + Ni)  <= 1

    K(K-1) inequalities before duplicate merging.
    """
    M, N, K = cfg.M, cfg.N, cfg.K
    hs = []
    for j in range(K):
        for i in range(K):
            if i == j:
                continue
            a = [Fraction(0)] * K
            for k in range(K):
                if k == j:
                    a[k] = Fraction(1, min(M, N[j] + N[i]))
                else:
                    a[k] = Fraction(1, min(M, N[j]))
            hs.append(HalfSpace(tuple(a)))
    return DoFRegion(K=K, halfspaces=tuple(hs))


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------


def _solve_square(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Solve an n x n rational system; None if singular."""
    n = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[i][n] for i in range(n))


def _simplex_max(halfspaces: Sequence[HalfSpace], objective: Sequence[Fraction]):
    """Maximize ``objective . d`` over {d >= 0, a_i . d <= 1} exactly.

    Primal simplex with Bland's rule on the slack-variable tableau.
    Returns ``(value, point)`` or ``(None, direction)`` when unbounded.
    """
    m = len(halfspaces)
    n = len(objective)
    if m == 0:
        # whole orthant: bounded only if the objective is identically zero
        if all(c <= 0 for c in objective):
            return Fraction(0), tuple(Fraction(0) for _ in range(n))
        return None, None
    # tableau rows: m constraint rows over n structural + m slack columns
    T = [[Fraction(0)] * (n + m + 1) for _ in range(m)]
    for i, h in enumerate(halfspaces):
        for j in range(n):
            T[i][j] = Fraction(h.a[j])
        T[i][n + i] = Fraction(1)
        T[i][n + m] = Fraction(1)  # rhs
    cost = [Fraction(c) for c in objective] + [Fraction(0)] * m + [Fraction(0)]
    basis = list(range(n, n + m))
    while True:
        enter = None
        for j in range(n + m):
            if cost[j] > 0:
                enter = j  # Bland: first improving column
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][n + m] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return None, None  # objective unbounded above
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, T[leave])]
        basis[leave] = enter
    point = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            point[b] = T[i][n + m]
    value = sum((Fraction(c) * point[j] for j, c in enumerate(objective)), Fraction(0))
    return value, tuple(point)


# ---------------------------------------------------------------------------
# interrogation
# ---------------------------------------------------------------------------


def contains(region: DoFRegion, point: Sequence[Fraction]) -> bool:
    """Exact membership: nonnegative and every halfspace satisfied."""
    if len(point) != region.K:
        raise ValueError(f"point dimension {len(point)} != region dimension {region.K}")
    pt = tuple(Fraction(x) for x in point)
    if any(x < 0 for x in pt):
        return False
    return all(h.satisfied_by(pt) for h in region.halfspaces)


def vertices(region: DoFRegion) -> set[DoFPoint]:
    """All extreme points by exhaustive K-subset basis solving.

    Every vertex is the unique solution of K active constraints drawn
    from the halfspaces (as equalities) and the coordinate planes.
    Singular subsets define no vertex and are skipped.
    """
    K = region.K
    if K > MAX_VERTEX_DIMENSION:
        raise ValueError(f"vertex enumeration guarded at K <= {MAX_VERTEX_DIMENSION}, got {K}")
    constraints: list[tuple[list[Fraction], Fraction]] = []
    for h in region.halfspaces:
        constraints.append(([Fraction(c) for c in h.a], Fraction(1)))
    for i in range(K):
        row = [Fraction(0)] * K
        row[i] = Fraction(1)
        constraints.append((row, Fraction(0)))
    found: set[DoFPoint] = set()
    for combo in itertools.combinations(range(len(constraints)), K):
        rows = [constraints[c][0] for c in combo]
        rhs = [constraints[c][1] for c in combo]
        pt = _solve_square(rows, rhs)
        if pt is None:
            continue
        if any(x < 0 for x in pt):
            continue
        if all(h.satisfied_by(pt) for h in region.halfspaces):
            found.add(pt)
    return found


def is_subset(region_a: DoFRegion, region_b: DoFRegion) -> bool:
    """True iff every vertex of ``region_a`` satisfies ``region_b``.

    Valid because both regions are convex, bounded subsets of the
    nonnegative orthant.
    """
    if region_a.K != region_b.K:
        raise ValueError("regions have different dimensions")
    return all(
        all(h.satisfied_by(v) for h in region_b.halfspaces) for v in vertices(region_a)
    )


def regions_equal(region_a: DoFRegion, region_b: DoFRegion) -> bool:
    """Point-set equality via mutual inclusion."""
    if region_a.halfspaces == region_b.halfspaces:
        return True
    return is_subset(region_a, region_b) and is_subset(region_b, region_a)


def remove_redundant(region: DoFRegion) -> DoFRegion:
    """Minimal halfspace set defining the same point set.

    A halfspace is kept iff deleting it strictly enlarges the region,
    certified either by a vertex of the relaxed region that violates it
    (the simplex optimum) or by a recession direction of the relaxed
    region along which the inequality grows without bound.
    """
    kept = list(region.halfspaces)
    changed = True
    while changed:
        changed = False
        for idx, h in enumerate(kept):
            rest = kept[:idx] + kept[idx + 1 :]
            value, _ = _simplex_max(rest, h.a)
            if value is None:  # unbounded: removal opens the region
                continue
            if value <= 1:
                kept.pop(idx)
                changed = True
                break
    return DoFRegion(K=region.K, halfspaces=tuple(kept))


def max_sum_dof(region: DoFRegion) -> Fraction:
    """Largest coordinate sum over the region (attained at a vertex)."""
    return max(sum(v, Fraction(0)) for v in vertices(region))


def symmetric_sum_dof(M: int, N: int, K: int, mode: str) -> Fraction:
    """Sum-DoF of the strictly positive corner for N1 = ... = NK = N.

    ``mode='nocsit'``  : min(M, N)
    ``mode='delayed'`` : K / ((K-1)/min(M, N) + 1/min(M, 2N))
    """
    if M < 1 or N < 1 or K < 2:
        raise ValueError(f"need M >= 1, N >= 1, K >= 2; got {(M, N, K)}")
    if mode == "nocsit":
        return Fraction(min(M, N))
    if mode == "delayed":
        return K / (Fraction(K - 1, min(M, N)) + Fraction(1, min(M, 2 * N)))
    raise ValueError(f"unknown mode {mode!r}; expected 'nocsit' or 'delayed'")
