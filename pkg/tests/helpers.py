"""Shared test utilities: independent oracles and config sampling.

The vertex oracle here deliberately avoids the implementation path in
``bcdof.regions`` (Gaussian elimination): systems are solved by Cramer's
rule with Laplace-expansion determinants, and feasibility is evaluated
with direct Fraction arithmetic.
"""

import itertools
import random
from fractions import Fraction

from bcdof.config import validate_config
from bcdof.regions import DoFRegion


def laplace_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = Fraction(0)
    sign = Fraction(1)
    for col in range(n):
        if m[0][col] != 0:
            minor = [row[:col] + row[col + 1 :] for row in m[1:]]
            total += sign * m[0][col] * laplace_det(minor)
        sign = -sign
    return total


def cramer_solve(rows, rhs):
    n = len(rows)
    d = laplace_det(rows)
    if d == 0:
        return None
    out = []
    for j in range(n):
        col_swapped = [row[:j] + [rhs[i]] + row[j + 1 :] for i, row in enumerate(rows)]
        out.append(laplace_det(col_swapped) / d)
    return tuple(out)


def oracle_vertices(region: DoFRegion):
    """Basis-enumeration vertex oracle via Cramer's rule."""
    K = region.K
    constraints = [(list(h.a), Fraction(1)) for h in region.halfspaces]
    for i in range(K):
        row = [Fraction(0)] * K
        row[i] = Fraction(1)
        constraints.append((row, Fraction(0)))
    verts = set()
    for combo in itertools.combinations(range(len(constraints)), K):
        rows = [constraints[c][0] for c in combo]
        rhs = [constraints[c][1] for c in combo]
        pt = cramer_solve(rows, rhs)
        if pt is None or any(x < 0 for x in pt):
            continue
        feasible = all(
            sum(a * x for a, x in zip(h.a, pt)) <= 1 for h in region.halfspaces
        )
        if feasible:
            verts.add(pt)
    return verts


def random_config(rnd: random.Random, kmin=2, kmax=5, max_antennas=6):
    k = rnd.randint(kmin, kmax)
    return validate_config(
        rnd.randint(1, max_antennas),
        [rnd.randint(1, max_antennas) for _ in range(k)],
    )


def all_small_configs(max_k=3, max_antennas=4):
    """Every config with K <= max_k and all antenna counts <= max_antennas."""
    out = []
    for m in range(1, max_antennas + 1):
        for k in range(2, max_k + 1):
            for ns in itertools.combinations_with_replacement(
                range(1, max_antennas + 1), k
            ):
                out.append(validate_config(m, list(ns)))
    return out
