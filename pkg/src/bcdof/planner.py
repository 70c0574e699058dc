"""Translate a target DoF point into concrete two-phase scheme parameters.

Phase-I sends each order-(K-1) message over its own sub-phase with a
fixed antenna count; Phase-II retransmits reconstructed interference as
order-K symbols.  The planner inverts the achieved-DoF relation
``d_{-i} = T_i * Q_i / beta`` exactly over the rationals and scales to
integer slot counts, then verifies the per-receiver decoding condition

    sum_{i != j} T_i * max(Q_i - N_j, 0)  <=  T2 * N_j

(deficit terms clamped at zero: surplus equations about one message
cannot stand in for another), the Phase-II symbol budget, and exact
deliverability of the order-K vector under the deterministic schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from bcdof.config import AntennaConfig
from bcdof.delivery import deliverable, per_slot_quota
from bcdof.regions import DoFPoint, HalfSpace, contains, delayed_csit_region


class RegimeError(ValueError):
    """The transmission scheme requires N2 < M; use time sharing otherwise."""


class TargetOutsideRegionError(ValueError):
    """Target DoF point violates the delayed-CSIT region."""

    def __init__(self, halfspace: HalfSpace, target):
        self.halfspace = halfspace
        self.target = tuple(target)
        super().__init__(f"target {self.target} violates {halfspace}")


class InfeasiblePlanError(ValueError):
    """Plan fails the decoding condition, budget, or delivery check."""


@dataclass(frozen=True)
class SchemePlan:
    """Integer parameters that fully determine a transmission run.

    Q     : Phase-I transmit antenna counts per sub-phase
    T     : sub-phase durations (slots)
    T2    : Phase-II duration (slots)
    B     : Phase-II active antennas
    trunc : retained rows of each reconstructed interference block
    """

    Q: tuple[int, ...]
    T: tuple[int, ...]
    T2: int
    B: int
    trunc: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "Q", tuple(int(q) for q in self.Q))
        object.__setattr__(self, "T", tuple(int(t) for t in self.T))
        object.__setattr__(self, "trunc", tuple(int(x) for x in self.trunc))
        if not (len(self.Q) == len(self.T) == len(self.trunc)):
            raise ValueError("Q, T and trunc must have equal length")
        if any(q < 1 for q in self.Q):
            raise ValueError(f"antenna counts must be positive: {self.Q}")
        if any(t < 0 for t in self.T) or self.T2 < 0:
            raise ValueError("slot counts must be nonnegative")
        if self.B < 1:
            raise ValueError(f"Phase-II antenna count must be positive: {self.B}")
        if any(x < 0 for x in self.trunc):
            raise ValueError("truncation lengths must be nonnegative")

    @property
    def K(self) -> int:
        return len(self.Q)

    @property
    def beta(self) -> int:
        """Total slots spanned by both phases."""
        return sum(self.T) + self.T2

    def scaled(self, factor: int) -> "SchemePlan":
        """Stretch all durations by a positive integer factor."""
        if factor < 1:
            raise ValueError("scale factor must be a positive integer")
        return SchemePlan(
            Q=self.Q,
            T=tuple(t * factor for t in self.T),
            T2=self.T2 * factor,
            B=self.B,
            trunc=tuple(x * factor for x in self.trunc),
        )

    def to_json_dict(self) -> dict:
        return {
            "Q": list(self.Q),
            "T": list(self.T),
            "T2": self.T2,
            "B": self.B,
            "trunc": list(self.trunc),
            "beta": self.beta,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SchemePlan":
        plan = cls(
            Q=tuple(data["Q"]),
            T=tuple(data["T"]),
            T2=int(data["T2"]),
            B=int(data["B"]),
            trunc=tuple(data["trunc"]),
        )
        if "beta" in data and int(data["beta"]) != plan.beta:
            raise ValueError(f"inconsistent beta: {data['beta']} != {plan.beta}")
        return plan


def antenna_counts(cfg: AntennaConfig) -> tuple[int, ...]:
    """Phase-I antenna counts: pair each message's sender count with the
    weakest receivers that want it.

    Q_1 = min(M, N1 + N2);  Q_j = min(M, N1 + Nj) for j >= 2.
    Requires N2 < M so that every Q exceeds N1 and Phase-I symbols stay
    undecodable on their own.
    """
    M, N = cfg.M, cfg.N
    if N[1] >= M:
        raise RegimeError(
            f"scheme needs N2 < M (got N2={N[1]}, M={M}); "
            "delayed CSIT adds nothing here, use time sharing"
        )
    q = [min(M, N[0] + N[1])]
    for j in range(1, cfg.K):
        q.append(min(M, N[0] + N[j]))
    return tuple(q)


def phase2_antennas(cfg: AntennaConfig) -> int:
    """Largest receiver antenna count not exceeding M."""
    if cfg.M < cfg.N[0]:
        raise RegimeError(
            f"Phase-II antenna rule undefined for M < N1 (M={cfg.M}, N1={cfg.N[0]})"
        )
    return max(n for n in cfg.N if n <= cfg.M)


def truncation_lengths(cfg: AntennaConfig, Q: Sequence[int],
                       Tslots: Sequence[int]) -> tuple[int, ...]:
    """Retained rows per reconstructed block: the worst-case receiver
    deficit for that message.

    len_1 = T_1 * max(Q_1 - N2, 0); len_j = T_j * max(Q_j - N1, 0).
    Rows are drawn evenly from every slot of the sub-phase (see
    :mod:`bcdof.delivery`), so each slot contributes its own deficit.
    """
    return tuple(
        Tslots[j] * per_slot_quota(cfg.N, Q, j) for j in range(cfg.K)
    )


def decoding_slacks(cfg: AntennaConfig, plan: SchemePlan) -> list[tuple[int, int]]:
    """Per-receiver (lhs, rhs) of the clamped decoding condition."""
    out = []
    for j in range(cfg.K):
        lhs = sum(
            plan.T[i] * max(plan.Q[i] - cfg.N[j], 0)
            for i in range(cfg.K)
            if i != j
        )
        out.append((lhs, plan.T2 * cfg.N[j]))
    return out


def phase2_budget(plan: SchemePlan) -> tuple[int, int]:
    """(used, capacity) of Phase-II symbol slots."""
    used = sum(
        max(plan.trunc[p], plan.trunc[p + 1]) for p in range(plan.K - 1)
    )
    return used, plan.B * plan.T2


def decoding_feasible(cfg: AntennaConfig, plan: SchemePlan) -> bool:
    """Decoding condition at every receiver plus the Phase-II budget."""
    if any(lhs > rhs for lhs, rhs in decoding_slacks(cfg, plan)):
        return False
    used, capacity = phase2_budget(plan)
    return used <= capacity


def delivery_feasible(cfg: AntennaConfig, plan: SchemePlan) -> bool:
    """Exact order-K deliverability under the deterministic schedule."""
    _, failures = deliverable(cfg.N, plan.Q, plan.T, plan.trunc, plan.T2, plan.B)
    return not failures


def achieved_dof(plan: SchemePlan) -> DoFPoint:
    """DoF tuple realized by a plan: d_{-i} = T_i * Q_i / beta."""
    beta = plan.beta
    if beta == 0:
        raise ValueError("plan spans zero slots; DoF undefined")
    return tuple(Fraction(plan.T[i] * plan.Q[i], beta) for i in range(plan.K))


def plan_for_target(cfg: AntennaConfig, target: Sequence[Fraction]) -> SchemePlan:
    """Exact integer plan achieving a rational point of the delayed region.

    Solves ``T_i / beta = d_{-i} / Q_i`` over the rationals, normalizes
    so Phase-II fills the remaining fraction of the block, and scales by
    the least common denominator.  The returned plan passes the decoding
    condition, the Phase-II budget, and the delivery check; otherwise an
    :class:`InfeasiblePlanError` names the violated constraint.
    """
    if len(target) != cfg.K:
        raise ValueError(f"target has {len(target)} entries, config has {cfg.K} receivers")
    point = tuple(Fraction(x) for x in target)
    if any(x < 0 for x in point):
        raise ValueError(f"target must be nonnegative: {point}")
    region = delayed_csit_region(cfg)
    for h in region.halfspaces:
        if not h.satisfied_by(point):
            raise TargetOutsideRegionError(h, point)
    Q = antenna_counts(cfg)
    B = phase2_antennas(cfg)
    shares = [point[i] / Q[i] for i in range(cfg.K)]
    rest = 1 - sum(shares)
    assert rest >= 0, "in-region target cannot oversubscribe the block"
    beta = lcm(*(s.denominator for s in shares + [rest]))
    T = tuple(int(s * beta) for s in shares)
    T2 = int(rest * beta)
    trunc = truncation_lengths(cfg, Q, T)
    plan = SchemePlan(Q=Q, T=T, T2=T2, B=B, trunc=trunc)
    for j, (lhs, rhs) in enumerate(decoding_slacks(cfg, plan)):
        if lhs > rhs:
            raise InfeasiblePlanError(
                f"decoding condition fails at receiver {j + 1}: {lhs} > {rhs}"
            )
    used, capacity = phase2_budget(plan)
    if used > capacity:
        raise InfeasiblePlanError(
            f"Phase-II budget exceeded: {used} order-K symbols > B*T2 = {capacity}"
        )
    _, failures = deliverable(cfg.N, plan.Q, plan.T, plan.trunc, plan.T2, plan.B)
    if failures:
        labels = ", ".join(str(j + 1) for j in failures)
        raise InfeasiblePlanError(
            f"order-K delivery schedule cannot serve receiver(s) {labels}"
        )
    return plan
