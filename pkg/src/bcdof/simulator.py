"""Monte-Carlo link simulator for the two-phase delayed-CSIT scheme.

A trial draws i.i.d. complex Gaussian channels, runs Phase-I (one
sub-phase per order-(K-1) message, fresh symbols on the first Q_j
antennas), reconstructs each receiver's interference from the elapsed
channels, recodes the truncated blocks into order-K pair sums, delivers
them over Phase-II, and finally solves, at every receiver, the stacked
linear system of its Phase-I and Phase-II observations.  Decoding
succeeds iff that system has full column rank and the recovered symbols
match the transmitted load.

Noise is off by default: DoF is a high-SNR slope, so decodability of
the noiseless generic system is the certified property.  A noise level
can be injected for qualitative experiments only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from bcdof.config import AntennaConfig
from bcdof.delivery import Schedule, block_row_indices, schedule_entries
from bcdof.planner import (
    InfeasiblePlanError,
    SchemePlan,
    achieved_dof,
    decoding_feasible,
    delivery_feasible,
)

#: relative residual below which a decode counts as exact recovery
RESIDUAL_TOL = 1e-6
#: singular values below this fraction of the largest are treated as zero
RANK_TOL = 1e-9


@dataclass(frozen=True)
class ChannelRealization:
    """All per-slot channel matrices for one trial.

    ``H[i]`` has shape ``(beta, N_i, M)``; slot t of receiver i is
    ``H[i][t]``.  Reproducible from ``seed``.
    """

    seed: int
    H: tuple

    def slot(self, receiver: int, t: int) -> np.ndarray:
        return self.H[receiver][t]


@dataclass(frozen=True)
class SymbolLoad:
    """Per message j, the complex symbol vector of length Q_j * T_j."""

    s: tuple

    def __getitem__(self, j: int) -> np.ndarray:
        return self.s[j]


@dataclass
class Transcript:
    """Everything observed or reconstructed during one run."""

    phase1: dict = field(default_factory=dict)   # (receiver, subphase) -> vector
    blocks: list = field(default_factory=list)   # truncated interference blocks
    x_order_k: np.ndarray | None = None
    schedule: Schedule | None = None
    phase2: dict = field(default_factory=dict)   # receiver -> list of slot vectors
    load: SymbolLoad | None = None


@dataclass(frozen=True)
class ReceiverReport:
    receiver: int          # 1-based canonical index
    success: bool
    residual: float
    rank: int
    unknowns: int
    equations: int


@dataclass(frozen=True)
class TrialReport:
    seed: int
    receivers: tuple[ReceiverReport, ...]
    achieved: tuple[Fraction, ...]
    success: bool


@dataclass(frozen=True)
class MonteCarloSummary:
    trials: int
    successes: int
    worst_residual: float | None
    achieved: tuple[Fraction, ...]
    per_receiver_failures: tuple[int, ...]
    reports: tuple[TrialReport, ...]

    @property
    def success_fraction(self) -> float | None:
        if self.trials == 0:
            return None
        return self.successes / self.trials


# ---------------------------------------------------------------------------
# randomness
# ---------------------------------------------------------------------------


def draw_channels(cfg: AntennaConfig, plan: SchemePlan, seed: int) -> ChannelRealization:
    """i.i.d. circularly-symmetric complex Gaussian channels, unit variance.

    Draw order is slot-major then receiver-major, which fixes the
    realization for a given (cfg, plan, seed).
    """
    rng = np.random.default_rng(seed)
    beta = plan.beta
    per_rx = [[] for _ in range(cfg.K)]
    for _t in range(beta):
        for i in range(cfg.K):
            h = rng.standard_normal((cfg.N[i], cfg.M)) + 1j * rng.standard_normal(
                (cfg.N[i], cfg.M)
            )
            per_rx[i].append(h / np.sqrt(2.0))
    stacked = tuple(np.stack(mats) if mats else np.zeros((0, cfg.N[i], cfg.M))
                    for i, mats in enumerate(per_rx))
    return ChannelRealization(seed=seed, H=stacked)


def draw_load(cfg: AntennaConfig, plan: SchemePlan, seed: int) -> SymbolLoad:
    """Complex Gaussian message symbols matching the plan's dimensions."""
    rng = np.random.default_rng(seed)
    vecs = []
    for j in range(cfg.K):
        n = plan.Q[j] * plan.T[j]
        v = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        vecs.append(v)
    return SymbolLoad(s=tuple(vecs))


# ---------------------------------------------------------------------------
# phase mechanics
# ---------------------------------------------------------------------------


def _subphase_offsets(plan: SchemePlan) -> list[int]:
    offs = [0]
    for t in plan.T:
        offs.append(offs[-1] + t)
    return offs


def _phase1_observation(cfg, plan, channels, load, receiver, subphase) -> np.ndarray:
    """Stacked observation of sub-phase ``subphase`` at ``receiver``.

    Equals the holistic block-diagonal channel (first Q_j antenna
    columns per slot) applied to the message vector.
    """
    j = subphase
    off = _subphase_offsets(plan)[j]
    nj, qj = cfg.N[receiver], plan.Q[j]
    out = np.zeros(nj * plan.T[j], dtype=complex)
    for t in range(plan.T[j]):
        chunk = load[j][t * qj : (t + 1) * qj]
        out[t * nj : (t + 1) * nj] = channels.slot(receiver, off + t)[:, :qj] @ chunk
    return out


def run_phase1(cfg: AntennaConfig, plan: SchemePlan, channels: ChannelRealization,
               load: SymbolLoad) -> Transcript:
    """Transmit every sub-phase; record each receiver's observations."""
    for j in range(cfg.K):
        if len(load[j]) != plan.Q[j] * plan.T[j]:
            raise ValueError(
                f"message {j + 1} has {len(load[j])} symbols, plan wants {plan.Q[j] * plan.T[j]}"
            )
    transcript = Transcript(load=load)
    for j in range(cfg.K):
        if plan.T[j] == 0:
            continue
        for i in range(cfg.K):
            transcript.phase1[(i, j)] = _phase1_observation(cfg, plan, channels, load, i, j)
    return transcript


def reconstruct_interference(cfg: AntennaConfig, plan: SchemePlan,
                             channels: ChannelRealization,
                             load: SymbolLoad) -> list[np.ndarray]:
    """Rebuild, transmitter-side, each receiver's own-interference block.

    Only Phase-I channels are used (they have elapsed by Phase-II, so
    delayed CSIT suffices).  Block j holds the selected rows of receiver
    j's own sub-phase observation, drawn evenly from every slot; it
    matches the receiver's recorded entries through the identical
    arithmetic path.
    """
    blocks = []
    for j in range(cfg.K):
        if plan.T[j] == 0 or plan.trunc[j] == 0:
            blocks.append(np.zeros(0, dtype=complex))
            continue
        own = _phase1_observation(cfg, plan, channels, load, j, j)
        rows = block_row_indices(cfg.N, plan.Q, plan.T, j)
        blocks.append(own[rows])
    return blocks


def build_order_k(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Concatenate zero-padded pairwise sums of adjacent blocks."""
    K = len(blocks)
    if K < 2:
        raise ValueError("need at least two blocks to form order-K symbols")
    parts = []
    for p in range(K - 1):
        span = max(len(blocks[p]), len(blocks[p + 1]))
        left = np.zeros(span, dtype=complex)
        right = np.zeros(span, dtype=complex)
        left[: len(blocks[p])] = blocks[p]
        right[: len(blocks[p + 1])] = blocks[p + 1]
        parts.append(left + right)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def plan_schedule(cfg: AntennaConfig, plan: SchemePlan) -> Schedule:
    """The deterministic slot assignment of the order-K entries."""
    return schedule_entries(cfg.N, plan.Q, plan.T, plan.trunc, plan.T2, plan.B)


def run_phase2(cfg: AntennaConfig, plan: SchemePlan, channels: ChannelRealization,
               x_order_k: np.ndarray, schedule: Schedule | None = None,
               strict: bool = True) -> dict:
    """Deliver the order-K vector over T2 slots on the first B antennas.

    Entries follow the deterministic schedule; each slot carries at most
    B entries, mapped onto antennas in entry order.  With ``strict``,
    entries that exceed the B*T2 budget raise; otherwise they are
    silently dropped (used to exercise under-provisioned plans).
    """
    if schedule is None:
        schedule = plan_schedule(cfg, plan)
    if len(x_order_k) != len(schedule.slot_of):
        raise ValueError(
            f"order-K vector length {len(x_order_k)} does not match schedule "
            f"({len(schedule.slot_of)} entries)"
        )
    if strict and schedule.dropped:
        raise InfeasiblePlanError(
            f"Phase-II budget exceeded: {len(x_order_k)} entries > B*T2 = {plan.B * plan.T2}"
        )
    offset = sum(plan.T)
    slots = schedule.slots(plan.T2)
    obs = {i: [] for i in range(cfg.K)}
    for t in range(plan.T2):
        entries = slots[t]
        xvec = np.zeros(plan.B, dtype=complex)
        for a, e in enumerate(entries):
            xvec[a] = x_order_k[e]
        for i in range(cfg.K):
            obs[i].append(channels.slot(i, offset + t)[:, : plan.B] @ xvec)
    return obs


def backward_forward_cancel(i: int, own_block: np.ndarray,
                            pair_sums: Sequence[np.ndarray],
                            lengths: Sequence[int] | None = None) -> list[np.ndarray]:
    """Recover every block from the pair sums, starting from block ``i``.

    ``pair_sums[p]`` must equal ``pad(block_p) + pad(block_{p+1})`` on
    the padded common length.  The backward pass peels blocks i-1 .. 0,
    the forward pass blocks i+1 .. K-1, each time subtracting the
    running known block from the adjacent pair sum.  Returns all K
    blocks (position ``i`` echoes the input).  ``lengths`` trims each
    recovered block to its true size; otherwise pair lengths are kept.
    """
    K = len(pair_sums) + 1
    if not 0 <= i < K:
        raise ValueError(f"start index {i} out of range for K={K}")
    blocks: list = [None] * K
    blocks[i] = np.asarray(own_block, dtype=complex)

    def padded(vec: np.ndarray, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=complex)
        out[: min(len(vec), n)] = vec[:n]
        return out

    running = blocks[i]
    for j in range(i, 0, -1):
        pair = np.asarray(pair_sums[j - 1], dtype=complex)
        recovered = pair - padded(running, len(pair))
        if lengths is not None:
            recovered = recovered[: lengths[j - 1]]
        blocks[j - 1] = recovered
        running = recovered
    running = blocks[i]
    for j in range(i, K - 1):
        pair = np.asarray(pair_sums[j], dtype=complex)
        recovered = pair - padded(running, len(pair))
        if lengths is not None:
            recovered = recovered[: lengths[j + 1]]
        blocks[j + 1] = recovered
        running = recovered
    return blocks


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def _holistic_row(cfg, plan, channels, subphase, row) -> np.ndarray:
    """One row of the holistic Phase-I matrix of (receiver j, sub-phase j),
    as a vector over that message's Q_j*T_j symbols."""
    j = subphase
    nj, qj = cfg.N[j], plan.Q[j]
    t, r = divmod(row, nj)[0], row % nj
    off = _subphase_offsets(plan)[j]
    out = np.zeros(qj * plan.T[j], dtype=complex)
    out[t * qj : (t + 1) * qj] = channels.slot(j, off + t)[r, :qj]
    return out


def receiver_decode(i: int, cfg: AntennaConfig, plan: SchemePlan,
                    channels: ChannelRealization, transcript: Transcript,
                    tol: float = RESIDUAL_TOL):
    """Joint linear solve of receiver i's Phase-I and Phase-II equations.

    Unknowns are all interfering messages' symbols.  Phase-II rows are
    formed by expressing each delivered order-K entry as a linear
    functional of the unknowns, after exact subtraction of the terms the
    receiver already knows (its own reconstructed block, read off its
    own Phase-I record).  Success requires full column rank and entrywise
    recovery within ``tol`` relative to the load scale.

    Returns ``(recovered, report)`` where ``recovered`` maps message
    index to the recovered symbol vector (empty dict on rank failure).
    """
    msgs = [j for j in range(cfg.K) if j != i and plan.T[j] > 0]
    sizes = {j: plan.Q[j] * plan.T[j] for j in msgs}
    total = sum(sizes.values())
    if total == 0:
        report = ReceiverReport(receiver=i + 1, success=True, residual=0.0,
                                rank=0, unknowns=0, equations=0)
        return {}, report
    col = {}
    c = 0
    for j in msgs:
        col[j] = c
        c += sizes[j]

    rows = []
    rhs = []
    for j in msgs:
        y = transcript.phase1[(i, j)]
        nj, qj = cfg.N[i], plan.Q[j]
        off = _subphase_offsets(plan)[j]
        for t in range(plan.T[j]):
            blockrow = channels.slot(i, off + t)[:, :qj]
            for r in range(nj):
                row = np.zeros(total, dtype=complex)
                row[col[j] + t * qj : col[j] + (t + 1) * qj] = blockrow[r]
                rows.append(row)
                rhs.append(y[t * nj + r])

    # receiver i's own block values, read from its own Phase-I record
    own_rows = (
        block_row_indices(cfg.N, plan.Q, plan.T, i)
        if plan.T[i] > 0 and plan.trunc[i] > 0
        else []
    )
    own_values = (
        transcript.phase1[(i, i)][own_rows] if own_rows else np.zeros(0, dtype=complex)
    )

    schedule = transcript.schedule
    slots = schedule.slots(plan.T2)
    offset = sum(plan.T)
    for t in range(plan.T2):
        entries = slots[t]
        if not entries:
            continue
        z = transcript.phase2[i][t]
        hmat = channels.slot(i, offset + t)[:, : plan.B]
        for r in range(cfg.N[i]):
            row = np.zeros(total, dtype=complex)
            known = 0.0 + 0.0j
            for a, e in enumerate(entries):
                coeff = hmat[r, a]
                for b, fr in schedule.table[e].items():
                    if b == i:
                        known += coeff * own_values[fr]
                    elif plan.T[b] > 0:
                        sel = block_row_indices(cfg.N, plan.Q, plan.T, b)[fr]
                        frow = _holistic_row(cfg, plan, channels, b, sel)
                        row[col[b] : col[b] + sizes[b]] += coeff * frow
            rows.append(row)
            rhs.append(z[r] - known)

    A = np.array(rows)
    b = np.array(rhs)
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > RANK_TOL * sv[0])) if len(sv) and sv[0] > 0 else 0
    full = rank == total
    solution, *_ = np.linalg.lstsq(A, b, rcond=None)
    truth = np.concatenate([transcript.load[j] for j in msgs]) if msgs else np.zeros(0)
    scale = max(float(np.max(np.abs(truth))) if len(truth) else 0.0, 1.0)
    residual = float(np.max(np.abs(solution - truth)) / scale) if len(truth) else 0.0
    success = full and residual <= tol
    recovered = (
        {j: solution[col[j] : col[j] + sizes[j]] for j in msgs} if full else {}
    )
    report = ReceiverReport(receiver=i + 1, success=success, residual=residual,
                            rank=rank, unknowns=total, equations=len(rows))
    return recovered, report


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------


def run_trial(cfg: AntennaConfig, plan: SchemePlan, seed: int, check: bool = True,
              tol: float = RESIDUAL_TOL, noise_std: float = 0.0) -> TrialReport:
    """One full draw-transmit-reconstruct-deliver-decode cycle.

    With ``check`` (the default), infeasible plans are refused up front;
    disabling it drives under-provisioned plans to observe their rank
    deficiencies.  ``noise_std`` injects receiver noise for qualitative
    runs only.
    """
    if check:
        if not decoding_feasible(cfg, plan):
            raise InfeasiblePlanError("plan fails the decoding condition or Phase-II budget")
        if not delivery_feasible(cfg, plan):
            raise InfeasiblePlanError("order-K delivery schedule infeasible for this plan")
    channels = draw_channels(cfg, plan, seed)
    load = draw_load(cfg, plan, int(np.random.default_rng([seed, 0x10AD]).integers(2**63)))
    transcript = run_phase1(cfg, plan, channels, load)
    transcript.blocks = reconstruct_interference(cfg, plan, channels, load)
    transcript.x_order_k = build_order_k(transcript.blocks)
    transcript.schedule = plan_schedule(cfg, plan)
    transcript.phase2 = run_phase2(cfg, plan, channels, transcript.x_order_k,
                                   schedule=transcript.schedule, strict=check)
    if noise_std > 0.0:
        nrng = np.random.default_rng([seed, 0x401E])
        for key, y in transcript.phase1.items():
            noise = nrng.standard_normal(y.shape) + 1j * nrng.standard_normal(y.shape)
            transcript.phase1[key] = y + noise_std * noise / np.sqrt(2.0)
        for i in range(cfg.K):
            transcript.phase2[i] = [
                z + noise_std * (nrng.standard_normal(z.shape)
                                 + 1j * nrng.standard_normal(z.shape)) / np.sqrt(2.0)
                for z in transcript.phase2[i]
            ]
    reports = []
    for i in range(cfg.K):
        _, report = receiver_decode(i, cfg, plan, channels, transcript, tol=tol)
        reports.append(report)
    achieved = achieved_dof(plan) if plan.beta > 0 else tuple()
    return TrialReport(
        seed=seed,
        receivers=tuple(reports),
        achieved=achieved,
        success=all(r.success for r in reports),
    )


def monte_carlo(cfg: AntennaConfig, plan: SchemePlan, trials: int, base_seed: int,
                check: bool = True, tol: float = RESIDUAL_TOL,
                noise_std: float = 0.0) -> MonteCarloSummary:
    """Run seeded independent trials and aggregate order-independently."""
    if check:
        if not decoding_feasible(cfg, plan):
            raise InfeasiblePlanError("plan fails the decoding condition or Phase-II budget")
        if not delivery_feasible(cfg, plan):
            raise InfeasiblePlanError("order-K delivery schedule infeasible for this plan")
    reports = []
    for k in range(trials):
        reports.append(run_trial(cfg, plan, base_seed + k, check=False, tol=tol,
                                 noise_std=noise_std))
    successes = sum(1 for r in reports if r.success)
    worst = max((rx.residual for r in reports for rx in r.receivers), default=None)
    failures = tuple(
        sum(1 for r in reports if not r.receivers[i].success) for i in range(cfg.K)
    ) if trials else tuple(0 for _ in range(cfg.K))
    achieved = achieved_dof(plan) if plan.beta > 0 else tuple()
    return MonteCarloSummary(
        trials=trials,
        successes=successes,
        worst_residual=worst,
        achieved=achieved,
        per_receiver_failures=failures,
        reports=tuple(reports),
    )
