"""Phase-II delivery machinery: order-K entry layout, slot scheduling,
and the exact per-receiver deliverability check.

The order-K vector concatenates pairwise sums of adjacent truncated
interference blocks.  Because every interior block feeds two pairs, the
same block row can ride in two entries; scheduling therefore tracks,
per entry, which block rows it carries ("functionals") and spreads the
first carrier of each row across slots, leaving duplicate carriers as
filler.  Deliverability is then certified exactly per receiver with a
max-flow argument at the granularity of Phase-I slots, matching the
generic rank of the stacked decoding system.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass
from typing import Sequence

# Entry record: mapping block index -> row index within that block's
# truncated vector.  Sum entries carry two blocks, singleton entries one.
EntryTable = list[dict[int, int]]


def worst_case_antennas(N: Sequence[int], block: int) -> int:
    """Antennas of the neediest receiver that wants message ``block``.

    Message 0 is unwanted only by receiver 0, so its weakest customer is
    receiver 1; every other message is wanted by receiver 0.
    """
    return N[1] if block == 0 else N[0]


def per_slot_quota(N: Sequence[int], Q: Sequence[int], block: int) -> int:
    """Rows of each Phase-I slot's observation retained for delivery."""
    return max(Q[block] - worst_case_antennas(N, block), 0)


def block_row_indices(N: Sequence[int], Q: Sequence[int], T: Sequence[int],
                      block: int) -> list[int]:
    """Row indices (into the stacked N_j*T_j observation) forming block j.

    The quota rows are drawn from every slot of the sub-phase, ordered
    round-robin across slots so adjacent block entries come from
    different slots: entry k is row ``k // T_j`` of slot ``k % T_j``.
    """
    q = per_slot_quota(N, Q, block)
    nj = N[block]
    return [t * nj + r for r in range(q) for t in range(T[block])]


def entry_chunk(T: Sequence[int], block: int, row: int) -> int:
    """Phase-I slot (chunk) of the sub-phase that produced a block row."""
    return row % T[block]


def order_k_entry_table(lengths: Sequence[int], active: Sequence[bool]) -> EntryTable:
    """Entry layout of the order-K vector: K-1 zero-padded pair blocks."""
    K = len(lengths)
    table: EntryTable = []
    for p in range(K - 1):
        span = max(lengths[p], lengths[p + 1])
        for e in range(span):
            contrib: dict[int, int] = {}
            if e < lengths[p] and active[p]:
                contrib[p] = e
            if e < lengths[p + 1] and active[p + 1]:
                contrib[p + 1] = e
            table.append(contrib)
    return table


@dataclass(frozen=True)
class Schedule:
    """Deterministic assignment of order-K entries to Phase-II slots."""

    slot_of: tuple  # entry index -> slot index, or None when dropped
    table: tuple    # entry table, frozen as tuple of dicts

    @property
    def dropped(self) -> bool:
        return any(s is None for s in self.slot_of)

    def slots(self, T2: int) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(T2)]
        for e, t in enumerate(self.slot_of):
            if t is not None:
                out[t].append(e)
        return out


def schedule_entries(N: Sequence[int], Q: Sequence[int], T: Sequence[int],
                     lengths: Sequence[int], T2: int, B: int) -> Schedule:
    """Deal order-K entries to slots, at most B per slot.

    Placement order: singleton entries of each block first (each class
    spread over the least-loaded slots), then sum entries into the slot
    whose worst per-receiver usefulness is lowest, then duplicate
    carriers anywhere capacity remains.  Entries that do not fit within
    B*T2 are left unassigned (``None``); callers treat that as a budget
    failure.
    """
    K = len(N)
    active = [t > 0 for t in T]
    table = order_k_entry_table(lengths, active)
    X = len(table)
    if T2 == 0:
        return Schedule(slot_of=tuple([None] * X), table=tuple(table))

    covered: set[tuple[int, int]] = set()
    primaries: list[int] = []
    duplicates: list[int] = []
    for e, contrib in enumerate(table):
        fns = {(b, r) for b, r in contrib.items()}
        if fns - covered:
            primaries.append(e)
            covered |= fns
        else:
            duplicates.append(e)

    needs = [
        sum(T[i] * max(Q[i] - N[j], 0) for i in range(K) if i != j)
        for j in range(K)
    ]
    needy = [j for j in range(K) if needs[j] > 0]
    load = [0] * T2
    single_cnt = [[0] * T2 for _ in range(K)]
    slot_of: list = [None] * X

    def place(e: int, t: int) -> None:
        slot_of[e] = t
        load[t] += 1
        contrib = table[e]
        if len(contrib) == 1:
            (b,) = contrib
            single_cnt[b][t] += 1

    singles_by_block: dict[int, list[int]] = {}
    sums: list[int] = []
    for e in primaries:
        if len(table[e]) == 1:
            (b,) = table[e]
            singles_by_block.setdefault(b, []).append(e)
        else:
            sums.append(e)
    for blk in sorted(singles_by_block, key=lambda b: (-len(singles_by_block[b]), b)):
        for e in singles_by_block[blk]:
            cand = [t for t in range(T2) if load[t] < B]
            if not cand:
                continue
            place(e, min(cand, key=lambda s: (load[s], single_cnt[blk][s], s)))
    for e in sums:
        cand = [t for t in range(T2) if load[t] < B]
        if not cand:
            continue

        def usefulness_floor(t: int) -> int:
            if not needy:
                return 0
            return min(load[t] - single_cnt[j][t] for j in needy)

        place(e, min(cand, key=lambda s: (usefulness_floor(s), load[s], s)))
    for e in duplicates:
        cand = [t for t in range(T2) if load[t] < B]
        if not cand:
            continue
        place(e, min(cand, key=lambda s: (load[s], s)))
    return Schedule(slot_of=tuple(slot_of), table=tuple(table))


def _max_flow(cap: dict, adj: dict, source: int, sink: int) -> int:
    flow = 0
    while True:
        parent = {source: None}
        queue = collections.deque([source])
        while queue:
            u = queue.popleft()
            if u == sink:
                break
            for v in adj[u]:
                if cap[(u, v)] > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        path = []
        v = sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        bottleneck = min(cap[(u, w)] for u, w in path)
        for u, w in path:
            cap[(u, w)] -= bottleneck
            cap[(w, u)] += bottleneck
        flow += bottleneck


def receiver_deliverable(N: Sequence[int], Q: Sequence[int], T: Sequence[int],
                         T2: int, schedule: Schedule, receiver: int) -> bool:
    """Exact check that receiver ``receiver`` can harvest all equations
    it lacks, given the slot assignment.

    Network: each Phase-I chunk of an interfering sub-phase supplies
    ``max(Q_i - N_j, 0)`` units, routed through its block rows (capacity
    one each, merged across duplicate entries), through the carrying
    entries (capacity one), into slots (capacity ``N_j``).
    """
    K = len(N)
    j = receiver
    chunk_need: dict[tuple[int, int], int] = {}
    for i in range(K):
        if i == j or T[i] == 0:
            continue
        deficit = max(Q[i] - N[j], 0)
        if deficit > 0:
            for t in range(T[i]):
                chunk_need[(i, t)] = deficit
    total_need = sum(chunk_need.values())
    if total_need == 0:
        return True

    node_ids: dict = {}
    next_id = 2  # 0 = source, 1 = sink

    def node(key):
        nonlocal next_id
        if key not in node_ids:
            node_ids[key] = next_id
            next_id += 1
        return node_ids[key]

    cap: dict = collections.defaultdict(int)
    adj: dict = collections.defaultdict(set)

    def arc(u: int, v: int, c: int) -> None:
        cap[(u, v)] += c
        adj[u].add(v)
        adj[v].add(u)

    for key, c in chunk_need.items():
        arc(0, node(("chunk", key)), c)
    functional_seen: set[tuple[int, int]] = set()
    for e, contrib in enumerate(schedule.table):
        slot = schedule.slot_of[e]
        if slot is None:
            continue
        entry_used = False
        for b, r in contrib.items():
            if b == j or T[b] == 0:
                continue
            ck = (b, entry_chunk(T, b, r))
            if ck not in chunk_need:
                continue
            fn = (b, r)
            if fn not in functional_seen:
                functional_seen.add(fn)
                arc(node(("chunk", ck)), node(("fin", fn)), 1)
                arc(node(("fin", fn)), node(("fout", fn)), 1)
            arc(node(("fout", fn)), node(("entry", e)), 1)
            entry_used = True
        if entry_used:
            arc(node(("entry", e)), node(("slot", slot)), 1)
    for t in {s for s in schedule.slot_of if s is not None}:
        if ("slot", t) in node_ids:
            arc(node(("slot", t)), 1, N[j])
    return _max_flow(cap, adj, 0, 1) >= total_need


def deliverable(N: Sequence[int], Q: Sequence[int], T: Sequence[int],
                lengths: Sequence[int], T2: int, B: int):
    """Schedule the order-K vector and verify every receiver's harvest.

    Returns ``(schedule, failures)`` where ``failures`` lists receiver
    indexes whose deliverability check failed; a dropped entry (over
    budget) fails every receiver with outstanding needs.
    """
    schedule = schedule_entries(N, Q, T, lengths, T2, B)
    K = len(N)
    failures: list[int] = []
    if schedule.dropped:
        for j in range(K):
            need = sum(T[i] * max(Q[i] - N[j], 0) for i in range(K) if i != j)
            if need > 0:
                failures.append(j)
        if not failures:
            failures = list(range(K))
        return schedule, failures
    for j in range(K):
        if not receiver_deliverable(N, Q, T, T2, schedule, j):
            failures.append(j)
    return schedule, failures
