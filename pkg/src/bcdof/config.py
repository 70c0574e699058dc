"""Validated antenna configurations shared by every other module.

The transmitter has ``M`` antennas and receiver ``i`` has ``N[i-1]``
antennas.  All region and scheme formulas assume receivers are indexed
by ascending antenna count, so validation sorts ``N`` and keeps the
permutation needed to map results back to the caller's receiver labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence


class InvalidConfigError(ValueError):
    """Raised for antenna configurations that violate basic sanity."""


@dataclass(frozen=True)
class AntennaConfig:
    """Immutable antenna configuration with canonical receiver order.

    ``N`` is ascending.  ``receiver_order[k]`` is the position, in the
    caller's original list, of the receiver that canonical index ``k``
    refers to.
    """

    M: int
    N: tuple[int, ...]
    receiver_order: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.N)

    def to_canonical(self, seq: Sequence) -> tuple:
        """Reorder a user-ordered length-K sequence into canonical order."""
        if len(seq) != self.K:
            raise ValueError(f"expected length {self.K}, got {len(seq)}")
        return tuple(seq[p] for p in self.receiver_order)

    def to_user(self, seq: Sequence) -> tuple:
        """Reorder a canonical length-K sequence back to user order."""
        if len(seq) != self.K:
            raise ValueError(f"expected length {self.K}, got {len(seq)}")
        out = [None] * self.K
        for k, p in enumerate(self.receiver_order):
            out[p] = seq[k]
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {"M": self.M, "N": list(self.to_user(self.N))}


def validate_config(M: int, N: Sequence[int]) -> AntennaConfig:
    """Check raw antenna counts and canonicalize receiver order.

    Receivers are relabeled so antenna counts ascend; the applied
    permutation is retained on the returned config.  Sorting is stable,
    so equal antenna counts keep their relative user order.
    """
    if not isinstance(M, int) or isinstance(M, bool):
        raise InvalidConfigError(f"M must be an integer, got {M!r}")
    counts = list(N)
    for n in counts:
        if not isinstance(n, int) or isinstance(n, bool):
            raise InvalidConfigError(f"receiver antenna counts must be integers, got {n!r}")
    if M < 1:
        raise InvalidConfigError(f"transmit antenna count must be positive, got M={M}")
    if len(counts) < 2:
        raise InvalidConfigError(f"need at least 2 receivers, got {len(counts)}")
    if any(n < 1 for n in counts):
        raise InvalidConfigError(f"receiver antenna counts must be positive, got {counts}")
    order = tuple(sorted(range(len(counts)), key=lambda k: counts[k]))
    return AntennaConfig(M=M, N=tuple(counts[p] for p in order), receiver_order=order)


def load_config(path) -> AntennaConfig:
    """Read the canonical on-disk form ``{"M": int, "N": [int, ...]}``."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "M" not in data or "N" not in data:
        raise InvalidConfigError(f"config file {path} must contain keys 'M' and 'N'")
    return validate_config(data["M"], data["N"])
