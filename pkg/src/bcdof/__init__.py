"""Degrees-of-freedom region calculus and delayed-CSIT link simulation
for order-(K-1) messages over the K-user MIMO broadcast channel.

The package has four layers:

* :mod:`bcdof.config` -- validated antenna configurations,
* :mod:`bcdof.regions` -- exact rational DoF-region polytopes,
* :mod:`bcdof.planner` -- two-phase transmission scheme parameters,
* :mod:`bcdof.simulator` -- Monte-Carlo link-level decodability trials.

All region arithmetic is exact (``fractions.Fraction``); floating point
is confined to the simulator.
"""

from bcdof.config import AntennaConfig, InvalidConfigError, validate_config
from bcdof.planner import (
    InfeasiblePlanError,
    RegimeError,
    SchemePlan,
    TargetOutsideRegionError,
    achieved_dof,
    antenna_counts,
    decoding_feasible,
    phase2_antennas,
    plan_for_target,
    truncation_lengths,
)
from bcdof.regions import (
    DoFRegion,
    HalfSpace,
    contains,
    delayed_csit_region,
    is_subset,
    max_sum_dof,
    no_csit_region,
    raw_outer_region,
    regions_equal,
    remove_redundant,
    symmetric_sum_dof,
    vertices,
)
from bcdof.simulator import (
    TrialReport,
    backward_forward_cancel,
    draw_channels,
    monte_carlo,
    run_trial,
)

__all__ = [
    "AntennaConfig",
    "DoFRegion",
    "HalfSpace",
    "InfeasiblePlanError",
    "InvalidConfigError",
    "RegimeError",
    "SchemePlan",
    "TargetOutsideRegionError",
    "TrialReport",
    "achieved_dof",
    "antenna_counts",
    "backward_forward_cancel",
    "contains",
    "decoding_feasible",
    "delayed_csit_region",
    "draw_channels",
    "is_subset",
    "max_sum_dof",
    "monte_carlo",
    "no_csit_region",
    "phase2_antennas",
    "plan_for_target",
    "raw_outer_region",
    "regions_equal",
    "remove_redundant",
    "run_trial",
    "symmetric_sum_dof",
    "truncation_lengths",
    "validate_config",
    "vertices",
]

__version__ = "0.1.0"
