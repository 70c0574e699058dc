"""Command-line interface.

Subcommands: ``region``, ``compare``, ``curve``, ``plan``, ``simulate``.
Machine-readable outputs (JSON and CSV) are byte-stable for fixed flags
and seed; report commands also render a PNG figure next to the data.

Exit codes: 0 success, 2 invalid input, 3 infeasible or out-of-region,
4 simulation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from math import lcm
from pathlib import Path

from bcdof import plotting
from bcdof.config import AntennaConfig, InvalidConfigError, load_config
from bcdof.planner import (
    InfeasiblePlanError,
    RegimeError,
    SchemePlan,
    TargetOutsideRegionError,
    achieved_dof,
    decoding_slacks,
    delivery_feasible,
    phase2_budget,
    plan_for_target,
)
from bcdof.rationals import format_decimal, format_rational, parse_rational
from bcdof.regions import (
    DoFRegion,
    delayed_csit_region,
    is_subset,
    max_sum_dof,
    no_csit_region,
    raw_outer_region,
    remove_redundant,
    symmetric_sum_dof,
    vertices,
)
from bcdof.simulator import monte_carlo

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_SIM_FAILURE = 4


def _fmt(value: Fraction, decimal: bool) -> str:
    return format_decimal(value) if decimal else format_rational(value)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _region_for_mode(cfg: AntennaConfig, mode: str) -> DoFRegion:
    if mode == "nocsit":
        return no_csit_region(cfg)
    if mode == "delayed":
        return delayed_csit_region(cfg)
    if mode == "raw":
        return raw_outer_region(cfg)
    raise ValueError(f"unknown mode {mode!r}")


def _sorted_vertices(region: DoFRegion):
    return sorted(vertices(region))


def cmd_region(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    modes = ["nocsit", "delayed"] if args.mode == "both" else [args.mode]
    plotted = []
    for mode in modes:
        region = _region_for_mode(cfg, mode)
        if mode == "raw":
            region = remove_redundant(region)
        verts = _sorted_vertices(region)
        _write_json(out / f"region_{mode}.json", region.to_json_dict())
        header = [f"d_minus_{i + 1}" for i in range(cfg.K)]
        rows = [[_fmt(x, args.decimal) for x in v] for v in verts]
        _write_csv(out / f"vertices_{mode}.csv", header, rows)
        best = max_sum_dof(region)
        print(f"{mode}: {len(region.halfspaces)} halfspaces, {len(verts)} vertices, "
              f"max sum-DoF {_fmt(best, args.decimal)}")
        plotted.append(((mode, region), verts))
    if cfg.K == 2:
        plotting.region_figure_2d(
            [named for named, _ in plotted],
            [verts for _, verts in plotted],
            out / "region.png",
        )
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    narrow = no_csit_region(cfg)
    wide = delayed_csit_region(cfg)
    assert is_subset(narrow, wide), "no-CSIT region must sit inside the delayed region"
    witness = None
    worst = Fraction(0)
    hs = narrow.halfspaces[0]
    for v in sorted(vertices(wide)):
        excess = hs.evaluate(v) - 1
        if excess > worst:
            worst = excess
            witness = v
    if witness is None:
        relation = "equal"
        print("equal: delayed CSIT adds nothing (M <= N2)")
    else:
        relation = "strict_inclusion"
        pretty = ", ".join(format_rational(x) for x in witness)
        print(f"strict inclusion: delayed CSIT is useful (N2 < M); witness ({pretty})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "compare.json", {
            "relation": relation,
            "witness": None if witness is None else [format_rational(x) for x in witness],
            "delayed_csit_useful": relation == "strict_inclusion",
        })
    return EXIT_OK


def _parse_ratio_list(text: str) -> list[Fraction]:
    ratios = [parse_rational(part) for part in text.split(",") if part.strip()]
    if not ratios or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be positive: {text!r}")
    return ratios


def cmd_curve(args) -> int:
    ks = [int(k) for k in args.kusers.split(",") if k.strip()]
    if any(k < 2 for k in ks):
        raise ValueError("K must be at least 2")
    ratios = _parse_ratio_list(args.ratios)
    base_n = lcm(*(r.denominator for r in ratios))
    points = []
    for k in ks:
        for r in ratios:
            m = int(r * base_n)
            for mode in ("nocsit", "delayed"):
                value = symmetric_sum_dof(m, base_n, k, mode) / base_n
                points.append({"K": k, "ratio": r, "mode": mode, "value": value})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        [p["K"], _fmt(p["ratio"], args.decimal), p["mode"], _fmt(p["value"], args.decimal)]
        for p in points
    ]
    _write_csv(out / "curve.csv", ["K", "M_over_N", "mode", "sum_dof_over_N"], rows)
    plotting.curve_figure(points, out / "curve.png")
    print(f"wrote {len(rows)} curve points for K in {ks} (N normalized to {base_n})")
    return EXIT_OK


def _parse_target(cfg: AntennaConfig, text: str):
    parts = [parse_rational(p) for p in text.split(",") if p.strip()]
    if len(parts) != cfg.K:
        raise ValueError(f"target needs {cfg.K} entries, got {len(parts)}")
    return tuple(parts)


def _plan_json(cfg: AntennaConfig, plan: SchemePlan) -> dict:
    used, capacity = phase2_budget(plan)
    return {
        **plan.to_json_dict(),
        "achieved_dof": [format_rational(d) for d in achieved_dof(plan)]
        if plan.beta > 0
        else [],
        "decoding_condition": [
            {"receiver": j + 1, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs}
            for j, (lhs, rhs) in enumerate(decoding_slacks(cfg, plan))
        ],
        "phase2_budget": {"used": used, "capacity": capacity},
    }


def cmd_plan(args) -> int:
    cfg = load_config(args.config)
    target = _parse_target(cfg, args.target)
    plan = plan_for_target(cfg, target)
    print(f"Q = {list(plan.Q)}  T = {list(plan.T)}  T2 = {plan.T2}  "
          f"B = {plan.B}  trunc = {list(plan.trunc)}  beta = {plan.beta}")
    for j, (lhs, rhs) in enumerate(decoding_slacks(cfg, plan)):
        print(f"  receiver {j + 1}: {lhs} <= {rhs}  (slack {rhs - lhs})")
    used, capacity = phase2_budget(plan)
    print(f"  phase-2 budget: {used} of {capacity} symbol slots")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "plan.json", _plan_json(cfg, plan))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if bool(args.target) == bool(args.plan):
        raise ValueError("provide exactly one of --target or --plan")
    if args.target:
        plan = plan_for_target(cfg, _parse_target(cfg, args.target))
    else:
        with open(args.plan, "r", encoding="utf-8") as fh:
            plan = SchemePlan.from_json_dict(json.load(fh))
        for j, (lhs, rhs) in enumerate(decoding_slacks(cfg, plan)):
            if lhs > rhs:
                raise InfeasiblePlanError(
                    f"decoding condition fails at receiver {j + 1}: {lhs} > {rhs}"
                )
        used, capacity = phase2_budget(plan)
        if used > capacity:
            raise InfeasiblePlanError(
                f"Phase-II budget exceeded: {used} > {capacity}"
            )
        if not delivery_feasible(cfg, plan):
            raise InfeasiblePlanError("order-K delivery schedule infeasible for this plan")
    summary = monte_carlo(cfg, plan, trials=args.trials, base_seed=args.seed,
                          tol=args.tol, noise_std=args.noise_std)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = ["trial", "seed", "success"]
    for i in range(cfg.K):
        header.append(f"residual_rx{i + 1}")
    for i in range(cfg.K):
        header.append(f"success_rx{i + 1}")
    rows = []
    for k, rep in enumerate(summary.reports):
        row = [k, rep.seed, int(rep.success)]
        row += [f"{rx.residual:.6e}" for rx in rep.receivers]
        row += [int(rx.success) for rx in rep.receivers]
        rows.append(row)
    _write_csv(out / "trials.csv", header, rows)
    _write_json(out / "summary.json", {
        "config": cfg.to_json_dict(),
        "plan": _plan_json(cfg, plan),
        "trials": summary.trials,
        "successes": summary.successes,
        "success_fraction": summary.success_fraction,
        "worst_residual": summary.worst_residual,
        "achieved_dof": [format_rational(d) for d in summary.achieved],
        "per_receiver_failures": list(summary.per_receiver_failures),
        "tolerance": args.tol,
        "base_seed": args.seed,
        "noise_std": args.noise_std,
    })
    plotting.residual_figure(summary.reports, out / "residuals.png")
    frac = summary.success_fraction
    achieved = "(" + ", ".join(format_rational(d) for d in summary.achieved) + ")"
    print(f"success {summary.successes}/{summary.trials}"
          f" ({'n/a' if frac is None else f'{frac:.3f}'}),"
          f" worst residual {summary.worst_residual},"
          f" achieved DoF {achieved}")
    if summary.trials and summary.successes < summary.trials:
        return EXIT_SIM_FAILURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to config JSON {'M':_, 'N':[...]}")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=12345, help="base RNG seed")
    common.add_argument("--decimal", action="store_true",
                        help="render rationals as 12-digit decimals")

    parser = argparse.ArgumentParser(
        prog="bcdof",
        description="DoF regions and delayed-CSIT scheme simulation for the "
                    "K-user MIMO broadcast channel (order-(K-1) messages).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", parents=[common],
                       help="emit halfspaces, vertices and max sum-DoF")
    p.add_argument("--mode", default="both",
                   choices=["nocsit", "delayed", "raw", "both"])
    p.set_defaults(func=cmd_region, needs_config=True)

    p = sub.add_parser("compare", parents=[common],
                       help="no-CSIT vs delayed-CSIT region verdict")
    p.set_defaults(func=cmd_compare, needs_config=True)

    p = sub.add_parser("curve", parents=[common],
                       help="normalized sum-DoF curves over M/N")
    p.add_argument("--kusers", default="2,3,4", help="comma-separated K values")
    p.add_argument("--ratios",
                   default=",".join(f"{n}/4" for n in range(1, 17)),
                   help="comma-separated rational M/N grid")
    p.set_defaults(func=cmd_curve, needs_config=False)

    p = sub.add_parser("plan", parents=[common],
                       help="scheme parameters for a target DoF point")
    p.add_argument("--target", required=True,
                   help="comma-separated rational DoF tuple")
    p.set_defaults(func=cmd_plan, needs_config=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="Monte-Carlo decodability certification")
    p.add_argument("--target", help="comma-separated rational DoF tuple")
    p.add_argument("--plan", help="path to an explicit plan JSON")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--noise-std", type=float, default=0.0,
                   help="receiver noise std (qualitative only)")
    p.set_defaults(func=cmd_simulate, needs_config=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "needs_config", False) and not args.config:
            parser.error(f"{args.command} requires --config")
        return args.func(args)
    except (InvalidConfigError, json.JSONDecodeError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, (RegimeError, TargetOutsideRegionError, InfeasiblePlanError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
