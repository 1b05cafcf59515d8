"""Command-line front end: run, sweep, compare.

All emitted files are deterministic in the inputs: re-running a command
with identical flags reproduces byte-identical output regardless of the
CA_NETSIM_THREADS worker cap.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import engine
from .metrics import RunResult, compare_runs
from .scenario import (AggregationConfig, CarrierSpec, ScenarioConfig,
                       ScenarioError, enumerate_combinations, make_band,
                       parse_scenario)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

PAPER_PRESET = "paper-2cc-vs-3cc"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _write_json(path: Path, data: dict) -> None:
    with open(path, "w") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")


def parse_band_spec(spec: str) -> dict:
    """Parse `900:10;1800:10,20;2100:10,20` into {band: [bandwidths]}."""
    hint = "expected FREQ:BW[,BW...] groups separated by ';'"
    allowed: dict = {}
    for group in spec.split(";"):
        group = group.strip()
        if not group:
            continue
        head, sep, tail = group.partition(":")
        if not sep or not tail.strip():
            raise ScenarioError(f"malformed band spec {group!r}: {hint}")
        try:
            freq = float(head)
            bws = [float(b) for b in tail.split(",")]
        except ValueError:
            raise ScenarioError(f"malformed band spec {group!r}: {hint}") from None
        allowed.setdefault(freq, []).extend(bws)
    if not allowed:
        raise ScenarioError(f"empty band spec: {hint}")
    return allowed


def preset_combinations() -> list:
    """The 2CC-vs-3CC inter-band pair: 1800@20+2100@20 and 900@10+1800@20+2100@20."""
    b900, b1800, b2100 = make_band(900), make_band(1800), make_band(2100)
    two = AggregationConfig.create((
        CarrierSpec.create(b1800, 20), CarrierSpec.create(b2100, 20)))
    three = AggregationConfig.create((
        CarrierSpec.create(b900, 10), CarrierSpec.create(b1800, 20),
        CarrierSpec.create(b2100, 20)))
    return [two, three]


def _load_scenario(args) -> ScenarioConfig:
    path = Path(args.config)
    if not path.is_file():
        raise ScenarioError(f"config file not found: {path}")
    config = parse_scenario(path.read_text())
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if config.seed is None:
        raise ScenarioError("seed required: pass --seed or set it in the config")
    return config.validate()


def _apply_overrides(base: ScenarioConfig, args) -> ScenarioConfig:
    sim, pop = base.sim, base.population
    if getattr(args, "n_tti", None) is not None:
        sim = replace(sim, n_tti=args.n_tti)
    if getattr(args, "policy", None) is not None:
        sim = replace(sim, pf_policy=args.policy)
    if getattr(args, "ues_per_sector", None) is not None:
        pop = replace(pop, ues_per_sector=args.ues_per_sector)
    return replace(base, sim=sim, population=pop)


def cmd_run(args) -> int:
    try:
        config = _load_scenario(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        result, artifacts = engine.run_with_artifacts(
            config, collect_trace=args.trace)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    _write_json(out / "summary.json", result.to_dict())
    rows = [
        (ue, artifacts.ue_sectors[ue], artifacts.ue_positions[ue].x,
         artifacts.ue_positions[ue].y, result.per_ue_throughput_mbps[ue])
        for ue in sorted(result.per_ue_throughput_mbps)
    ]
    _write_csv(out / "cell_stats.csv",
               ["ue_id", "sector", "x", "y", "throughput_mbps"], rows)
    if args.trace:
        _write_csv(out / "alloc_trace.csv",
                   ["tti", "carrier", "rb", "ue", "bits"],
                   artifacts.alloc_trace)
    print(f"{result.label}: cell avg {result.cell_avg_throughput_mbps:.3f} Mbps, "
          f"fairness {result.fairness_index:.4f} -> {out}")
    return EXIT_OK


def _sweep_tables(sweep: engine.SweepResult):
    data_rows = [
        (row.label, row.band_list, row.bw_list, row.total_bw_mhz, row.seed,
         row.cell_avg_mbps, row.fairness, row.pf_policy, row.error or "")
        for row in sweep.rows
    ]
    for agg in sweep.aggregates:
        data_rows.append((agg.label, agg.band_list, agg.bw_list,
                          agg.total_bw_mhz, "mean", agg.mean_cell_avg_mbps,
                          agg.mean_fairness, agg.pf_policy, ""))
        data_rows.append((agg.label, agg.band_list, agg.bw_list,
                          agg.total_bw_mhz, "std", agg.std_cell_avg_mbps,
                          agg.std_fairness, agg.pf_policy, ""))
    fig4 = [(a.label, a.total_bw_mhz, a.mean_cell_avg_mbps, a.std_cell_avg_mbps)
            for a in sweep.aggregates]
    fig5 = [(a.label, a.total_bw_mhz, a.mean_fairness, a.std_fairness)
            for a in sweep.aggregates]
    return data_rows, fig4, fig5


def cmd_sweep(args) -> int:
    try:
        base = None
        if args.config:
            path = Path(args.config)
            if not path.is_file():
                raise ScenarioError(f"config file not found: {path}")
            base = parse_scenario(path.read_text())
        if args.preset:
            if args.preset != PAPER_PRESET:
                raise ScenarioError(
                    f"unknown preset {args.preset!r}; available: {PAPER_PRESET}")
            combos = preset_combinations()
            if args.n_tti is None:
                args.n_tti = 1000
        else:
            if not args.bands or not args.cc:
                raise ScenarioError("--bands and --cc are required without --preset")
            allowed = parse_band_spec(args.bands)
            try:
                cc_counts = [int(c) for c in args.cc.split(",")]
            except ValueError:
                raise ScenarioError(
                    f"--cc expects integers like '2' or '2,3', got {args.cc!r}"
                ) from None
            combos = []
            for n_cc in cc_counts:
                combos.extend(enumerate_combinations(allowed, n_cc))
        if base is None:
            base = ScenarioConfig(aggregation=combos[0])
        base = _apply_overrides(base, args)
        seeds = list(range(args.seeds))
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        sweep = engine.run_combos(combos, seeds, base=base)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    data_rows, fig4, fig5 = _sweep_tables(sweep)
    header = ["combination", "band_list", "bw_list", "total_bw_mhz", "seed",
              "cell_avg_mbps", "fairness", "pf_policy", "error"]
    _write_csv(out / "sweep.csv", header, data_rows)
    _write_csv(out / "fig4_throughput.csv",
               ["combination", "total_bw_mhz", "mean_cell_avg_mbps",
                "std_cell_avg_mbps"], fig4)
    _write_csv(out / "fig5_fairness.csv",
               ["combination", "total_bw_mhz", "mean_fairness",
                "std_fairness"], fig5)
    for agg in sweep.aggregates:
        print(f"{agg.label}: mean {agg.mean_cell_avg_mbps:.3f} Mbps, "
              f"fairness {agg.mean_fairness:.4f} ({agg.pf_policy} PF, "
              f"{agg.n_seeds} seeds)")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        results = []
        for name in (args.a, args.b):
            path = Path(name)
            if not path.is_file():
                raise ValueError(f"summary file not found: {path}")
            try:
                results.append(RunResult.from_dict(json.loads(path.read_text())))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ValueError(f"{path}: {exc}") from None
        a, b = results
        if a.seed != b.seed:
            print(f"warning: comparing runs with different seeds "
                  f"({a.seed} vs {b.seed})", file=sys.stderr)
        deltas = compare_runs(a, b)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    payload = {
        "a_label": a.label, "b_label": b.label,
        "a_seed": a.seed, "b_seed": b.seed,
        "throughput_gain_pct": deltas["throughput_gain_pct"],
        "fairness_delta_pct": deltas["fairness_delta_pct"],
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "compare.json", payload)
    print(f"{b.label} vs {a.label}: throughput {deltas['throughput_gain_pct']:+.2f}%, "
          f"fairness {deltas['fairness_delta_pct']:+.2f}%")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ca-netsim",
        description="Deterministic LTE-A downlink simulator for carrier "
                    "aggregation studies")
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one scenario")
    runp.add_argument("--config", required=True, help="scenario file (TOML or JSON)")
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--out", required=True, help="output directory")
    runp.add_argument("--trace", action="store_true",
                      help="also write the per-TTI allocation trace")
    runp.set_defaults(func=cmd_run)

    sweepp = sub.add_parser("sweep", help="sweep CC combinations")
    sweepp.add_argument("--bands", help="e.g. 900:10;1800:10,20;2100:10,20")
    sweepp.add_argument("--cc", help="CC counts, e.g. 2 or 2,3")
    sweepp.add_argument("--seeds", type=int, default=5,
                        help="number of seeds (0..K-1)")
    sweepp.add_argument("--out", required=True)
    sweepp.add_argument("--preset", help=f"named sweep, e.g. {PAPER_PRESET}")
    sweepp.add_argument("--config", help="base scenario file for non-carrier settings")
    sweepp.add_argument("--n-tti", dest="n_tti", type=int, default=None)
    sweepp.add_argument("--ues-per-sector", dest="ues_per_sector", type=int,
                        default=None)
    sweepp.add_argument("--policy", choices=["joint", "per_cc"], default=None,
                        help="PF historical-rate accounting across carriers")
    sweepp.set_defaults(func=cmd_sweep)

    cmpp = sub.add_parser("compare", help="compare two run summaries")
    cmpp.add_argument("--a", required=True, help="baseline summary.json")
    cmpp.add_argument("--b", required=True, help="candidate summary.json")
    cmpp.add_argument("--out", default=".", help="directory for compare.json")
    cmpp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
