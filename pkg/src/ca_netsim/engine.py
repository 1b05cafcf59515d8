"""Run orchestration: layout, drops, link budget, TTI loop, sweeps.

A run is bit-deterministic in (scenario, seed): placement, shadowing and
fading draw from sub-seeds keyed by (master seed, purpose, entity
indices), so results never depend on evaluation order, worker count, or
which other combinations a sweep contains. Statistics are collected from
the center site's sectors only; all other sectors act as full-buffer
interferers.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry, propagation
from .link_abstraction import (FADING_PURPOSE, FadingTrace, RateMap,
                               noise_power_dbm)
from .metrics import RunResult, jain_index, ue_throughput_mbps
from .scenario import (AggregationConfig, ScenarioConfig, ScenarioError,
                       enumerate_combinations, with_aggregation)
from .scheduler import (UEContext, configure_ca, schedule_tti,
                        update_cell_averages)
from .seeds import rng_for, sub_seed

PLACEMENT_PURPOSE = "placement"

WORKERS_ENV_VAR = "CA_NETSIM_THREADS"


@dataclass(frozen=True)
class RunPlan:
    """Scenario plus its derived, purpose-labeled RNG sub-seeds."""

    scenario: ScenarioConfig

    @property
    def master_seed(self) -> int:
        return int(self.scenario.seed)

    def sub_seeds(self) -> dict:
        return {
            purpose: sub_seed(self.master_seed, purpose)
            for purpose in (PLACEMENT_PURPOSE, propagation.SHADOWING_PURPOSE,
                            FADING_PURPOSE)
        }

    def placement_rng(self) -> np.random.Generator:
        return rng_for(self.master_seed, PLACEMENT_PURPOSE)

    def shadowing_db(self, ue_index: int, site_index: int) -> float:
        return propagation.shadowing_sample_db(
            ue_index, site_index, self.scenario.sim.shadowing_sigma_db,
            self.master_seed)

    def fading_trace(self, ue_index: int, carrier) -> FadingTrace:
        # keyed by carrier frequency so a band keeps its trace across configs
        freq_khz = int(round(carrier.band.center_frequency_mhz * 1000))
        rng = rng_for(self.master_seed, FADING_PURPOSE, ue_index, freq_khz)
        return FadingTrace(
            rng, carrier.band.center_frequency_mhz,
            self.scenario.population.ue_speed_mps,
            enabled=self.scenario.sim.fading_enabled,
            tti_s=self.scenario.sim.tti_ms * 1e-3,
        )


@dataclass
class RunArtifacts:
    """Side products of a run for dumps and plots (not part of RunResult)."""

    layout: geometry.Layout
    ue_positions: list
    ue_sectors: list  # center-UE global sector index
    link_gains: dict  # (ue, sector_index, carrier_index) -> LinkGain
    alloc_trace: list = field(default_factory=list)  # (tti, carrier, rb, ue, bits)


def run(scenario: ScenarioConfig) -> RunResult:
    """Execute one deterministic run and return its cell statistics."""
    result, _ = run_with_artifacts(scenario, collect_trace=False)
    return result


def run_with_artifacts(scenario: ScenarioConfig,
                       collect_trace: bool = False):
    scenario.validate()
    if scenario.seed is None:
        raise ScenarioError("seed required (set it in the scenario or pass one)")
    lay, pop, sim = scenario.layout, scenario.population, scenario.sim
    if sim.n_tti < 1:
        raise ScenarioError("empty simulation: n_tti must be >= 1")

    plan = RunPlan(scenario)
    layout = geometry.build_hex_layout(
        lay.inter_site_distance_m, lay.rings, lay.sectors_per_site,
        lay.azimuth_offset_deg, lay.site_height_m)
    ue_positions = geometry.drop_ues(
        layout, pop.ues_per_sector, pop.min_ue_site_distance_m,
        plan.placement_rng(), pop.rx_height_m)

    carriers = scenario.aggregation.carriers
    n_cc = len(carriers)
    n_center = lay.sectors_per_site * pop.ues_per_sector
    n_sectors = len(layout.sectors)
    rate_map = RateMap(sim.alpha, sim.sinr_min_db, sim.se_max, sim.rb_bandwidth_hz)
    tti_s = sim.tti_ms * 1e-3
    noise_mw = 10.0 ** (noise_power_dbm(sim.rb_bandwidth_hz, sim.noise_figure_db)
                        / 10.0)

    # large-scale budget for every (center UE, sector, carrier) link
    link_gains = {}
    gains_db = np.empty((n_center, n_sectors, n_cc))
    for u in range(n_center):
        ue = ue_positions[u]
        shadow = {site: plan.shadowing_db(u, site)
                  for site in range(layout.n_sites)}
        for s_idx, sector in enumerate(layout.sectors):
            site = layout.sites[sector.site_index]
            for ci, carrier in enumerate(carriers):
                gain = propagation.link_gain(
                    ue, sector, site, carrier, scenario,
                    shadow[sector.site_index])
                link_gains[(u, s_idx, ci)] = gain
                gains_db[u, s_idx, ci] = gain.total_gain_db

    # interference-inclusive base SINR per (center UE, carrier); the
    # serving-link fading multiplies the numerator per RB and TTI
    per_rb_power = np.array([c.per_rb_tx_power_dbm for c in carriers])
    serving_sector = [u // pop.ues_per_sector for u in range(n_center)]
    rx_mw = 10.0 ** ((gains_db + per_rb_power[None, None, :]) / 10.0)
    base_sinr = np.empty((n_center, n_cc))
    for u in range(n_center):
        srv = serving_sector[u]
        total = rx_mw[u].sum(axis=0)
        base_sinr[u] = rx_mw[u, srv] / (total - rx_mw[u, srv] + noise_mw)

    traces = {(u, ci): plan.fading_trace(u, carriers[ci])
              for u in range(n_center) for ci in range(n_cc)}

    def link_oracle(ue_id: int, ci: int, tti: int) -> np.ndarray:
        gains = traces[(ue_id, ci)].linear_gains(tti, carriers[ci].n_rb)
        return base_sinr[ue_id, ci] * gains

    cells = []
    for k in range(lay.sectors_per_site):
        members = [
            configure_ca(
                UEContext(ue_id=u, serving_sector=k, max_ccs=pop.max_ccs),
                scenario.aggregation)
            for u in range(k * pop.ues_per_sector, (k + 1) * pop.ues_per_sector)
        ]
        cells.append(members)

    bits_per_ue = np.zeros((n_center, sim.n_tti))
    artifacts = RunArtifacts(layout=layout, ue_positions=ue_positions,
                             ue_sectors=serving_sector, link_gains=link_gains)
    for tti in range(sim.n_tti):
        for k, members in enumerate(cells):
            allocation = schedule_tti(
                members, carriers, tti, link_oracle,
                feedback_delay_tti=sim.feedback_delay_tti,
                rate_map=rate_map, policy=sim.pf_policy, tti_s=tti_s)
            for ci, slots in sorted(allocation.per_carrier.items()):
                for rb, slot in enumerate(slots):
                    if slot is None:
                        continue
                    ue_id, bits = slot
                    bits_per_ue[ue_id, tti] += bits
                    if collect_trace:
                        artifacts.alloc_trace.append((tti, ci, rb, ue_id, bits))
            update_cell_averages(members, allocation, sim.pf_time_constant_tti,
                                 sim.pf_policy)

    per_ue = {u: ue_throughput_mbps(bits_per_ue[u], sim.n_tti)
              for u in range(n_center)}
    per_sector = tuple(
        float(bits_per_ue[k * pop.ues_per_sector:(k + 1) * pop.ues_per_sector].sum()
              / (sim.n_tti * tti_s) / 1e6)
        for k in range(lay.sectors_per_site)
    )
    result = RunResult(
        label=scenario.aggregation.label,
        seed=plan.master_seed,
        n_tti=sim.n_tti,
        pf_policy=sim.pf_policy,
        per_ue_throughput_mbps=per_ue,
        per_sector_throughput_mbps=per_sector,
        cell_avg_throughput_mbps=float(np.mean(per_sector)),
        fairness_index=jain_index(per_ue.values()),
    )
    return result, artifacts


# ---------------------------------------------------------------------------
# Sweeps over CC combinations

@dataclass(frozen=True)
class SweepRow:
    label: str
    band_list: str
    bw_list: str
    total_bw_mhz: float
    seed: int
    cell_avg_mbps: float | None
    fairness: float | None
    pf_policy: str
    error: str | None = None


@dataclass(frozen=True)
class SweepAggregate:
    label: str
    band_list: str
    bw_list: str
    total_bw_mhz: float
    n_seeds: int
    mean_cell_avg_mbps: float
    std_cell_avg_mbps: float
    mean_fairness: float
    std_fairness: float
    pf_policy: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    aggregates: tuple
    results: dict  # (label, seed) -> RunResult for completed runs

    def aggregate_for(self, label: str) -> SweepAggregate:
        for agg in self.aggregates:
            if agg.label == label:
                return agg
        raise KeyError(label)

    def seed_values(self, label: str, attribute: str) -> list:
        return [getattr(row, attribute) for row in self.rows
                if row.label == label and row.error is None]


def _combo_fields(combo: AggregationConfig) -> tuple:
    bands = "|".join(f"{c.band.center_frequency_mhz:g}" for c in combo.carriers)
    bws = "|".join(f"{c.bandwidth_mhz:g}" for c in combo.carriers)
    return bands, bws, combo.total_bandwidth_mhz


def _run_task(task):
    index, scenario = task
    try:
        return index, run(scenario), None
    except Exception as exc:  # per-run failures must not abort the sweep
        return index, None, f"{type(exc).__name__}: {exc}"


def worker_count(n_tasks: int, workers: int | None = None) -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ScenarioError(
                f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from None
    if workers is not None:
        cap = min(cap, max(1, workers))
    return max(1, min(cap, n_tasks))


def run_combos(combos, seeds, base: ScenarioConfig | None = None,
               workers: int | None = None) -> SweepResult:
    """Run every (combination, seed) pair; gather deterministically by key."""
    combos = list(combos)
    seeds = list(seeds)
    if not combos:
        raise ScenarioError("combination enumeration empty")
    if not seeds:
        raise ScenarioError("at least one seed required")

    tasks = []
    keys = []
    for combo in combos:
        for seed in seeds:
            scenario = with_aggregation(base, combo, seed)
            keys.append((combo, seed, scenario.sim.pf_policy))
            tasks.append((len(tasks), scenario))

    outcomes: dict = {}
    n_workers = worker_count(len(tasks), workers)
    if n_workers <= 1:
        for task in tasks:
            index, result, error = _run_task(task)
            outcomes[index] = (result, error)
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            for index, result, error in pool.map(_run_task, tasks):
                outcomes[index] = (result, error)

    rows = []
    results: dict = {}
    for index, (combo, seed, policy) in enumerate(keys):
        bands, bws, total_bw = _combo_fields(combo)
        result, error = outcomes[index]
        if error is None:
            results[(combo.label, seed)] = result
            rows.append(SweepRow(combo.label, bands, bws, total_bw, seed,
                                 result.cell_avg_throughput_mbps,
                                 result.fairness_index, policy))
        else:
            rows.append(SweepRow(combo.label, bands, bws, total_bw, seed,
                                 None, None, policy, error=error))

    aggregates = []
    for combo in combos:
        bands, bws, total_bw = _combo_fields(combo)
        ok = [results[(combo.label, seed)] for seed in seeds
              if (combo.label, seed) in results]
        if not ok:
            continue
        throughputs = np.array([r.cell_avg_throughput_mbps for r in ok])
        fairness = np.array([r.fairness_index for r in ok])
        ddof = 1 if len(ok) > 1 else 0
        aggregates.append(SweepAggregate(
            label=combo.label, band_list=bands, bw_list=bws,
            total_bw_mhz=total_bw, n_seeds=len(ok),
            mean_cell_avg_mbps=float(throughputs.mean()),
            std_cell_avg_mbps=float(throughputs.std(ddof=ddof)),
            mean_fairness=float(fairness.mean()),
            std_fairness=float(fairness.std(ddof=ddof)),
            pf_policy=ok[0].pf_policy,
        ))
    return SweepResult(rows=tuple(rows), aggregates=tuple(aggregates),
                       results=results)


def run_sweep(allowed: dict, cc_counts, seeds, base: ScenarioConfig | None = None,
              inter_band_only: bool = True,
              workers: int | None = None) -> SweepResult:
    """Sweep the Cartesian product of enumerated combinations and seeds."""
    combos = []
    for n_cc in cc_counts:
        combos.extend(enumerate_combinations(allowed, n_cc, inter_band_only))
    return run_combos(combos, seeds, base=base, workers=workers)
