"""Per-TTI proportional-fair allocation over aggregated component carriers.

Each RB on each carrier goes independently to the configured UE with the
highest instantaneous-rate / average-rate ratio, where the instantaneous
rate comes from channel feedback delayed by the feedback lag and the
realized bits come from the true channel at transmission time. Average
rates update only at TTI boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .link_abstraction import DEFAULT_RATE_MAP, RateMap, mimo_bits_per_rb
from .scenario import PF_JOINT, PF_PER_CC, AggregationConfig

# bits/TTI floor that keeps PF metrics finite from the first TTI
EPSILON_RATE_FLOOR = 1.0


@dataclass
class UEContext:
    """Scheduler-side state of one UE."""

    ue_id: int
    serving_sector: int
    max_ccs: int = 5
    configured_ccs: tuple = ()
    avg_rate: float = EPSILON_RATE_FLOOR
    per_cc_avg_rate: dict = field(default_factory=dict)


def configure_ca(ue: UEContext, aggregation: AggregationConfig) -> UEContext:
    """Configure the UE on the PCC plus the first SCCs it can support.

    All configured SCells stay active for the whole run.
    """
    if ue.max_ccs < 1:
        raise ValueError("max_ccs must be >= 1")
    n = len(aggregation.carriers)
    order = [aggregation.pcc_index] + [i for i in range(n)
                                       if i != aggregation.pcc_index]
    configured = tuple(sorted(order[:ue.max_ccs]))
    return replace(
        ue,
        configured_ccs=configured,
        per_cc_avg_rate={i: EPSILON_RATE_FLOOR for i in configured},
    )


def pf_metric(inst_rate: float, avg_rate: float) -> float:
    if avg_rate < EPSILON_RATE_FLOOR:
        raise ValueError("avg_rate must stay at or above the epsilon floor")
    return inst_rate / avg_rate


def update_average(avg_rate: float, realized_bits: float,
                   time_constant_tti: float,
                   floor: float = EPSILON_RATE_FLOOR) -> float:
    """Exponential smoothing (1 - 1/tc) * avg + (1/tc) * realized, floored."""
    if time_constant_tti < 1:
        raise ValueError("time_constant_tti must be >= 1")
    beta = 1.0 / time_constant_tti
    return max((1.0 - beta) * avg_rate + beta * realized_bits, floor)


@dataclass
class Allocation:
    """Per-TTI, per-carrier mapping of RB index -> (ue_id, bits granted)."""

    tti: int
    per_carrier: dict  # carrier index -> list of (ue_id, bits) or None per RB

    def bits_by_ue(self) -> dict:
        totals: dict = {}
        for slots in self.per_carrier.values():
            for slot in slots:
                if slot is not None:
                    totals[slot[0]] = totals.get(slot[0], 0.0) + slot[1]
        return totals

    def bits_by_ue_on_carrier(self, carrier_index: int) -> dict:
        totals: dict = {}
        for slot in self.per_carrier.get(carrier_index, []):
            if slot is not None:
                totals[slot[0]] = totals.get(slot[0], 0.0) + slot[1]
        return totals

    def total_bits(self) -> float:
        return sum(self.bits_by_ue().values())


def schedule_tti(ues, carriers, tti: int, link_oracle,
                 feedback_delay_tti: int = 3,
                 rate_map: RateMap = DEFAULT_RATE_MAP,
                 policy: str = PF_JOINT, tti_s: float = 1e-3) -> Allocation:
    """One proportional-fair TTI over all carriers of one cell.

    `link_oracle(ue_id, carrier_index, tti)` returns the true per-RB linear
    SINR vector. The PF metric uses the snapshot from
    `tti - feedback_delay_tti` (the TTI-0 snapshot before that); realized
    bits use the true SINR. Ties go to the lowest ue_id.
    """
    if tti < 0:
        raise ValueError("tti must be >= 0")
    if policy not in (PF_JOINT, PF_PER_CC):
        raise ValueError(f"unknown PF policy {policy!r}")
    delayed_tti = tti - feedback_delay_tti if tti >= feedback_delay_tti else 0

    per_carrier: dict = {}
    for ci, carrier in enumerate(carriers):
        configured = sorted((ue for ue in ues if ci in ue.configured_ccs),
                            key=lambda ue: ue.ue_id)
        if not configured:
            per_carrier[ci] = [None] * carrier.n_rb
            continue
        delayed = np.stack([
            np.asarray(link_oracle(ue.ue_id, ci, delayed_tti), dtype=float)
            for ue in configured
        ])
        inst_bits = np.asarray(mimo_bits_per_rb(delayed, rate_map, tti_s))
        if policy == PF_JOINT:
            avgs = np.array([ue.avg_rate for ue in configured])
        else:
            avgs = np.array([ue.per_cc_avg_rate[ci] for ue in configured])
        metric = inst_bits / avgs[:, None]
        winners = np.argmax(metric, axis=0)  # first max -> lowest ue_id

        true = np.stack([
            np.asarray(link_oracle(ue.ue_id, ci, tti), dtype=float)
            for ue in configured
        ])
        true_bits = np.asarray(mimo_bits_per_rb(true, rate_map, tti_s))
        per_carrier[ci] = [
            (configured[w].ue_id, float(true_bits[w, rb]))
            for rb, w in enumerate(winners)
        ]
    return Allocation(tti=tti, per_carrier=per_carrier)


def update_cell_averages(ues, allocation: Allocation, time_constant_tti: float,
                         policy: str = PF_JOINT) -> None:
    """TTI-boundary update of every UE's smoothed rate(s), in place."""
    totals = allocation.bits_by_ue()
    per_cc = {ci: allocation.bits_by_ue_on_carrier(ci)
              for ci in allocation.per_carrier}
    for ue in ues:
        ue.avg_rate = update_average(ue.avg_rate, totals.get(ue.ue_id, 0.0),
                                     time_constant_tti)
        if policy == PF_PER_CC:
            for ci in ue.configured_ccs:
                ue.per_cc_avg_rate[ci] = update_average(
                    ue.per_cc_avg_rate[ci],
                    per_cc.get(ci, {}).get(ue.ue_id, 0.0),
                    time_constant_tti,
                )
