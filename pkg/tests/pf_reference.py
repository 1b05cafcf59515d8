"""Sequential per-RB proportional-fair re-implementation for oracle checks.

Kept deliberately naive: loops over RBs and UEs, recomputing every metric
from scratch, so it shares no code path with the vectorized scheduler.
"""
from ca_netsim.link_abstraction import DEFAULT_RATE_MAP, mimo_bits_per_rb
from ca_netsim.scenario import PF_JOINT


def brute_force_schedule(ues, carriers, tti, link_oracle, feedback_delay_tti=3,
                         rate_map=DEFAULT_RATE_MAP, policy=PF_JOINT,
                         tti_s=1e-3):
    delayed_tti = tti - feedback_delay_tti if tti >= feedback_delay_tti else 0
    per_carrier = {}
    for ci, carrier in enumerate(carriers):
        members = sorted((ue for ue in ues if ci in ue.configured_ccs),
                         key=lambda ue: ue.ue_id)
        slots = []
        for rb in range(carrier.n_rb):
            best_metric = None
            best_ue = None
            for ue in members:
                sinr = float(link_oracle(ue.ue_id, ci, delayed_tti)[rb])
                rate = mimo_bits_per_rb(sinr, rate_map, tti_s)
                avg = ue.avg_rate if policy == PF_JOINT else ue.per_cc_avg_rate[ci]
                metric = rate / avg
                if best_metric is None or metric > best_metric:
                    best_metric, best_ue = metric, ue
            if best_ue is None:
                slots.append(None)
            else:
                true_sinr = float(link_oracle(best_ue.ue_id, ci, tti)[rb])
                slots.append((best_ue.ue_id,
                              mimo_bits_per_rb(true_sinr, rate_map, tti_s)))
        per_carrier[ci] = slots
    return per_carrier
