"""Throughput and fairness metrics over completed runs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def jain_index(throughputs) -> float:
    """Jain's fairness index (sum x)^2 / (n * sum x^2) over n >= 1 users.

    Equals 1 for perfect equality and 1/n when a single user takes all.
    """
    values = np.asarray(list(throughputs), dtype=float)
    if values.size == 0:
        raise ValueError("jain_index needs at least one user")
    if np.any(values < 0):
        raise ValueError("throughputs must be >= 0")
    total = float(values.sum())
    if total == 0.0:
        raise ValueError("jain_index is undefined for all-zero throughputs")
    return total * total / (values.size * float((values * values).sum()))


def ue_throughput_mbps(granted_bits_per_tti, n_tti: int | None = None) -> float:
    """Mbps over the run: total bits / (n_tti * 1 ms) / 1e6."""
    bits = list(granted_bits_per_tti)
    if n_tti is None:
        n_tti = len(bits)
    if n_tti < 1:
        raise ValueError("n_tti must be >= 1")
    if len(bits) != n_tti:
        raise ValueError(f"expected {n_tti} per-TTI entries, got {len(bits)}")
    return sum(bits) / (n_tti * 1e-3) / 1e6


@dataclass(frozen=True)
class RunResult:
    """Cell statistics summary of one simulation run."""

    label: str
    seed: int
    n_tti: int
    pf_policy: str
    per_ue_throughput_mbps: dict
    per_sector_throughput_mbps: tuple
    cell_avg_throughput_mbps: float
    fairness_index: float

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "seed": self.seed,
            "n_tti": self.n_tti,
            "pf_policy": self.pf_policy,
            "per_ue_throughput_mbps": {
                str(ue): value
                for ue, value in sorted(self.per_ue_throughput_mbps.items())
            },
            "per_sector_throughput_mbps": list(self.per_sector_throughput_mbps),
            "cell_avg_throughput_mbps": self.cell_avg_throughput_mbps,
            "fairness_index": self.fairness_index,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunResult":
        try:
            return cls(
                label=data["label"],
                seed=data["seed"],
                n_tti=data["n_tti"],
                pf_policy=data["pf_policy"],
                per_ue_throughput_mbps={
                    int(ue): float(value)
                    for ue, value in data["per_ue_throughput_mbps"].items()
                },
                per_sector_throughput_mbps=tuple(data["per_sector_throughput_mbps"]),
                cell_avg_throughput_mbps=float(data["cell_avg_throughput_mbps"]),
                fairness_index=float(data["fairness_index"]),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"not a run summary: {exc}") from None


def compare_runs(a: RunResult, b: RunResult) -> dict:
    """Relative throughput gain and fairness delta of b over a, in percent."""
    if a.cell_avg_throughput_mbps == 0:
        raise ValueError("baseline run has zero cell throughput")
    if a.fairness_index == 0:
        raise ValueError("baseline run has zero fairness index")
    gain = 100.0 * (b.cell_avg_throughput_mbps - a.cell_avg_throughput_mbps) \
        / a.cell_avg_throughput_mbps
    delta = 100.0 * (b.fairness_index - a.fairness_index) / a.fairness_index
    return {"throughput_gain_pct": gain, "fairness_delta_pct": delta}
