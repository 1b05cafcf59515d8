"""Per-RB SINR, effective-SINR aggregation, and the MIMO rate map.

Rates follow the truncated Shannon bound per stream,
SE = min(alpha * log2(1 + SINR), SE_max) above the SINR cutoff, with
SE_max = 4.4 b/s/Hz matching the 64QAM ceiling after coding overhead.
The 2x2 closed-loop abstraction picks the better of rank 1 (3 dB
combining gain) and rank 2 (power split over two streams).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .seeds import rng_for

SPEED_OF_LIGHT_MPS = 299792458.0
FADING_PURPOSE = "fading"


@dataclass(frozen=True)
class RateMap:
    alpha: float = 0.6
    sinr_min_db: float = -10.0
    se_max: float = 4.4
    rb_bandwidth_hz: float = 180e3

    @property
    def sinr_min_linear(self) -> float:
        return 10.0 ** (self.sinr_min_db / 10.0)


DEFAULT_RATE_MAP = RateMap()


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value_linear):
    return 10.0 * np.log10(np.asarray(value_linear, dtype=float))


def noise_power_dbm(bandwidth_hz: float, noise_figure_db: float = 0.0) -> float:
    """Thermal noise floor: -174 dBm/Hz + 10 log10(B) + NF."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be positive")
    return -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def sinr_rb(serving_gain_db: float, serving_power_per_rb_dbm: float,
            interferers, noise_dbm: float, fading_offset_db: float = 0.0) -> float:
    """Linear SINR of one RB under full-buffer interference.

    Every interfering sector transmits on every RB at its full per-RB
    power; the fading offset applies to the serving link only.
    """
    serving_mw = 10.0 ** ((serving_gain_db + serving_power_per_rb_dbm
                           + fading_offset_db) / 10.0)
    denom_mw = 10.0 ** (noise_dbm / 10.0)
    for gain_db, power_dbm in interferers:
        denom_mw += 10.0 ** ((gain_db + power_dbm) / 10.0)
    return serving_mw / denom_mw


def effective_sinr(per_rb) -> float:
    """Mutual-information average: 2**mean(log2(1 + SINR_i)) - 1."""
    values = np.asarray(per_rb, dtype=float)
    if values.size == 0:
        raise ValueError("effective_sinr needs at least one RB")
    if np.any(values < 0):
        raise ValueError("linear SINR values must be >= 0")
    return float(2.0 ** np.mean(np.log2(1.0 + values)) - 1.0)


def spectral_efficiency(sinr_linear, rate_map: RateMap = DEFAULT_RATE_MAP):
    """Truncated-Shannon bits/s/Hz per stream; 0 below the cutoff."""
    sinr = np.asarray(sinr_linear, dtype=float)
    se = np.minimum(rate_map.alpha * np.log2(1.0 + sinr), rate_map.se_max)
    se = np.where(sinr < rate_map.sinr_min_linear, 0.0, se)
    return se if sinr.ndim else float(se)


def mimo_bits_per_rb(sinr_linear, rate_map: RateMap = DEFAULT_RATE_MAP,
                     tti_s: float = 1e-3):
    """Rank-adaptive 2x2 bits per RB per TTI.

    bits = B_rb * T_tti * max(SE(2*sinr), 2*SE(sinr/2)): rank 1 keeps both
    receive branches on one stream (+3 dB), rank 2 splits power across two
    capped streams.
    """
    sinr = np.asarray(sinr_linear, dtype=float)
    rank1 = spectral_efficiency(2.0 * sinr, rate_map)
    rank2 = 2.0 * np.asarray(spectral_efficiency(0.5 * sinr, rate_map))
    bits = rate_map.rb_bandwidth_hz * tti_s * np.maximum(rank1, rank2)
    return bits if sinr.ndim else float(bits)


def coherence_time_s(carrier_freq_mhz: float, ue_speed_mps: float) -> float:
    """Clarke coherence time 0.423 * c / (f * v); inf for a static UE."""
    if ue_speed_mps <= 0:
        return math.inf
    doppler_hz = carrier_freq_mhz * 1e6 * ue_speed_mps / SPEED_OF_LIGHT_MPS
    return 0.423 / doppler_hz


class FadingTrace:
    """Block-fading offsets of one (UE, carrier) link, addressed by indices.

    Rayleigh-power draws (mean linear power 1) are held over coherence
    blocks of ceil(T_c / TTI) ticks and repeat with the trace period.
    Values depend only on the generator stream and (tti, rb), never on
    query order.
    """

    def __init__(self, rng: np.random.Generator, carrier_freq_mhz: float,
                 ue_speed_mps: float, n_rb: int = 100, enabled: bool = True,
                 trace_length_s: float = 5.0, tti_s: float = 1e-3):
        self.n_trace_ttis = max(1, int(round(trace_length_s / tti_s)))
        self.enabled = enabled
        if not enabled:
            self.block_len_ttis = self.n_trace_ttis
            self.linear = np.ones((1, n_rb))
        else:
            t_c = coherence_time_s(carrier_freq_mhz, ue_speed_mps)
            if math.isinf(t_c):
                block = self.n_trace_ttis
            else:
                block = min(self.n_trace_ttis, max(1, math.ceil(t_c / tti_s)))
            self.block_len_ttis = block
            n_blocks = math.ceil(self.n_trace_ttis / block)
            self.linear = rng.exponential(1.0, size=(n_blocks, n_rb))

    def block_index(self, tti: int) -> int:
        return (tti % self.n_trace_ttis) // self.block_len_ttis

    def linear_gains(self, tti: int, n_rb: int | None = None) -> np.ndarray:
        row = self.linear[self.block_index(tti)]
        return row if n_rb is None else row[:n_rb]

    def offset_db(self, rb: int, tti: int) -> float:
        value = self.linear[self.block_index(tti), rb]
        return float(10.0 * np.log10(value)) if value > 0 else -math.inf


@lru_cache(maxsize=512)
def _trace_for(master_seed: int, ue_index: int, freq_khz: int,
               speed_key: int, enabled: bool) -> FadingTrace:
    rng = rng_for(master_seed, FADING_PURPOSE, ue_index, freq_khz)
    return FadingTrace(rng, freq_khz / 1000.0, speed_key / 1e6, enabled=enabled)


def fading_offset_db(master_seed: int, ue_index: int, carrier_freq_mhz: float,
                     rb: int, tti: int, ue_speed_mps: float,
                     enabled: bool = True) -> float:
    """Offset for one (UE, carrier, RB, TTI), pure in all its indices."""
    if not enabled:
        return 0.0
    trace = _trace_for(master_seed, ue_index, int(round(carrier_freq_mhz * 1000)),
                       int(round(ue_speed_mps * 1e6)), enabled)
    return trace.offset_db(rb, tti)
