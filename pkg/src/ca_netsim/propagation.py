"""Large-scale link gain: empirical path loss, sector pattern, shadowing.

Path loss uses the Okumura-Hata urban formula at 900 MHz and COST231-Hata
at 1800/2100 MHz, both with the small/medium-city mobile-antenna
correction. The sector antenna is the standard parabolic pattern
(theta_3dB = 70 deg, Am = 25 dB horizontally; phi_3dB = 10 deg,
SLA_v = 20 dB vertically). Total loss is floored at the minimum coupling
loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import geometry
from .scenario import COST231_HATA, HATA_URBAN, CarrierSpec, ScenarioConfig
from .seeds import rng_for

# parabolic sector pattern constants
THETA_3DB_DEG = 70.0
A_MAX_DB = 25.0
PHI_3DB_DEG = 10.0
SLA_V_DB = 20.0

# classical validity windows of the Hata family
HATA_FREQ_RANGE_MHZ = (150.0, 1500.0)
COST231_FREQ_RANGE_MHZ = (1500.0, 2000.0)
DISTANCE_RANGE_KM = (1.0, 20.0)
BS_HEIGHT_RANGE_M = (30.0, 200.0)
MS_HEIGHT_RANGE_M = (1.0, 10.0)

SHADOWING_PURPOSE = "shadowing"


class ModelRangeError(ValueError):
    """Inputs fall outside the model's validity range (strict mode only)."""


@dataclass(frozen=True)
class LinkGain:
    """Composed large-scale budget of one (UE, sector, carrier) link."""

    pathloss_db: float
    antenna_attenuation_db: float
    shadowing_db: float
    total_gain_db: float
    extrapolated: bool


def hata_correction_db(f_mhz: float, hm_m: float) -> float:
    """Small/medium-city mobile antenna correction a(hm)."""
    lf = math.log10(f_mhz)
    return (1.1 * lf - 0.7) * hm_m - (1.56 * lf - 0.8)


def _check_positive(f_mhz, d_km, hb_m, hm_m):
    if f_mhz <= 0 or d_km <= 0 or hb_m <= 0 or hm_m <= 0:
        raise ValueError("frequency, distance and heights must be positive")


def pathloss_violations(model: str, f_mhz: float, d_km: float, hb_m: float,
                        hm_m: float) -> list:
    """Validity-range violations; a non-empty list marks extrapolation."""
    f_lo, f_hi = HATA_FREQ_RANGE_MHZ if model == HATA_URBAN else COST231_FREQ_RANGE_MHZ
    out = []
    if not f_lo <= f_mhz <= f_hi:
        out.append(f"frequency {f_mhz:g} MHz outside [{f_lo:g}, {f_hi:g}]")
    if not DISTANCE_RANGE_KM[0] <= d_km <= DISTANCE_RANGE_KM[1]:
        out.append(f"distance {d_km:g} km outside {DISTANCE_RANGE_KM}")
    if not BS_HEIGHT_RANGE_M[0] <= hb_m <= BS_HEIGHT_RANGE_M[1]:
        out.append(f"BS height {hb_m:g} m outside {BS_HEIGHT_RANGE_M}")
    if not MS_HEIGHT_RANGE_M[0] <= hm_m <= MS_HEIGHT_RANGE_M[1]:
        out.append(f"MS height {hm_m:g} m outside {MS_HEIGHT_RANGE_M}")
    return out


def hata_urban(f_mhz: float, d_km: float, hb_m: float, hm_m: float,
               strict: bool = False) -> float:
    """Okumura-Hata urban path loss in dB.

    L = 69.55 + 26.16 log10(f) - 13.82 log10(hb) - a(hm)
        + (44.9 - 6.55 log10(hb)) log10(d)
    """
    _check_positive(f_mhz, d_km, hb_m, hm_m)
    if strict:
        violations = pathloss_violations(HATA_URBAN, f_mhz, d_km, hb_m, hm_m)
        if violations:
            raise ModelRangeError("; ".join(violations))
    return (69.55 + 26.16 * math.log10(f_mhz) - 13.82 * math.log10(hb_m)
            - hata_correction_db(f_mhz, hm_m)
            + (44.9 - 6.55 * math.log10(hb_m)) * math.log10(d_km))


def cost231_hata(f_mhz: float, d_km: float, hb_m: float, hm_m: float,
                 metro_correction_db: float = 0.0, strict: bool = False) -> float:
    """COST231-Hata path loss in dB; metro correction is 0 or 3 dB."""
    _check_positive(f_mhz, d_km, hb_m, hm_m)
    if metro_correction_db not in (0.0, 3.0):
        raise ValueError("metro_correction_db must be 0 or 3")
    if strict:
        violations = pathloss_violations(COST231_HATA, f_mhz, d_km, hb_m, hm_m)
        if violations:
            raise ModelRangeError("; ".join(violations))
    return (46.3 + 33.9 * math.log10(f_mhz) - 13.82 * math.log10(hb_m)
            - hata_correction_db(f_mhz, hm_m)
            + (44.9 - 6.55 * math.log10(hb_m)) * math.log10(d_km)
            + metro_correction_db)


def pathloss_db(band, d_km: float, hb_m: float, hm_m: float,
                strict: bool = False) -> float:
    """Band-selected path loss (HATA_URBAN or COST231_HATA)."""
    f = band.center_frequency_mhz
    if band.pathloss_model == HATA_URBAN:
        return hata_urban(f, d_km, hb_m, hm_m, strict=strict)
    return cost231_hata(f, d_km, hb_m, hm_m, strict=strict)


def antenna_attenuation_db(horizontal_offset_deg: float,
                           vertical_offset_deg: float,
                           downtilt_deg: float) -> float:
    """Sector pattern attenuation, non-negative, capped at 25 dB."""
    a_h = min(12.0 * (horizontal_offset_deg / THETA_3DB_DEG) ** 2, A_MAX_DB)
    a_v = min(12.0 * ((vertical_offset_deg - downtilt_deg) / PHI_3DB_DEG) ** 2,
              SLA_V_DB)
    return min(a_h + a_v, A_MAX_DB)


def shadowing_sample_db(ue_index: int, site_index: int, sigma_db: float,
                        master_seed: int) -> float:
    """Log-normal shadowing draw keyed by (seed, UE, site).

    One independent value per (UE, site) pair, shared by every sector and
    carrier of that site; reproducible regardless of evaluation order.
    """
    if sigma_db < 0:
        raise ValueError("sigma_db must be >= 0")
    if sigma_db == 0:
        return 0.0
    rng = rng_for(master_seed, SHADOWING_PURPOSE, ue_index, site_index)
    return float(rng.normal(0.0, sigma_db))


def link_gain(ue, sector, site, carrier: CarrierSpec, scenario: ScenarioConfig,
              shadowing_db: float) -> LinkGain:
    """Compose the large-scale gain of one (UE, sector, carrier) link.

    total_gain = -(pathloss + antenna attenuation + shadowing)
                 + BS gain + UE gain, then floored so total loss stays at
    or above the minimum coupling loss.
    """
    h_off, v_off = geometry.angles(sector, site, ue)
    d_km = geometry.horizontal_distance_m(site, ue) / 1000.0
    band = carrier.band
    loss = pathloss_db(band, d_km, site.z, ue.z)
    attenuation = antenna_attenuation_db(h_off, v_off, scenario.layout.downtilt_deg)
    gain = (-loss - attenuation - shadowing_db
            + band.antenna_gain_dbi + scenario.population.ue_antenna_gain_db)
    clamped = min(gain, -scenario.sim.min_coupling_loss_db)
    extrapolated = bool(pathloss_violations(
        band.pathloss_model, band.center_frequency_mhz, d_km, site.z, ue.z))
    return LinkGain(
        pathloss_db=loss,
        antenna_attenuation_db=attenuation,
        shadowing_db=shadowing_db,
        total_gain_db=clamped,
        extrapolated=extrapolated,
    )
