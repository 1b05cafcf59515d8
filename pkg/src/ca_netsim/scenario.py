"""Scenario model: bands, component carriers, aggregation configs, defaults.

A scenario document is a flat key-value file (TOML grammar, dotted section
keys) or the equivalent JSON object. Unspecified fields take the macro-cell
defaults: tri-sector sites, 30 deg azimuth offset, 8 deg downtilt, 3-TTI
feedback delay, 70 dB minimum coupling loss, 20 m sites, 1.5 m receivers.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ScenarioError(ValueError):
    """Invalid scenario document or parameter; the message names the key."""


HATA_URBAN = "HATA_URBAN"
COST231_HATA = "COST231_HATA"
PATHLOSS_MODELS = (HATA_URBAN, COST231_HATA)

# LTE channel bandwidth -> resource blocks
RB_PER_BANDWIDTH_MHZ = {1.4: 6, 3.0: 15, 5.0: 25, 10.0: 50, 15.0: 75, 20.0: 100}
LEGAL_BANDWIDTHS_MHZ = tuple(sorted(RB_PER_BANDWIDTH_MHZ))

MAX_CCS = 5
MAX_TOTAL_BANDWIDTH_MHZ = 100.0
MAX_BANDWIDTH_900_MHZ = 10.0


def rb_count(bandwidth_mhz: float) -> int:
    """Resource blocks for a legal LTE channel bandwidth (Table-exact)."""
    try:
        return RB_PER_BANDWIDTH_MHZ[float(bandwidth_mhz)]
    except (KeyError, TypeError, ValueError):
        raise ScenarioError(
            f"illegal bandwidth {bandwidth_mhz!r} MHz; legal values: "
            f"{', '.join(f'{b:g}' for b in LEGAL_BANDWIDTHS_MHZ)}"
        ) from None


def default_tx_power_dbm(bandwidth_mhz: float) -> float:
    """Transmit power class: 43 dBm up to 5 MHz, 46 dBm from 10 MHz up."""
    rb_count(bandwidth_mhz)  # reuse legality check
    return 43.0 if float(bandwidth_mhz) <= 5.0 else 46.0


@dataclass(frozen=True)
class Band:
    """A frequency band with its antenna gain and bound path-loss model."""

    center_frequency_mhz: float
    antenna_gain_dbi: float
    pathloss_model: str

    def __post_init__(self):
        if self.pathloss_model not in PATHLOSS_MODELS:
            raise ScenarioError(
                f"band {self.center_frequency_mhz:g}: unknown pathloss_model "
                f"{self.pathloss_model!r}; expected one of {PATHLOSS_MODELS}"
            )
        if self.center_frequency_mhz <= 0:
            raise ScenarioError("band center_frequency_mhz must be positive")


# 900 binds Okumura-Hata urban at 16 dBi; 1800/2100 bind COST231-Hata at 18 dBi.
BUILTIN_BANDS = {
    900.0: Band(900.0, 16.0, HATA_URBAN),
    1800.0: Band(1800.0, 18.0, COST231_HATA),
    2100.0: Band(2100.0, 18.0, COST231_HATA),
}


def make_band(frequency_mhz: float, pathloss_model: str | None = None,
              antenna_gain_dbi: float | None = None) -> Band:
    """Resolve a band: built-in 900/1800/2100, or fully explicit custom."""
    freq = float(frequency_mhz)
    builtin = BUILTIN_BANDS.get(freq)
    if builtin is not None:
        if pathloss_model is not None and pathloss_model != builtin.pathloss_model:
            raise ScenarioError(
                f"band {freq:g} binds pathloss model {builtin.pathloss_model}; "
                f"got {pathloss_model!r}"
            )
        gain = builtin.antenna_gain_dbi if antenna_gain_dbi is None else float(antenna_gain_dbi)
        return Band(freq, gain, builtin.pathloss_model)
    if pathloss_model is None or antenna_gain_dbi is None:
        raise ScenarioError(
            f"band {freq:g} is not built in; declare pathloss_model and "
            f"antenna_gain_dbi explicitly"
        )
    return Band(freq, float(antenna_gain_dbi), pathloss_model)


@dataclass(frozen=True)
class CarrierSpec:
    """One component carrier: band, bandwidth, transmit power, RB grid."""

    band: Band
    bandwidth_mhz: float
    tx_power_dbm: float
    n_rb: int

    def __post_init__(self):
        expected = rb_count(self.bandwidth_mhz)
        if self.n_rb != expected:
            raise ScenarioError(
                f"carrier {self.label}: n_rb {self.n_rb} does not match the "
                f"{self.bandwidth_mhz:g} MHz grid ({expected} RBs)"
            )
        if (self.band.center_frequency_mhz == 900.0
                and self.bandwidth_mhz > MAX_BANDWIDTH_900_MHZ):
            raise ScenarioError(
                f"carrier {self.label}: 900 MHz bandwidth cap exceeded "
                f"(max {MAX_BANDWIDTH_900_MHZ:g} MHz)"
            )

    @classmethod
    def create(cls, band: Band, bandwidth_mhz: float,
               tx_power_dbm: float | None = None) -> "CarrierSpec":
        bw = float(bandwidth_mhz)
        power = default_tx_power_dbm(bw) if tx_power_dbm is None else float(tx_power_dbm)
        return cls(band=band, bandwidth_mhz=bw, tx_power_dbm=power, n_rb=rb_count(bw))

    @property
    def label(self) -> str:
        return f"{self.band.center_frequency_mhz:g}@{self.bandwidth_mhz:g}"

    @property
    def sort_key(self) -> tuple:
        return (self.band.center_frequency_mhz, self.bandwidth_mhz)

    @property
    def per_rb_tx_power_dbm(self) -> float:
        """Transmit power spread evenly over the RB grid, in dBm per RB."""
        import math
        return self.tx_power_dbm - 10.0 * math.log10(self.n_rb)


@dataclass(frozen=True)
class AggregationConfig:
    """Ordered component carriers with a designated primary carrier."""

    carriers: tuple
    pcc_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "carriers", tuple(self.carriers))
        n = len(self.carriers)
        if not 1 <= n <= MAX_CCS:
            raise ScenarioError(
                f"carriers: need between 1 and {MAX_CCS} component carriers, got {n}"
                if n else "carriers: at least one carrier required"
            )
        total = self.total_bandwidth_mhz
        if total > MAX_TOTAL_BANDWIDTH_MHZ:
            raise ScenarioError(
                f"carriers: total aggregated bandwidth {total:g} MHz exceeds "
                f"{MAX_TOTAL_BANDWIDTH_MHZ:g} MHz"
            )
        if not 0 <= self.pcc_index < n:
            raise ScenarioError(f"pcc_index {self.pcc_index} out of range for {n} carriers")

    @classmethod
    def create(cls, carriers, pcc_index: int | None = None) -> "AggregationConfig":
        carriers = tuple(carriers)
        if pcc_index is None:
            if not carriers:
                raise ScenarioError("carriers: at least one carrier required")
            # PCC defaults to the lowest-frequency carrier (best coverage)
            pcc_index = min(range(len(carriers)),
                            key=lambda i: carriers[i].band.center_frequency_mhz)
        return cls(carriers=carriers, pcc_index=pcc_index)

    @property
    def total_bandwidth_mhz(self) -> float:
        return sum(c.bandwidth_mhz for c in self.carriers)

    @property
    def mode_label(self) -> str:
        return f"{len(self.carriers)}CC"

    @property
    def label(self) -> str:
        return "+".join(c.label for c in self.carriers)

    @property
    def is_inter_band(self) -> bool:
        freqs = {c.band.center_frequency_mhz for c in self.carriers}
        return len(freqs) == len(self.carriers)

    @property
    def is_intra_band(self) -> bool:
        freqs = {c.band.center_frequency_mhz for c in self.carriers}
        return len(freqs) == 1


@dataclass(frozen=True)
class LayoutConfig:
    inter_site_distance_m: float = 500.0
    rings: int = 1
    sectors_per_site: int = 3
    site_height_m: float = 20.0
    azimuth_offset_deg: float = 30.0
    downtilt_deg: float = 8.0


@dataclass(frozen=True)
class PopulationConfig:
    ues_per_sector: int = 10
    rx_height_m: float = 1.5
    ue_speed_mps: float = 5.0 / 3.6  # 5 km/h pedestrian
    ue_antenna_gain_db: float = 0.0
    min_ue_site_distance_m: float = 35.0
    max_ccs: int = MAX_CCS


# PF historical-rate accounting across carriers
PF_JOINT = "joint"
PF_PER_CC = "per_cc"
PF_POLICIES = (PF_JOINT, PF_PER_CC)


@dataclass(frozen=True)
class SimConfig:
    n_tti: int = 20
    tti_ms: float = 1.0
    feedback_delay_tti: int = 3
    min_coupling_loss_db: float = 70.0
    noise_figure_db: float = 9.0
    shadowing_sigma_db: float = 8.0
    pf_time_constant_tti: float = 50.0
    pf_policy: str = PF_JOINT
    fading_enabled: bool = True
    # truncated-Shannon rate map
    alpha: float = 0.6
    sinr_min_db: float = -10.0
    se_max: float = 4.4
    rb_bandwidth_hz: float = 180e3


@dataclass(frozen=True)
class ScenarioConfig:
    aggregation: AggregationConfig
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    population: PopulationConfig = field(default_factory=PopulationConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    seed: int | None = None

    def validate(self) -> "ScenarioConfig":
        lay, pop, sim = self.layout, self.population, self.sim
        checks = [
            (lay.inter_site_distance_m > 0, "layout.isd_m must be positive"),
            (lay.rings >= 0, "layout.rings must be >= 0"),
            (lay.sectors_per_site >= 1, "layout.sectors_per_site must be >= 1"),
            (lay.site_height_m > 0, "layout.site_height_m must be positive"),
            (pop.ues_per_sector >= 1, "population.ues_per_sector must be >= 1"),
            (pop.rx_height_m > 0, "population.rx_height_m must be positive"),
            (pop.ue_speed_mps >= 0, "population.ue_speed_mps must be >= 0"),
            (pop.min_ue_site_distance_m > 0,
             "population.min_ue_site_distance_m must be positive"),
            (pop.max_ccs >= 1, "population.max_ccs must be >= 1"),
            (lay.inter_site_distance_m > 2 * pop.min_ue_site_distance_m,
             "layout.isd_m must exceed twice population.min_ue_site_distance_m"),
            (sim.n_tti >= 1, "sim.n_tti: empty simulation (need n_tti >= 1)"),
            (sim.tti_ms == 1.0, "sim.tti_ms: only the 1 ms TTI is supported"),
            (sim.feedback_delay_tti >= 0, "sim.feedback_delay_tti must be >= 0"),
            (sim.min_coupling_loss_db >= 0, "sim.min_coupling_loss_db must be >= 0"),
            (sim.shadowing_sigma_db >= 0, "sim.shadowing_sigma_db must be >= 0"),
            (sim.pf_time_constant_tti >= 1, "sim.pf_time_constant_tti must be >= 1"),
            (sim.pf_policy in PF_POLICIES,
             f"sim.pf_policy must be one of {PF_POLICIES}"),
            (0 < sim.alpha <= 1.0, "sim.alpha must be in (0, 1]"),
            (sim.se_max > 0, "sim.se_max must be positive"),
            (sim.rb_bandwidth_hz > 0, "sim.rb_bandwidth_hz must be positive"),
        ]
        for ok, message in checks:
            if not ok:
                raise ScenarioError(message)
        if self.seed is not None and int(self.seed) < 0:
            raise ScenarioError("seed must be a non-negative integer")
        return self


# ---------------------------------------------------------------------------
# Scenario document schema

_LAYOUT_KEYS = {
    "isd_m": ("inter_site_distance_m", float),
    "rings": ("rings", int),
    "sectors_per_site": ("sectors_per_site", int),
    "site_height_m": ("site_height_m", float),
    "azimuth_offset_deg": ("azimuth_offset_deg", float),
    "downtilt_deg": ("downtilt_deg", float),
}
_POPULATION_KEYS = {
    "ues_per_sector": ("ues_per_sector", int),
    "rx_height_m": ("rx_height_m", float),
    "ue_speed_mps": ("ue_speed_mps", float),
    "ue_antenna_gain_db": ("ue_antenna_gain_db", float),
    "min_ue_site_distance_m": ("min_ue_site_distance_m", float),
    "max_ccs": ("max_ccs", int),
}
_SIM_KEYS = {
    "n_tti": ("n_tti", int),
    "tti_ms": ("tti_ms", float),
    "feedback_delay_tti": ("feedback_delay_tti", int),
    "min_coupling_loss_db": ("min_coupling_loss_db", float),
    "noise_figure_db": ("noise_figure_db", float),
    "shadowing_sigma_db": ("shadowing_sigma_db", float),
    "pf_time_constant_tti": ("pf_time_constant_tti", float),
    "pf_policy": ("pf_policy", str),
    "fading_enabled": ("fading_enabled", bool),
    "alpha": ("alpha", float),
    "sinr_min_db": ("sinr_min_db", float),
    "se_max": ("se_max", float),
    "rb_bandwidth_hz": ("rb_bandwidth_hz", float),
}
_TOP_KEYS = {"seed", "carriers", "pcc_index", "bands", "layout", "population", "sim"}
_CARRIER_KEYS = {"band", "bw", "tx_power_dbm"}
_BAND_KEYS = {"frequency_mhz", "pathloss_model", "antenna_gain_dbi"}


def _coerce(value, kind, key):
    if kind is bool:
        if not isinstance(value, bool):
            raise ScenarioError(f"{key}: expected a boolean, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"{key}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ScenarioError(f"{key}: expected a string, got {value!r}")
        return value
    raise AssertionError(kind)


def _build_section(data, section, key_map, cls):
    raw = data.get(section, {})
    if not isinstance(raw, dict):
        raise ScenarioError(f"{section}: expected a table of keys")
    kwargs = {}
    for key, value in raw.items():
        if key not in key_map:
            raise ScenarioError(f"unknown key '{section}.{key}'")
        attr, kind = key_map[key]
        kwargs[attr] = _coerce(value, kind, f"{section}.{key}")
    return cls(**kwargs)


def _parse_bands(data) -> dict:
    bands = dict(BUILTIN_BANDS)
    for i, entry in enumerate(data.get("bands", [])):
        if not isinstance(entry, dict):
            raise ScenarioError(f"bands[{i}]: expected a table")
        unknown = set(entry) - _BAND_KEYS
        if unknown:
            raise ScenarioError(f"unknown key 'bands[{i}].{sorted(unknown)[0]}'")
        if "frequency_mhz" not in entry:
            raise ScenarioError(f"bands[{i}]: frequency_mhz is required")
        freq = _coerce(entry["frequency_mhz"], float, f"bands[{i}].frequency_mhz")
        band = make_band(freq, entry.get("pathloss_model"),
                         entry.get("antenna_gain_dbi"))
        bands[freq] = band
    return bands


def _parse_carriers(data, bands) -> tuple:
    raw = data.get("carriers")
    if raw is None or raw == []:
        raise ScenarioError("carriers: at least one carrier required")
    if not isinstance(raw, list):
        raise ScenarioError("carriers: expected a list of tables")
    carriers = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ScenarioError(f"carriers[{i}]: expected a table like {{band=1800, bw=20}}")
        unknown = set(entry) - _CARRIER_KEYS
        if unknown:
            raise ScenarioError(f"unknown key 'carriers[{i}].{sorted(unknown)[0]}'")
        for required in ("band", "bw"):
            if required not in entry:
                raise ScenarioError(f"carriers[{i}]: '{required}' is required")
        freq = _coerce(entry["band"], float, f"carriers[{i}].band")
        if freq not in bands:
            raise ScenarioError(
                f"carriers[{i}].band: {freq:g} MHz is not a declared band"
            )
        bw = _coerce(entry["bw"], float, f"carriers[{i}].bw")
        power = entry.get("tx_power_dbm")
        if power is not None:
            power = _coerce(power, float, f"carriers[{i}].tx_power_dbm")
        try:
            carriers.append(CarrierSpec.create(bands[freq], bw, power))
        except ScenarioError as exc:
            raise ScenarioError(f"carriers[{i}]: {exc}") from None
    return tuple(carriers)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    """Build and validate a ScenarioConfig from a parsed document."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a table/object at top level")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"unknown key '{sorted(unknown)[0]}'")
    bands = _parse_bands(data)
    carriers = _parse_carriers(data, bands)
    pcc = data.get("pcc_index")
    if pcc is not None:
        pcc = _coerce(pcc, int, "pcc_index")
    aggregation = AggregationConfig.create(carriers, pcc)
    seed = data.get("seed")
    if seed is not None:
        seed = _coerce(seed, int, "seed")
    config = ScenarioConfig(
        aggregation=aggregation,
        layout=_build_section(data, "layout", _LAYOUT_KEYS, LayoutConfig),
        population=_build_section(data, "population", _POPULATION_KEYS, PopulationConfig),
        sim=_build_section(data, "sim", _SIM_KEYS, SimConfig),
        seed=seed,
    )
    return config.validate()


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse a scenario document (TOML key-value grammar or JSON object)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"syntax error: {exc}") from None
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"syntax error: {exc}") from None
    return scenario_from_dict(data)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Serialize to the document schema accepted by parse_scenario."""
    custom = [
        c.band for c in config.aggregation.carriers
        if BUILTIN_BANDS.get(c.band.center_frequency_mhz) != c.band
    ]
    data: dict = {}
    if config.seed is not None:
        data["seed"] = config.seed
    if custom:
        seen = set()
        data["bands"] = []
        for band in custom:
            if band.center_frequency_mhz in seen:
                continue
            seen.add(band.center_frequency_mhz)
            data["bands"].append({
                "frequency_mhz": band.center_frequency_mhz,
                "pathloss_model": band.pathloss_model,
                "antenna_gain_dbi": band.antenna_gain_dbi,
            })
    data["carriers"] = [
        {"band": c.band.center_frequency_mhz, "bw": c.bandwidth_mhz,
         "tx_power_dbm": c.tx_power_dbm}
        for c in config.aggregation.carriers
    ]
    data["pcc_index"] = config.aggregation.pcc_index
    lay, pop, sim = config.layout, config.population, config.sim
    data["layout"] = {key: getattr(lay, attr) for key, (attr, _) in _LAYOUT_KEYS.items()}
    data["population"] = {key: getattr(pop, attr)
                          for key, (attr, _) in _POPULATION_KEYS.items()}
    data["sim"] = {key: getattr(sim, attr) for key, (attr, _) in _SIM_KEYS.items()}
    return data


def scenario_to_json(config: ScenarioConfig) -> str:
    return json.dumps(scenario_to_dict(config), indent=2, sort_keys=True) + "\n"


def enumerate_combinations(allowed: dict, n_cc: int, inter_band_only: bool = True,
                           bands: dict | None = None) -> list:
    """Enumerate aggregation configs from a band -> bandwidth-list table.

    Returns configs in canonical order (band ascending, then bandwidth
    ascending, carrier-wise), duplicate-free, each with the PCC on the
    lowest-frequency carrier.
    """
    if not 1 <= n_cc <= MAX_CCS:
        raise ScenarioError(f"n_cc must be between 1 and {MAX_CCS}, got {n_cc}")
    if not allowed:
        raise ScenarioError("allowed band table must be non-empty")
    table = {}
    for freq, bws in allowed.items():
        bw_list = sorted({float(b) for b in bws})
        if not bw_list:
            raise ScenarioError(f"band {freq:g}: empty bandwidth list")
        table[float(freq)] = bw_list
    resolved = bands or {}
    band_of = {f: resolved.get(f) or make_band(f) for f in table}

    configs = []
    if inter_band_only:
        if n_cc > len(table):
            raise ScenarioError(
                f"n_cc={n_cc} exceeds the {len(table)} distinct bands available "
                f"for inter-band aggregation"
            )
        for freqs in itertools.combinations(sorted(table), n_cc):
            for bws in itertools.product(*(table[f] for f in freqs)):
                carriers = tuple(CarrierSpec.create(band_of[f], b)
                                 for f, b in zip(freqs, bws))
                configs.append(AggregationConfig.create(carriers))
    else:
        pool = sorted((f, b) for f in table for b in table[f])
        for combo in itertools.combinations_with_replacement(pool, n_cc):
            carriers = tuple(CarrierSpec.create(band_of[f], b) for f, b in combo)
            configs.append(AggregationConfig.create(carriers))
    configs.sort(key=lambda cfg: tuple(c.sort_key for c in cfg.carriers))
    return configs


def with_aggregation(base: ScenarioConfig | None, aggregation: AggregationConfig,
                     seed: int) -> ScenarioConfig:
    """A validated scenario using `base` for everything but carriers and seed."""
    if base is None:
        config = ScenarioConfig(aggregation=aggregation, seed=seed)
    else:
        config = replace(base, aggregation=aggregation, seed=seed)
    return config.validate()
