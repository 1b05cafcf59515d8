import itertools
import json

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from ca_netsim import scenario as scn
from ca_netsim.scenario import (AggregationConfig, CarrierSpec, ScenarioError,
                                default_tx_power_dbm, enumerate_combinations,
                                make_band, parse_scenario, rb_count,
                                scenario_to_json)

TABLE_1 = {1.4: 6, 3: 15, 5: 25, 10: 50, 15: 75, 20: 100}


def test_rb_count_table_exact():
    for bw, rbs in TABLE_1.items():
        assert rb_count(bw) == rbs


@pytest.mark.parametrize("bad", [7, 0, -5, 2.5, 25])
def test_rb_count_rejects_illegal_bandwidth(bad):
    with pytest.raises(ScenarioError, match="bandwidth"):
        rb_count(bad)


def test_default_tx_power_classes():
    assert default_tx_power_dbm(1.4) == 43.0
    assert default_tx_power_dbm(3) == 43.0
    assert default_tx_power_dbm(5) == 43.0
    assert default_tx_power_dbm(10) == 46.0
    # 15 MHz rides the >= 10 MHz class
    assert default_tx_power_dbm(15) == 46.0
    assert default_tx_power_dbm(20) == 46.0
    with pytest.raises(ScenarioError):
        default_tx_power_dbm(7)


def test_builtin_band_bindings():
    assert make_band(900).pathloss_model == "HATA_URBAN"
    assert make_band(900).antenna_gain_dbi == 16.0
    for f in (1800, 2100):
        assert make_band(f).pathloss_model == "COST231_HATA"
        assert make_band(f).antenna_gain_dbi == 18.0
    with pytest.raises(ScenarioError, match="binds"):
        make_band(900, pathloss_model="COST231_HATA")
    with pytest.raises(ScenarioError, match="not built in"):
        make_band(2600)


def test_custom_band_declaration():
    band = make_band(2600, pathloss_model="COST231_HATA", antenna_gain_dbi=18)
    assert band.center_frequency_mhz == 2600
    carrier = CarrierSpec.create(band, 20)
    assert carrier.tx_power_dbm == 46.0


MINIMAL_TOML = """
carriers = [{band=1800, bw=20}, {band=2100, bw=20}]
"""


def test_parse_defaults_match_tables():
    cfg = parse_scenario(MINIMAL_TOML)
    for carrier in cfg.aggregation.carriers:
        assert carrier.tx_power_dbm == 46.0
        assert carrier.n_rb == 100
    assert cfg.layout.sectors_per_site == 3
    assert cfg.layout.downtilt_deg == 8.0
    assert cfg.layout.azimuth_offset_deg == 30.0
    assert cfg.layout.site_height_m == 20.0
    assert cfg.population.rx_height_m == 1.5
    assert cfg.population.ue_speed_mps == pytest.approx(5 / 3.6)
    assert cfg.population.ue_antenna_gain_db == 0.0
    assert cfg.sim.feedback_delay_tti == 3
    assert cfg.sim.min_coupling_loss_db == 70.0
    assert cfg.sim.n_tti == 20
    assert cfg.sim.tti_ms == 1.0


def test_parse_accepts_json_rendering():
    data = {"carriers": [{"band": 1800, "bw": 20}, {"band": 2100, "bw": 20}]}
    cfg = parse_scenario(json.dumps(data))
    assert cfg.aggregation.label == "1800@20+2100@20"


def test_parse_rejects_900_above_cap():
    with pytest.raises(ScenarioError, match="900 MHz bandwidth cap"):
        parse_scenario("carriers = [{band=900, bw=20}]")


def test_parse_requires_carriers():
    with pytest.raises(ScenarioError, match="at least one carrier"):
        parse_scenario("carriers = []")
    with pytest.raises(ScenarioError, match="at least one carrier"):
        parse_scenario("seed = 1")


def test_parse_syntax_error_reports_position():
    with pytest.raises(ScenarioError, match=r"syntax error.*line 2"):
        parse_scenario("seed = 1\ncarriers = = [{band=1800, bw=20}]\n")
    with pytest.raises(ScenarioError, match=r"syntax error.*line"):
        parse_scenario('{"carriers": [}')  # JSON rendering, same contract


def test_parse_unknown_keys_are_named():
    with pytest.raises(ScenarioError, match="unknown key 'frobnicate'"):
        parse_scenario(MINIMAL_TOML + "frobnicate = 3\n")
    with pytest.raises(ScenarioError, match="unknown key 'layout.downtiltdeg'"):
        parse_scenario(MINIMAL_TOML + "layout.downtiltdeg = 8\n")


def test_parse_illegal_bandwidth_names_key():
    with pytest.raises(ScenarioError, match=r"carriers\[0\]"):
        parse_scenario("carriers = [{band=1800, bw=7}]")


def test_parse_validates_constraints():
    with pytest.raises(ScenarioError, match="isd_m"):
        parse_scenario(MINIMAL_TOML + "layout.isd_m = 60\n")  # < 2 * 35 m
    with pytest.raises(ScenarioError, match="seed"):
        parse_scenario(MINIMAL_TOML + "seed = -1\n")
    with pytest.raises(ScenarioError, match="pf_policy"):
        parse_scenario(MINIMAL_TOML + "sim.pf_policy = \"roundrobin\"\n")


def test_parse_serialize_roundtrip():
    text = """
seed = 11
bands = [{frequency_mhz=2600, pathloss_model="COST231_HATA", antenna_gain_dbi=17}]
carriers = [{band=2600, bw=15}, {band=900, bw=5, tx_power_dbm=40}]
pcc_index = 0
layout.isd_m = 750
layout.rings = 2
population.ues_per_sector = 4
sim.n_tti = 7
sim.pf_policy = "per_cc"
sim.fading_enabled = false
"""
    cfg = parse_scenario(text)
    assert parse_scenario(scenario_to_json(cfg)) == cfg


def test_pcc_defaults_to_lowest_frequency():
    cfg = parse_scenario("carriers = [{band=2100, bw=20}, {band=900, bw=10}]")
    assert cfg.aggregation.pcc_index == 1
    assert cfg.aggregation.mode_label == "2CC"


def test_aggregation_limits():
    band = make_band(1800)
    carriers = tuple(CarrierSpec.create(band, 20) for _ in range(6))
    with pytest.raises(ScenarioError, match="between 1 and 5"):
        AggregationConfig.create(carriers)
    with pytest.raises(ScenarioError, match="pcc_index"):
        AggregationConfig(carriers[:2], pcc_index=5)


def test_enumerate_single_choice_per_band():
    combos = enumerate_combinations({900: [10], 1800: [20], 2100: [20]}, 3)
    assert len(combos) == 1
    assert combos[0].label == "900@10+1800@20+2100@20"
    assert combos[0].pcc_index == 0


def test_enumerate_cartesian_count():
    combos = enumerate_combinations({1800: [10, 20], 2100: [10, 20]}, 2)
    assert len(combos) == 4
    labels = [c.label for c in combos]
    assert labels == sorted(labels)
    assert len(set(labels)) == 4


def test_enumerate_not_enough_bands():
    with pytest.raises(ScenarioError, match="exceeds"):
        enumerate_combinations({900: [5]}, 2)


def test_enumerate_intra_band_mode():
    combos = enumerate_combinations({1800: [10, 20]}, 2, inter_band_only=False)
    labels = {c.label for c in combos}
    assert labels == {"1800@10+1800@10", "1800@10+1800@20", "1800@20+1800@20"}
    assert all(c.is_intra_band for c in combos)


def _brute_force_count(allowed, n_cc):
    total = 0
    for bands in itertools.combinations(sorted(allowed), n_cc):
        size = 1
        for band in bands:
            size *= len(set(allowed[band]))
        total += size
    return total


BANDWIDTHS_900 = [1.4, 3, 5, 10]
BANDWIDTHS_HIGH = [1.4, 3, 5, 10, 15, 20]


@settings(max_examples=50, deadline=None)
@given(
    table=st.dictionaries(
        st.sampled_from([900.0, 1800.0, 2100.0]),
        st.lists(st.sampled_from(BANDWIDTHS_HIGH), min_size=1, max_size=3),
        min_size=1, max_size=3),
    n_cc=st.integers(min_value=1, max_value=3),
)
def test_enumerate_properties(table, n_cc):
    table = {f: ([b for b in bws if b <= 10] or [5]) if f == 900.0 else bws
             for f, bws in table.items()}
    if n_cc > len(table):
        with pytest.raises(ScenarioError):
            enumerate_combinations(table, n_cc)
        return
    combos = enumerate_combinations(table, n_cc)
    assert len(combos) == _brute_force_count(table, n_cc)
    keys = [tuple(c.sort_key for c in combo.carriers) for combo in combos]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    for combo in combos:
        assert combo.is_inter_band
        # re-validation: reconstructing must not raise
        AggregationConfig.create(combo.carriers, combo.pcc_index)


def test_scenario_dict_unknown_top_key():
    with pytest.raises(ScenarioError, match="unknown key"):
        scn.scenario_from_dict({"carriers": [{"band": 1800, "bw": 20}],
                                "bogus": 1})
