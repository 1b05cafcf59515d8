import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from ca_netsim.metrics import (RunResult, compare_runs, jain_index,
                               ue_throughput_mbps)


def test_jain_examples():
    assert jain_index([5, 5, 5, 5]) == pytest.approx(1.0, rel=1e-12)
    assert jain_index([7, 0, 0, 0]) == pytest.approx(0.25, rel=1e-12)
    assert jain_index([1, 2, 3]) == pytest.approx(36 / 42, rel=1e-12)


def test_jain_errors():
    with pytest.raises(ValueError):
        jain_index([])
    with pytest.raises(ValueError):
        jain_index([0.0, 0.0])
    with pytest.raises(ValueError):
        jain_index([1.0, -2.0])


positive_lists = st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=24)


@settings(max_examples=300, deadline=None)
@given(xs=positive_lists, c=st.floats(1e-6, 1e6))
def test_jain_scale_invariant(xs, c):
    assert jain_index([c * x for x in xs]) == pytest.approx(jain_index(xs),
                                                            rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(xs=positive_lists, seed=st.integers(0, 2**31))
def test_jain_permutation_invariant_and_bounded(xs, seed):
    rng = np.random.default_rng(seed)
    shuffled = list(xs)
    rng.shuffle(shuffled)
    base = jain_index(xs)
    assert jain_index(shuffled) == pytest.approx(base, rel=1e-12)
    n = len(xs)
    assert 1 / n - 1e-12 <= base <= 1 + 1e-12


@settings(max_examples=200, deadline=None)
@given(x=st.floats(1e-6, 1e6), n=st.integers(1, 24))
def test_jain_extremes(x, n):
    assert jain_index([x] * n) == pytest.approx(1.0, rel=1e-12)
    assert jain_index([x] + [0.0] * (n - 1)) == pytest.approx(1 / n, rel=1e-12)


def test_ue_throughput_examples():
    assert ue_throughput_mbps([1584] * 20) == pytest.approx(1.584, rel=1e-12)
    assert ue_throughput_mbps([0] * 20) == 0.0
    assert ue_throughput_mbps([1000] + [0] * 19) == pytest.approx(0.05, rel=1e-12)
    with pytest.raises(ValueError):
        ue_throughput_mbps([1, 2, 3], n_tti=5)


def _result(throughput, fairness, seed=1, label="x"):
    return RunResult(label=label, seed=seed, n_tti=20, pf_policy="joint",
                     per_ue_throughput_mbps={0: throughput},
                     per_sector_throughput_mbps=(throughput,),
                     cell_avg_throughput_mbps=throughput,
                     fairness_index=fairness)


def test_compare_runs_paper_pair():
    deltas = compare_runs(_result(71.6, 0.6), _result(79.93, 0.6))
    assert deltas["throughput_gain_pct"] == pytest.approx(11.634078212290522,
                                                          rel=1e-12)
    assert abs(deltas["throughput_gain_pct"] - 11.63) < 0.01


def test_compare_runs_identical():
    a = _result(50.0, 0.7)
    deltas = compare_runs(a, a)
    assert deltas == {"throughput_gain_pct": 0.0, "fairness_delta_pct": 0.0}


def test_compare_runs_fairness_decrease():
    deltas = compare_runs(_result(50.0, 0.60), _result(60.0, 0.49))
    assert deltas["fairness_delta_pct"] == pytest.approx(-18.333333333, rel=1e-9)


def test_compare_runs_zero_baseline():
    with pytest.raises(ValueError):
        compare_runs(_result(0.0, 0.5), _result(1.0, 0.5))


def test_run_result_dict_roundtrip():
    result = RunResult(label="900@10+1800@20", seed=3, n_tti=40,
                       pf_policy="per_cc",
                       per_ue_throughput_mbps={0: 1.25, 7: 0.5},
                       per_sector_throughput_mbps=(1.0, 0.75),
                       cell_avg_throughput_mbps=0.875,
                       fairness_index=0.9)
    assert RunResult.from_dict(result.to_dict()) == result
    with pytest.raises(ValueError):
        RunResult.from_dict({"label": "x"})
