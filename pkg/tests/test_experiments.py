import math

import pytest

from edsketch import experiments


def test_wilson_interval_basics():
    lo, hi = experiments.wilson_interval(0, 10)
    assert lo == 0.0 and hi < 0.35
    lo, hi = experiments.wilson_interval(10, 10)
    assert hi == 1.0 and lo > 0.65
    lo, hi = experiments.wilson_interval(50, 100)
    assert lo < 0.5 < hi
    with pytest.raises(ValueError):
        experiments.wilson_interval(0, 0)


def test_wilson_interval_narrows():
    lo1, hi1 = experiments.wilson_interval(50, 100)
    lo2, hi2 = experiments.wilson_interval(500, 1000)
    assert hi2 - lo2 < hi1 - lo1


def test_registry_names():
    expected = {"gambler_ruin", "cgk_tail", "claim_3_8", "prop_3_9",
                "lemma_2_13", "progress_transitions", "adversarial_excess",
                "size_scaling", "walk_through", "roundtrip"}
    assert set(experiments.REGISTRY) == expected


def test_unknown_experiment_raises():
    with pytest.raises(KeyError):
        experiments.run_experiment("nope", 1)


def test_gambler_ruin_small():
    rep = experiments.run_experiment("gambler_ruin", 1, a=2, b=3, trials=400)
    assert rep.trials == 400
    assert rep.ci_low <= rep.estimate <= rep.ci_high
    assert abs(rep.estimate - 0.4) < 0.15
    assert rep.details["expected_steps"] == 12
    assert rep.rows  # per-trial rows are available for CSV export


def test_size_scaling_small():
    rep = experiments.run_experiment("size_scaling", 1, n=256, ks=(2, 4))
    assert rep.estimate == rep.details["slope"]
    sizes = rep.details["bytes_by_k"]
    assert sizes[4] > sizes[2]


def test_roundtrip_small():
    rep = experiments.run_experiment("roundtrip", 3, n=128, k=2, trials=4, tau=4)
    assert rep.trials == 4
    assert rep.estimate == 1.0


def test_report_json_shape():
    rep = experiments.run_experiment("gambler_ruin", 2, a=2, b=2, trials=50)
    d = rep.to_json_dict()
    for field in ("experiment", "params", "trials", "estimate", "ci_low",
                  "ci_high", "runtime_ms"):
        assert field in d
    assert not math.isnan(d["estimate"])
