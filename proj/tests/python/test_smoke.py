import math

import pytest

import agesim

BASE_CFG = {
    "network": {"random_bits": {"rho": 0.5, "blocks": 20}},
    "accelerator": {"kind": "baseline", "f": 8, "N": 2, "memory_bytes": 1024},
    "policy": {"kind": "none"},
    "inferences": 1,
    "seed": 11,
}


def test_version():
    assert isinstance(agesim.__version__, str)
    assert agesim.__version__


def test_duty_deviation_reference_point():
    got = agesim.p_duty_deviation(20, 0.5, 6)
    assert math.isclose(got, 120920 / 1048576, rel_tol=1e-12)
    assert agesim.p_duty_deviation(20, 0.5, 10) == 1.0


def test_tail_probability():
    assert agesim.p_at_least_n(20, 0.5, 6, 8192, 0) == 1.0
    p = agesim.p_at_least_n(20, 0.5, 6, 8192, 900)
    assert 0.0 < p < 1.0


def test_deviation_curve_is_cumulative():
    curve = agesim.deviation_curve(20, 0.5)
    assert [b for b, _, _ in curve] == list(range(11))
    ps = [p for _, _, p in curve]
    assert all(lo <= hi for lo, hi in zip(ps, ps[1:]))
    assert ps[-1] == 1.0


def test_snm_degradation():
    assert agesim.snm_degradation(0.5) == 10.82
    assert agesim.snm_degradation(0.0) == 26.12
    assert agesim.snm_degradation(1.0) == 26.12
    assert math.isclose(agesim.snm_degradation(0.75), 18.47, rel_tol=1e-12)
    assert agesim.snm_degradation(0.5, best=5.0, worst=7.0) == 5.0


def test_bit_probabilities():
    assert agesim.bit_probabilities([0xFF, 0x00], 8) == [0.5] * 8
    assert agesim.bit_probabilities([0b01], 2) == [1.0, 0.0]


def test_run_summary():
    out = agesim.run(BASE_CFG)
    assert out["tool"] == "agesim"
    assert out["version"] == agesim.__version__
    assert len(out["config_hash"]) == 16
    assert out["k_inf"] == 20
    assert out["k_total"] == 20
    assert out["geometry"]["cells"] == 8192
    assert 0.45 < out["duty"]["mean"] < 0.55
    assert sum(out["histogram"]["counts"]) == 8192


def test_run_is_deterministic():
    assert agesim.run(BASE_CFG) == agesim.run(BASE_CFG)


def test_run_seed_changes_result():
    other = dict(BASE_CFG, seed=12)
    assert agesim.run(BASE_CFG) != agesim.run(other)


def test_bad_config_raises():
    with pytest.raises(Exception, match="network"):
        agesim.run({"network": {}})
