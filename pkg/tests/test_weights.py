import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hillgaps.weights import (WeightError, check_I0, check_I_minus1, check_M0, check_M_minus1,
                              custom_weight, domination_constant, exp_weight, inv_linear_log_weight,
                              parse_weight, power_weight, powerlog_weight)


def test_power_weight_values():
    assert np.all(power_weight(0)(np.arange(-5, 6)) == 1)
    assert power_weight(1)(3) == 4
    assert power_weight(-1)(9) == pytest.approx(0.1, rel=1e-15)
    assert power_weight(2)(-3) == 16


def test_log_matches_value():
    k = np.arange(0, 500, dtype=float)
    for w in (power_weight(1.5), powerlog_weight(0.5, 1), inv_linear_log_weight(), exp_weight(0.3)):
        assert np.allclose(w.log(k), np.log(w(k)), rtol=1e-13, atol=1e-13)


def test_parse_weight():
    assert parse_weight("power:2")(1) == 4
    assert parse_weight("powerlog:0.5:1")(0) == pytest.approx(1.0)
    assert parse_weight("inv-linear-log")(0) == pytest.approx(1.0)
    assert parse_weight("exp:1")(2) == pytest.approx(np.e ** 2)
    for bad in ("power", "cube:1", "power:x"):
        with pytest.raises(WeightError):
            parse_weight(bad)


def test_I0_power_half():
    rep = check_I0(power_weight(0.5), 0.5, 2 ** 16)
    assert rep.consistent
    assert 1 <= rep.witnesses["C1"] <= 2 ** 0.5 + 1e-12
    assert rep.witnesses["C2"] <= 2 ** 0.5 + 1e-12


def test_I0_powerlog_against_block_scan():
    k_max = 2 ** 20
    w = powerlog_weight(0.5, 1)
    # oracle: block extrema of w/k^0.5 and w/k^1.5 computed directly
    k = np.arange(1, k_max + 1, dtype=float)
    v = (1 + k) ** 0.5 * np.log(np.e + k)
    lo_min = [np.min(v[2 ** j - 1:2 ** (j + 1) - 1] / k[2 ** j - 1:2 ** (j + 1) - 1] ** 0.5) for j in range(20)]
    hi_max = [np.max(v[2 ** j - 1:2 ** (j + 1) - 1] / k[2 ** j - 1:2 ** (j + 1) - 1] ** 1.5) for j in range(20)]
    assert np.all(np.diff(lo_min) > 0)          # bounded below: increasing
    assert np.all(np.diff(hi_max[4:]) < 0)      # bounded above: eventually decreasing
    assert check_I0(w, 0.5, k_max).consistent


def test_I0_exponential_violated():
    rep = check_I0(exp_weight(np.log(2)), 1, 2 ** 16)
    assert rep.verdict == "violated"
    k = rep.witnesses["index"]
    assert k * np.log(2) - 2 * np.log(k) > 10


def test_I0_rejects_negative_s():
    with pytest.raises(WeightError):
        check_I0(power_weight(-0.5), -0.5, 100)


def test_M0_examples():
    assert check_M0(power_weight(1), 2 ** 16).consistent
    rep = check_M0(exp_weight(1.0), 2 ** 16)
    assert rep.verdict == "violated"
    assert rep.witnesses["condition"] == "subexponentiality"
    assert check_M0(custom_weight(lambda k: np.log(np.e + k), "log(e+k)"), 2 ** 16).consistent


def test_M0_log_weight_exhaustive_pairs():
    # brute force over all k + m <= 2^12, independent of the sampled grid
    n = 2 ** 12
    logw = np.log(np.log(np.e + np.arange(0, n + 1, dtype=float)))
    k = np.arange(1, n)
    worst = -np.inf
    for kk in k:
        m = np.arange(1, n - kk + 1)
        worst = max(worst, np.max(logw[kk + m] - logw[kk] - logw[m]))
    assert worst <= 0
    assert check_M0(custom_weight(lambda x: np.log(np.e + x), "log(e+k)"), n).consistent


def test_M0_witnesses_reproduce():
    rep = check_M0(custom_weight(lambda k: np.exp(k ** 2 / 100.0), "gauss",
                                 log_fn=lambda k: k ** 2 / 100.0), 1000)
    assert rep.witnesses["condition"] == "submultiplicativity"
    k, m = rep.witnesses["pair"]
    assert (k + m) ** 2 > k ** 2 + m ** 2

    w = custom_weight(lambda k: 2 + np.sin(k), "wobble")
    rep = check_M0(w, 100)
    assert rep.witnesses["condition"] == "monotonicity"
    i = rep.witnesses["index"]
    assert w(i + 1) < w(i)


def test_I_minus1_cases():
    rep = check_I_minus1(power_weight(-1), -1, 2 ** 16)
    assert rep.consistent and rep.witnesses["case"] == "i"
    rep = check_I_minus1(power_weight(-0.5), -0.5, 2 ** 20, delta=0.1)
    assert rep.consistent and rep.witnesses["case"] == "ii"
    rep = check_I_minus1(power_weight(2), 2, 2 ** 16)
    assert rep.consistent and rep.witnesses["case"] == "iii"
    assert check_I_minus1(power_weight(-0.9), -1, 1000).verdict == "violated"
    with pytest.raises(WeightError):
        check_I_minus1(power_weight(-0.5), -0.5, 1000)


def test_I_minus1_case_iii_matches_I0():
    for w, s in ((power_weight(2), 2), (exp_weight(0.1), 1), (powerlog_weight(0.5, 1), 0.5)):
        a, b = check_I0(w, s, 2 ** 14), check_I_minus1(w, s, 2 ** 14)
        assert a.verdict == b.verdict
        assert a.witnesses["C1"] == b.witnesses["C1"] and a.witnesses["C2"] == b.witnesses["C2"]


def test_M_minus1_examples():
    assert check_M_minus1(inv_linear_log_weight(), 2 ** 16).consistent
    assert check_M_minus1(power_weight(-1), 2 ** 16).verdict == "violated"
    assert check_M_minus1(power_weight(0), 2 ** 16).consistent


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 4), st.floats(-2, 4))
def test_power_weight_ordering(s1, s2):
    s1, s2 = max(s1, s2), min(s1, s2)
    k = np.arange(0, 1000)
    assert np.all(power_weight(s1)(k) >= power_weight(s2)(k))


def test_domination_constant():
    assert domination_constant(power_weight(2), power_weight(1), 4096) == 1.0
    assert domination_constant(power_weight(1), power_weight(1), 4096) == 1.0
    assert domination_constant(power_weight(1), power_weight(2), 4096) is None
