import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markov_redundancy.bounds import (
    BOUNDS_COLUMNS,
    bounds_row,
    clamped,
    davisson_bound,
    davisson_crossing,
    davisson_positive_from,
    davisson_threshold,
    h_theta_given_xn_upper,
    h_theta_lower,
    lower_bound_thm1,
    n_star,
    tau_rel_floor,
    thm1_crossing,
    upper_bound_thm2,
    var_bound,
)
from markov_redundancy.errors import NonConvergenceError

L2E = 1 / math.log(2)


def thm2_oracle(k, n):
    return (2 * k * k / n) * np.log2(n / k**2 + 1) + k * k / n + (np.log2(k) + 3) / n


def thm1_oracle(k, n, c):
    p = k * (k - 1)
    t1 = p / (4 * n) * math.log(2 * (n - 1) / p) * L2E
    t2 = p / (4 * n) * math.log(math.e / (16 * math.pi * (1 + (2 + c) / math.sqrt(k)))) * L2E
    return t1 + t2 - math.log(k) * L2E / n


def davisson_oracle(k, n, C):
    p = k * (k - 1)
    inner = C / (1 - math.sqrt(1 - 1 / (4 * k**4)))
    return p / (2 * n) * math.log2(n) + p / n * math.log2(k**-4) - p / (2 * n) * math.log2(inner)


def test_thm2_examples():
    assert upper_bound_thm2(2, 100) == pytest.approx(0.08 * math.log2(26) + 0.04 + 0.04, abs=1e-15)
    assert upper_bound_thm2(2, 100) == pytest.approx(0.456, abs=5e-4)
    for k in (4, 16, 64):
        assert upper_bound_thm2(k, k * k) == pytest.approx(3 + (math.log2(k) + 3) / k**2, abs=1e-12)


@pytest.mark.parametrize("k", [2, 8, 32])
def test_thm2_decreasing_tail(k):
    n0 = math.ceil(math.e * k * k)
    ns = np.unique(np.geomspace(n0, n0 * 10**6, 400).astype(np.int64))
    vals = [upper_bound_thm2(k, int(n)) for n in ns]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    ns = [2**j for j in range(1, 17)]
    assert upper_bound_thm2(k, ns[-1]) < upper_bound_thm2(k, ns[-2])


@given(st.integers(2, 200), st.integers(2, 10**9))
def test_thm2_matches_oracle(k, n):
    assert upper_bound_thm2(k, n) == pytest.approx(thm2_oracle(k, n), rel=1e-12)


def test_thm1_examples():
    assert lower_bound_thm1(10, 10**4, 1) == pytest.approx(0.0056, abs=5e-5)
    assert lower_bound_thm1(10, 10**4, 1) == pytest.approx(thm1_oracle(10, 10**4, 1), rel=1e-12)
    assert lower_bound_thm1(10, 100, 1) < 0
    assert clamped(lower_bound_thm1(10, 100, 1)) == 0.0


@given(st.integers(2, 100), st.integers(2, 10**8), st.floats(0.01, 10))
def test_thm1_properties(k, n, c):
    v = lower_bound_thm1(k, n, c)
    assert v == pytest.approx(thm1_oracle(k, n, c), rel=1e-9, abs=1e-12)
    assert v >= lower_bound_thm1(k, n, c * 2)
    tau = tau_rel_floor(k, c)
    assembled = (h_theta_lower(k) - h_theta_given_xn_upper(k, n, tau)) / n
    assert abs(v - assembled) <= 1e-9
    if v > 0:
        assert v <= upper_bound_thm2(k, n)


def test_davisson_examples():
    assert davisson_bound(2, 100, 1.0) == pytest.approx(davisson_oracle(2, 100, 1.0), rel=1e-9)
    for k, n in [(3, 1000), (8, 10**12)]:
        gap = davisson_bound(k, n, 1.0) - davisson_bound(k, n, 2.0)
        assert gap == pytest.approx(k * (k - 1) / (2 * n), rel=1e-9)
    with pytest.raises(ValueError):
        davisson_bound(2, 100, 0)


def test_davisson_positivity_threshold():
    ks = [4, 8, 16, 32]
    n0 = []
    for k in ks:
        n = davisson_positive_from(k, 1.0)
        if n < 2**50:
            assert davisson_bound(k, n, 1.0) > 0 >= davisson_bound(k, n - 1, 1.0)
        else:
            # floats cannot resolve single integers out here
            assert n == math.floor(davisson_threshold(k, 1.0)) + 1
        assert n == pytest.approx(davisson_threshold(k, 1.0), rel=1e-9)
        assert davisson_threshold(k, 1.0) == pytest.approx(8 * k**12, rel=1e-3)
        n0.append(n)
    slope = np.polyfit(np.log(ks), np.log(n0), 1)[0]
    assert 11.9 <= slope <= 12.1


def test_davisson_sup_is_tiny():
    # the bound peaks at n = e * n0 with value p / (2 e n0 ln 2): no practical crossing
    assert davisson_crossing(4, 0.25, 1.0) is None
    assert davisson_crossing(2, 1e-6, 1.0) is not None
    k = 2
    n_peak = int(math.e * davisson_threshold(k))
    assert davisson_bound(k, n_peak) == pytest.approx(k * (k - 1) / (2 * math.e * davisson_threshold(k) * math.log(2)), rel=1e-6)


def test_h_theta_examples():
    assert h_theta_lower(2) == pytest.approx(math.log2(math.e) - 1, abs=1e-15)
    assert h_theta_lower(3) == pytest.approx(3 * math.log2(1 / 3) + 3 * math.log2(math.e) - math.log2(3))
    assert math.isfinite(h_theta_lower(10**4))
    assert h_theta_given_xn_upper(2, 101, 1.0) == pytest.approx(0.5 * math.log2(16 * math.pi * math.e / 100))
    for k, n in [(3, 11), (7, 1001)]:
        drop = h_theta_given_xn_upper(k, n, 2.0) - h_theta_given_xn_upper(k, 2 * (n - 1) + 1, 2.0)
        assert drop == pytest.approx(k * (k - 1) / 4, rel=1e-12)


def test_var_bound_examples():
    assert var_bound(0.0, 100, 3.0) == 0.0
    assert var_bound(1 / 3, 1001, 1.5) == pytest.approx(0.004, abs=1e-15)


def brute_n_star(k, eps, limit):
    for n in range(2, limit):
        if thm2_oracle(k, n) <= eps:
            return n
    return None


def test_n_star_example():
    assert n_star(2, None, 0.5) == brute_n_star(2, 0.5, 512) == 89
    assert upper_bound_thm2(2, 88) > 0.5 >= upper_bound_thm2(2, 89)


@given(st.integers(2, 12), st.floats(0.05, 5))
def test_n_star_matches_scan(k, eps):
    assert n_star(k, 2.0, eps) == brute_n_star(k, eps, 200_000)


def test_n_star_scaling_and_monotonicity():
    ratios = [n_star(k, None, 0.25) / k**2 for k in (8, 16, 32, 64)]
    assert all(40 < r < 60 for r in ratios)
    eps = [0.05, 0.1, 0.25, 0.5, 1, 4]
    ns = [n_star(8, None, e) for e in eps]
    assert all(b <= a for a, b in zip(ns, ns[1:]))
    for k in (2, 4, 8, 16):
        assert n_star(k, None, 4.0) <= k * k
    assert n_star(8, None, math.inf) == 2


def test_n_star_errors():
    with pytest.raises(ValueError):
        n_star(2, None, 0)
    with pytest.raises(ValueError):
        n_star(2, None, 0.5, bound_selector="thm1")
    with pytest.raises(NonConvergenceError):
        n_star(2, None, 1e-30)


def test_thm1_crossing():
    assert thm1_crossing(8, 0.25, 1.0) is None
    small = 1e-3
    n = thm1_crossing(8, small, 1.0)
    assert n is not None
    assert lower_bound_thm1(8, n, 1.0) >= small > lower_bound_thm1(8, n - 1, 1.0)


def test_bounds_row_schema():
    row = bounds_row(2, 100, 1.0, 1.0)
    assert tuple(row) == BOUNDS_COLUMNS
    assert row["thm2_upper"] == pytest.approx(0.45604, abs=1e-5)
    assert row["tau_rel"] == tau_rel_floor(2, 1.0)
