"""Closed-form redundancy bounds for k-state Markov sources.

Every function returns bits (or bits/symbol); all logarithms are base 2.
Values are returned unclamped: a negative lower bound means the bound is
vacuous at that (k, n).
"""
import math

from .errors import NonConvergenceError

LOG2E = math.log2(math.e)
N_STAR_LIMIT = 1 << 62
CROSSING_LIMIT = 1 << 256
BOUND_SELECTORS = ("thm2_upper",)


def _pairs(k):
    return k * (k - 1)


def tau_rel_floor(k, c):
    """Relaxation-time threshold 1 + (2 + c)/sqrt(k) of the lower-bound prior."""
    return 1.0 + (2.0 + c) / math.sqrt(k)


def upper_bound_thm2(k, n):
    """Two-pass compressor redundancy bound
    2k^2/n log2(n/k^2 + 1) + k^2/n + (log2 k + 3)/n."""
    kk = k * k
    return 2 * kk / n * math.log2(n / kk + 1) + kk / n + (math.log2(k) + 3) / n


def lower_bound_thm1(k, n, c):
    """Minimax lower bound for chains with relaxation time >= 1 + (2+c)/sqrt(k)."""
    p = _pairs(k)
    tau0 = tau_rel_floor(k, c)
    return (
        p / (4 * n) * math.log2(2 * (n - 1) / p)
        + p / (4 * n) * math.log2(math.e / (16 * math.pi * tau0))
        - math.log2(k) / n
    )


def _davisson_denominator(k):
    # 1 - sqrt(1 - x) written without cancellation
    x = 1.0 / (4.0 * k**4)
    return x / (1.0 + math.sqrt(1.0 - x))


def davisson_bound(k, n, C=1.0):
    """Davisson's lower bound g(k, n) with its unspecified constant C."""
    if C <= 0:
        raise ValueError("Davisson constant C must be positive")
    p = _pairs(k)
    return (
        p / (2 * n) * math.log2(n)
        + p / n * math.log2(1.0 / k**4)
        - p / (2 * n) * math.log2(C / _davisson_denominator(k))
    )


def davisson_threshold(k, C=1.0):
    """Real n0 with g(k, n) > 0 exactly when n > n0: n0 = C k^8 / (1 - sqrt(1 - 1/(4k^4)))."""
    return C * float(k) ** 8 / _davisson_denominator(k)


def davisson_positive_from(k, C=1.0):
    """Smallest integer n >= 2 with davisson_bound(k, n, C) > 0.

    Exact below 2^50; above that the float closed form cannot resolve single
    integers and floor(n0) + 1 is returned as is.
    """
    n = max(2, math.floor(davisson_threshold(k, C)) + 1)
    if n > 1 << 50:
        return n
    while n > 2 and davisson_bound(k, n - 1, C) > 0:
        n -= 1
    while davisson_bound(k, n, C) <= 0:
        n += 1
    return n


def h_theta_lower(k):
    """Lower bound on the differential entropy of the uniform zero-diagonal prior."""
    d = _pairs(k) / 2
    return d * math.log2(1.0 / d) + d * LOG2E - math.log2(k)


def h_theta_given_xn_upper(k, n, tau):
    """Upper bound on h(theta | X^n) from the estimator variance bound."""
    p = _pairs(k)
    return p / 4 * math.log2(16 * math.pi * math.e * tau / (n - 1)) + p / 4 * math.log2(2 / p)


def var_bound(theta_ij, n, tau):
    """Variance bound 8 theta tau / (n - 1) for the pair-frequency estimator."""
    return 8.0 * theta_ij * tau / (n - 1)


def clamped(value):
    return max(0.0, value)


def n_star(k, tau_rel, epsilon, bound_selector="thm2_upper"):
    """Smallest n >= 2 at which the selected upper bound is <= epsilon.

    Only ``thm2_upper`` is available: it bounds the minimax redundancy for
    every relaxation time, so ``tau_rel`` (may be None) does not change the
    answer.  Doubling from n = 2 brackets the
    answer, bisection finds it, and a +-8 scan confirms it.
    """
    if bound_selector not in BOUND_SELECTORS:
        raise ValueError(f"bound_selector must be one of {BOUND_SELECTORS}")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    def ok(n):
        return upper_bound_thm2(k, n) <= epsilon

    if ok(2):
        return 2
    hi = 4
    while not ok(hi):
        hi *= 2
        if hi > N_STAR_LIMIT:
            raise NonConvergenceError(f"no n <= 2^62 reaches epsilon={epsilon} for k={k}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    for m in range(max(2, hi - 8), hi):
        if ok(m):
            raise NonConvergenceError(f"bound is not monotone near n={hi} for k={k}")
    if not all(ok(m) for m in range(hi, hi + 9)):
        raise NonConvergenceError(f"bound is not monotone near n={hi} for k={k}")
    return hi


def _unimodal_crossing(f, epsilon, limit=CROSSING_LIMIT):
    """Smallest integer n >= 2 with f(n) >= epsilon, for f that increases then
    decreases in n.  Returns None when max f < epsilon."""
    lo, hi = 2, limit
    # locate the peak; the step is relative so float rounding at huge n
    # cannot make the decreasing tail look flat
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f(mid + max(1, mid >> 20)) < f(mid):
            hi = mid
        else:
            lo = mid
    peak = lo if f(lo) >= f(hi) else hi
    if f(peak) < epsilon:
        return None
    if f(2) >= epsilon:
        return 2
    lo, hi = 2, peak
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f(mid) >= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def thm1_crossing(k, epsilon, c):
    """Smallest n whose clamped minimax lower bound reaches epsilon, or None."""
    return _unimodal_crossing(lambda n: clamped(lower_bound_thm1(k, n, c)), epsilon)


def davisson_crossing(k, epsilon, C=1.0):
    """Smallest n whose clamped Davisson bound reaches epsilon, or None."""
    return _unimodal_crossing(lambda n: clamped(davisson_bound(k, n, C)), epsilon)


def bounds_row(k, n, c, C, tau_rel=None):
    """One row of the bounds table; tau_rel defaults to 1 + (2+c)/sqrt(k)."""
    tau = tau_rel_floor(k, c) if tau_rel is None else tau_rel
    return {
        "k": k,
        "n": n,
        "c": c,
        "C": C,
        "tau_rel": tau,
        "thm1_lower": lower_bound_thm1(k, n, c),
        "thm2_upper": upper_bound_thm2(k, n),
        "davisson": davisson_bound(k, n, C),
        "h_theta": h_theta_lower(k),
        "h_theta_given_xn": h_theta_given_xn_upper(k, n, tau),
    }


BOUNDS_COLUMNS = (
    "k", "n", "c", "C", "tau_rel", "thm1_lower", "thm2_upper", "davisson", "h_theta", "h_theta_given_xn",
)
