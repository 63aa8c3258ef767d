"""Seeded Monte Carlo experiments over the exponential-weight prior.

Each experiment is a pure function of its configuration and master seed.
Trial ``i`` draws from its own counter-based stream derived from
(master_seed, stream, i), trials may run on a thread pool, and results are
always reduced in trial-index order, so the CSV output is byte-identical
for any thread count.
"""
import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import __version__
from .bounds import (
    davisson_crossing,
    davisson_positive_from,
    n_star,
    thm1_crossing,
    upper_bound_thm2,
    var_bound,
)
from .chains import (
    WeightedGraph,
    chain_from_graph,
    process_entropy,
    sample_path,
    theta_from_chain,
)
from .codec import compress, count_transitions
from .linalg import jacobi_eigh
from .spectral import eigen_reversible, sym_conjugate, verify_tuple_identities

TRIAL_STREAM = 0
AUX_STREAM = 1

DEFAULT_THRESHOLDS = {
    "prior-uniformity": {"alpha": 0.01},
    "spectrum-concentration": {"pass_fraction": 0.95, "rho_sq_max": 10.0, "lambda1_tol": 1e-9},
    "esd-semicircle": {"max_mean_distance": 0.1},
    "variance": {"confidence": 0.99, "mean_z": 3.0},
    "redundancy": {"z": 3.0},
    "phase-transition": {"slope_min": 1.9, "slope_max": 2.1},
    "verify-tuple-lemmas": {"tol": 1e-9},
}


def trial_seed(master_seed, index, stream=TRIAL_STREAM):
    """64-bit seed record for one trial, mixed from (master_seed, stream, index)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(stream, int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed):
    """Philox generator for an int seed; Generators pass through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed)))


def exponential_weights(k, rng, self_loops=False):
    """Symmetric Exp(1) weights by inverse CDF, w = -ln(u)."""
    u = 1.0 - rng.random((k, k))
    w = -np.log(u)
    w = np.triu(w, 0 if self_loops else 1)
    return w + np.triu(w, 1).T


def sample_prior(k, seed):
    """Chain drawn uniformly from the zero-diagonal reversible family.

    Returns (K, pi, theta, graph) for the random walk on the complete graph
    with i.i.d. Exp(1) edge weights and no self-loops.
    """
    if k < 2:
        raise ValueError("prior needs k >= 2")
    graph = WeightedGraph.from_weights(exponential_weights(k, make_rng(seed)))
    K, pi = chain_from_graph(graph)
    theta = theta_from_chain(K, pi)
    return K, pi, theta, graph


def random_reversible_chain(k, seed, self_loops=True):
    graph = WeightedGraph.from_weights(exponential_weights(k, make_rng(seed), self_loops))
    return chain_from_graph(graph)


@dataclass
class ExperimentConfig:
    name: str
    trials: int
    master_seed: int
    k: object = None
    n: object = None
    c: object = None
    mode: str = "exact"
    threads: int = 1
    params: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 0 or (self.trials < 1 and self.name != "phase-transition"):
            raise ValueError("trials must be >= 1")
        self.thresholds = {**DEFAULT_THRESHOLDS.get(self.name, {}), **self.thresholds}

    def to_dict(self):
        d = asdict(self)
        d.pop("threads")
        return d


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    columns: list
    records: list
    aggregates: dict
    checks: dict
    aggregate_fn: object = field(default=None, repr=False)

    @property
    def passed(self):
        return all(self.checks.values())

    def to_csv(self):
        if self.aggregate_fn is not None:
            again, _ = self.aggregate_fn(self.records)
            if _dump(again) != _dump(self.aggregates):
                raise RuntimeError("aggregates are not reproducible from the trial records")
        buf = io.StringIO()
        meta = {"config": self.config.to_dict(), "version": __version__}
        buf.write("# " + _dump(meta) + "\n")
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            writer.writerow({key: _cell(rec[key]) for key in self.columns})
        summary = {"aggregates": self.aggregates, "checks": self.checks, "passed": self.passed}
        buf.write("# " + _dump(summary) + "\n")
        return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return v


def _jsonable(v):
    if isinstance(v, dict):
        return {str(key): _jsonable(val) for key, val in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return "inf" if math.isinf(v) else v
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _dump(obj):
    return json.dumps(_jsonable(obj), sort_keys=True)


def run_trials(fn, trials, threads=1):
    """fn(i) for i in range(trials), collected in index order."""
    if threads <= 1 or trials <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _moments(values):
    arr = np.asarray(values, dtype=float)
    var = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
    return {
        "mean": float(arr.mean()),
        "var": var,
        "max": float(arr.max()),
        "se": math.sqrt(var / arr.size),
    }


def _finish(config, columns, records, aggregate_fn):
    aggregates, checks = aggregate_fn(records)
    return ExperimentResult(config, list(columns), records, aggregates, checks, aggregate_fn)


def prior_uniformity(k=4, trials=10_000, seed=0, threads=1, **thresholds):
    """KS test of the theta_{1,2} marginal against Beta(1, d - 1)."""
    config = ExperimentConfig("prior-uniformity", trials, seed, k=k, threads=threads,
                              thresholds=thresholds)
    d = k * (k - 1) // 2

    def trial(i):
        s = trial_seed(seed, i)
        K, _, theta, _ = sample_prior(k, s)
        return {"trial": i, "seed": s, "theta_12": theta.pair(1, 2),
                "max_diag": float(np.abs(np.diag(K)).max())}

    def aggregate(records):
        x = [r["theta_12"] for r in records]
        res = stats.kstest(x, stats.beta(1, d - 1).cdf)
        alpha = config.thresholds["alpha"]
        crit = float(stats.kstwo.ppf(1 - alpha, len(x)))
        agg = {**_moments(x), "beta_mean": 1.0 / d, "ks_stat": float(res.statistic),
               "ks_pvalue": float(res.pvalue), "ks_critical": crit}
        checks = {"ks": agg["ks_stat"] <= crit,
                  "zero_diagonal": all(r["max_diag"] == 0.0 for r in records)}
        return agg, checks

    records = run_trials(trial, trials, threads)
    return _finish(config, ["trial", "seed", "theta_12", "max_diag"], records, aggregate)


def spectrum_concentration(k=200, trials=50, c=0.5, seed=0, threads=1, **thresholds):
    """sqrt(k) max_{i>=2} |lambda_i(K)| and row-sum concentration per prior draw."""
    config = ExperimentConfig("spectrum-concentration", trials, seed, k=k, c=c, threads=threads,
                              thresholds=thresholds)
    limit = 2.0 + c

    def trial(i):
        s = trial_seed(seed, i)
        K, pi, _, graph = sample_prior(k, s)
        lam = jacobi_eigh(sym_conjugate(K, graph))
        lam_rev = eigen_reversible(K, pi).eigenvalues
        dev = np.asarray(graph.rho) / k - 1.0
        scaled = math.sqrt(k) * float(np.abs(lam[1:]).max())
        return {
            "trial": i,
            "seed": s,
            "sqrt_k_lambda": scaled,
            "lambda1": float(lam[0]),
            "rho_dev_max": float(np.abs(dev).max()),
            "rho_dev_sq": float((dev**2).sum()),
            "equivalence_residual": float(np.abs(lam - lam_rev).max()),
            "pass": scaled <= limit,
        }

    def aggregate(records):
        th = config.thresholds
        frac = sum(r["pass"] for r in records) / len(records)
        agg = {
            "sqrt_k_lambda": _moments([r["sqrt_k_lambda"] for r in records]),
            "rho_dev_sq": _moments([r["rho_dev_sq"] for r in records]),
            "rho_dev_max": _moments([r["rho_dev_max"] for r in records]),
            "pass_fraction": frac,
            "threshold": limit,
            "max_equivalence_residual": max(r["equivalence_residual"] for r in records),
        }
        checks = {
            "pass_fraction": frac >= th["pass_fraction"],
            "rho_dev_sq": agg["rho_dev_sq"]["max"] <= th["rho_sq_max"],
            "lambda1": all(abs(r["lambda1"] - 1) <= th["lambda1_tol"] for r in records),
            "equivalence": agg["max_equivalence_residual"] <= 1e-9,
        }
        return agg, checks

    records = run_trials(trial, trials, threads)
    cols = ["trial", "seed", "sqrt_k_lambda", "lambda1", "rho_dev_max", "rho_dev_sq",
            "equivalence_residual", "pass"]
    return _finish(config, cols, records, aggregate)


def semicircle_cdf(x):
    """CDF of the semicircle density sqrt(4 - x^2)/(2 pi) on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + x * np.sqrt(4.0 - x * x) / (4.0 * np.pi) + np.arcsin(x / 2.0) / np.pi


def kolmogorov_distance(sample, cdf):
    """sup_x |F_n(x) - F(x)| for the empirical CDF of `sample`."""
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    f = cdf(x)
    i = np.arange(1, m + 1)
    return float(max((i / m - f).max(), (f - (i - 1) / m).max()))


def esd_semicircle(k=500, trials=5, seed=0, threads=1, **thresholds):
    """Kolmogorov distance between the bulk spectrum of sqrt(k) K and the semicircle."""
    config = ExperimentConfig("esd-semicircle", trials, seed, k=k, threads=threads,
                              thresholds=thresholds)

    def trial(i):
        s = trial_seed(seed, i)
        K, _, _, graph = sample_prior(k, s)
        lam = jacobi_eigh(sym_conjugate(K, graph))
        dist = kolmogorov_distance(math.sqrt(k) * lam[1:], semicircle_cdf)
        return {"trial": i, "seed": s, "ks_distance": dist}

    def aggregate(records):
        agg = _moments([r["ks_distance"] for r in records])
        return agg, {"mean_distance": agg["mean"] <= config.thresholds["max_mean_distance"]}

    records = run_trials(trial, trials, threads)
    return _finish(config, ["trial", "seed", "ks_distance"], records, aggregate)


def theta_hat(x, k, i=1, j=2):
    """Pair-frequency estimator (N(i,j) + N(j,i)) / (n - 1)."""
    N = count_transitions(x, k).counts
    return float(N[i - 1, j - 1] + N[j - 1, i - 1]) / (len(x) - 1)


def variance_experiment(k=8, n=4096, trials=2000, seed=0, threads=1, chain=None, **thresholds):
    """Monte Carlo variance of theta_hat_{1,2} on one prior chain versus
    8 theta tau_rel / (n - 1).  ``chain`` = (K, pi) overrides the prior draw."""
    config = ExperimentConfig("variance", trials, seed, k=k, n=n, threads=threads,
                              thresholds=thresholds)
    if chain is None:
        K, pi, _, _ = sample_prior(k, trial_seed(seed, 0, AUX_STREAM))
    else:
        K, pi = chain
    theta12 = float(pi[0] * K[0, 1] + pi[1] * K[1, 0])
    tau = eigen_reversible(K, pi).tau_rel
    bound = var_bound(theta12, n, tau)

    def trial(i):
        s = trial_seed(seed, i)
        path = sample_path(K, pi, n, make_rng(s))
        return {"trial": i, "seed": s, "theta_hat": theta_hat(path.x, K.shape[0])}

    def aggregate(records):
        th = config.thresholds
        m = _moments([r["theta_hat"] for r in records])
        dof = len(records) - 1
        upper = dof * m["var"] / float(stats.chi2.ppf(1 - th["confidence"], dof))
        agg = {**m, "theta": theta12, "tau_rel": tau, "bound": bound, "var_upper": upper}
        checks = {
            "variance_bound": upper <= bound,
            "unbiased": abs(m["mean"] - theta12) <= th["mean_z"] * m["se"],
        }
        return agg, checks

    records = run_trials(trial, trials, threads)
    return _finish(config, ["trial", "seed", "theta_hat"], records, aggregate)


def redundancy_experiment(k=8, n=4096, trials=200, seed=0, mode="exact", threads=1, **thresholds):
    """Per-symbol redundancy (container bits - H(X^n)) / n of the compressor
    on prior chains, against the two-pass upper bound."""
    config = ExperimentConfig("redundancy", trials, seed, k=k, n=n, mode=mode, threads=threads,
                              params={"note": "mutual information is not estimated; "
                                              "redundancy uses total container bits"},
                              thresholds=thresholds)
    bound = upper_bound_thm2(k, n)

    def trial(i):
        s = trial_seed(seed, i)
        rng = make_rng(s)
        K, pi, _, _ = sample_prior(k, rng)
        path = sample_path(K, pi, n, rng)
        _, report = compress(path.x, k, mode=mode)
        h = process_entropy(K, pi, n)
        return {
            "trial": i,
            "seed": s,
            "l_param": report.l_param,
            "l_seq": report.l_seq,
            "l_total": report.l_total,
            "h1": report.h1,
            "entropy": h,
            "redundancy": (report.l_total - h) / n,
            "redundancy_lhat": (report.l_hat - h) / n,
        }

    def aggregate(records):
        m = _moments([r["redundancy"] for r in records])
        m_hat = _moments([r["redundancy_lhat"] for r in records])
        agg = {"redundancy": m, "redundancy_lhat": m_hat, "thm2_upper": bound}
        z = config.thresholds["z"]
        return agg, {"thm2": m["mean"] <= bound + z * m["se"]}

    records = run_trials(trial, trials, threads)
    cols = ["trial", "seed", "l_param", "l_seq", "l_total", "h1", "entropy", "redundancy",
            "redundancy_lhat"]
    return _finish(config, cols, records, aggregate)


def phase_transition_sweep(k_list, epsilon=0.25, c=1.0, seed=0, C=1.0, trials=0, mode="exact",
                           threads=1, **thresholds):
    """Per k: n* from the two-pass bound, lower-bound crossings and, when
    ``trials`` > 0, the measured redundancy at n = n*.

    Empty cells mark crossings that do not exist (the bound never reaches
    epsilon).  Davisson's positivity point is reported separately because
    its epsilon crossing is empty for any practical epsilon.
    """
    k_list = [int(k) for k in k_list]
    if not k_list:
        raise ValueError("k_list must be nonempty")
    config = ExperimentConfig("phase-transition", trials, seed, k=k_list, c=c, mode=mode,
                              threads=threads, params={"epsilon": epsilon, "C": C, "n_star_bound": "thm2_upper"},
                              thresholds=thresholds)
    records = []
    for idx, k in enumerate(k_list):
        ns = n_star(k, None, epsilon)
        rec = {
            "k": k,
            "n_star": ns,
            "n_star_over_k2": ns / (k * k),
            "thm1_crossing": thm1_crossing(k, epsilon, c),
            "davisson_positive": davisson_positive_from(k, C),
            "davisson_crossing": davisson_crossing(k, epsilon, C),
            "measured_redundancy": None,
        }
        if trials > 0:
            sub = redundancy_experiment(k, ns, trials, trial_seed(seed, idx, AUX_STREAM), mode,
                                        threads)
            rec["measured_redundancy"] = sub.aggregates["redundancy"]["mean"]
        records.append(rec)

    def aggregate(records):
        th = config.thresholds
        ks = np.log([r["k"] for r in records])
        ns = np.log([float(r["n_star"]) for r in records])
        slope = float(np.polyfit(ks, ns, 1)[0]) if len(records) > 1 else float("nan")
        ratios = [r["davisson_positive"] / r["n_star"] for r in records]
        agg = {"slope": slope, "davisson_ratio": ratios}
        checks = {
            "slope": th["slope_min"] <= slope <= th["slope_max"] if len(records) > 1 else True,
            "davisson_faster": all(b > a for a, b in zip(ratios, ratios[1:])),
        }
        return agg, checks

    cols = ["k", "n_star", "n_star_over_k2", "thm1_crossing", "davisson_positive",
            "davisson_crossing", "measured_redundancy"]
    return _finish(config, cols, records, aggregate)


def verify_tuple_lemmas(k=4, trials=100, seed=0, r_max=3, threads=1, k_values=None, **thresholds):
    """Tuple-chain identities on random reversible chains.

    Even trials use weights with self-loops, odd trials the zero-diagonal
    prior family.  ``k_values`` cycles k across trials instead of fixing it.
    """
    config = ExperimentConfig("verify-tuple-lemmas", trials, seed, k=k, threads=threads,
                              params={"r_max": r_max, "k_values": k_values},
                              thresholds=thresholds)
    tol = config.thresholds["tol"]

    def trial(i):
        s = trial_seed(seed, i)
        kk = k_values[i % len(k_values)] if k_values else k
        K, pi = random_reversible_chain(kk, s, self_loops=(i % 2 == 0))
        rep = verify_tuple_identities(K, pi, r_max=r_max, tol=tol)
        return {
            "trial": i,
            "seed": s,
            "k": kk,
            "product_residual": rep.product_residual,
            "lift_residual": rep.lift_residual,
            "max_residual": rep.max_residual,
            "gamma_ps_tuple": rep.gamma_ps_tuple,
            "gamma_star": rep.gamma_star,
            "pass": rep.passed,
        }

    def aggregate(records):
        agg = {
            "max_residual": max(r["max_residual"] for r in records),
            "min_gap_margin": min(r["gamma_ps_tuple"] - r["gamma_star"] / 2 for r in records),
            "pass_fraction": sum(r["pass"] for r in records) / len(records),
        }
        return agg, {"all_pass": all(r["pass"] for r in records)}

    records = run_trials(trial, trials, threads)
    cols = ["trial", "seed", "k", "product_residual", "lift_residual", "max_residual",
            "gamma_ps_tuple", "gamma_star", "pass"]
    return _finish(config, cols, records, aggregate)


EXPERIMENTS = {
    "prior-uniformity": prior_uniformity,
    "spectrum-concentration": spectrum_concentration,
    "esd-semicircle": esd_semicircle,
    "variance": variance_experiment,
    "redundancy": redundancy_experiment,
    "phase-transition": phase_transition_sweep,
    "verify-tuple-lemmas": verify_tuple_lemmas,
}
