"""Finite-state Markov chains: stationary vectors, graph and theta
parametrisations, stationary path sampling and exact process entropy.

Transition matrices and stationary vectors are plain read-only numpy arrays.
State labels are 1-based wherever they leave the library (paths, JSON, CSV).
"""
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._validation import (
    BALANCE_TOL,
    _frozen,
    balance_residual,
    check_chain,
    check_int,
    check_transition_matrix,
)
from .errors import (
    ChainError,
    DiagonalNotZeroError,
    IrreducibilityError,
    IsolatedVertexError,
    NotReversibleError,
    ZeroRowError,
)

NULLSPACE_TOL = 1e-9
POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph whose random walk is a reversible chain.

    ``w`` is symmetric and nonnegative, ``rho`` holds the row sums and
    ``rho_total`` the sum of all weights.
    """

    w: np.ndarray
    rho: np.ndarray
    rho_total: float

    @property
    def k(self):
        return self.w.shape[0]

    @classmethod
    def from_weights(cls, w):
        w = np.asarray(w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ChainError(f"weight matrix must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or w.min() < 0:
            raise ChainError("weights must be finite and nonnegative")
        if not np.array_equal(w, w.T):
            raise ChainError("weight matrix must be exactly symmetric")
        rho = w.sum(axis=1)
        return cls(_frozen(w), _frozen(rho), float(rho.sum()))

    def __post_init__(self):
        if not np.allclose(self.rho, self.w.sum(axis=1), rtol=1e-12, atol=0):
            raise ChainError("rho does not match the row sums of w")
        if not np.isclose(self.rho_total, self.rho.sum(), rtol=1e-12, atol=0):
            raise ChainError("rho_total does not match the sum of rho")

    def centered(self):
        """Off-diagonal-centred weights w_ij - 1 (diagonal becomes -1)."""
        return self.w - 1.0


@dataclass(frozen=True)
class ThetaVector:
    """Pair parametrisation theta_{i,j} = 2 pi_i K_ij, i < j, in
    ``np.triu_indices(k, 1)`` order: (1,2), (1,3), ..., (1,k), (2,3), ...
    """

    k: int
    theta: np.ndarray

    def __post_init__(self):
        d = self.k * (self.k - 1) // 2
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != (d,):
            raise ChainError(f"theta for k={self.k} must have length {d}, got {theta.shape}")
        if theta.min() < 0:
            raise ChainError("theta entries must be nonnegative")
        if abs(theta.sum() - 1.0) > 1e-12:
            raise ChainError(f"theta must sum to 1 (got {theta.sum()!r})")
        object.__setattr__(self, "theta", _frozen(theta))

    @property
    def d(self):
        return self.theta.size

    def symmetrized(self):
        """k x k matrix with theta_{min(i,j),max(i,j)} off the diagonal and 0 on it."""
        t = np.zeros((self.k, self.k))
        iu = np.triu_indices(self.k, 1)
        t[iu] = self.theta
        return t + t.T

    def pair(self, i, j):
        """theta_{i,j} for 1-based states i != j (order-insensitive)."""
        if i == j:
            return 0.0
        i, j = min(i, j) - 1, max(i, j) - 1
        idx = i * self.k - i * (i + 1) // 2 + (j - i - 1)
        return float(self.theta[idx])


@dataclass(frozen=True)
class PathSample:
    """A sampled path x_1..x_n with 1-based symbols and its seed record."""

    x: np.ndarray
    seed: object = None

    @property
    def n(self):
        return self.x.size


def stationary(K):
    """Stationary distribution of an irreducible chain.

    Solves (K^T - I) pi = 0 together with sum(pi) = 1.  Raises
    IrreducibilityError when the null space has dimension > 1.
    """
    K = check_transition_matrix(K)
    k = K.shape[0]
    A = K.T - np.eye(k)
    sv = np.linalg.svd(A, compute_uv=False)
    null_dim = int(np.sum(sv < NULLSPACE_TOL))
    if null_dim > 1:
        raise IrreducibilityError(
            f"stationary vector is not unique (null space dimension {null_dim})"
        )
    M = np.vstack([A, np.ones((1, k))])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.abs(pi @ K - pi).max() > POWER_TOL:
        pi = _power_iteration(K, pi)
    return _frozen(pi)


def _power_iteration(K, start):
    lazy = 0.5 * (K + np.eye(K.shape[0]))
    pi = start.copy()
    for _ in range(POWER_MAX_ITER):
        nxt = pi @ lazy
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < POWER_TOL:
            return nxt
        pi = nxt
    return pi


def chain_from_graph(graph):
    """Random walk on a weighted graph: K_ij = w_ij / rho_i, pi_i = rho_i / rho."""
    if not isinstance(graph, WeightedGraph):
        graph = WeightedGraph.from_weights(graph)
    if np.any(graph.rho <= 0):
        bad = np.flatnonzero(graph.rho <= 0) + 1
        raise IsolatedVertexError(f"vertices {bad.tolist()} have no incident weight")
    K = graph.w / graph.rho[:, None]
    pi = graph.rho / graph.rho_total
    return _frozen(K), _frozen(pi)


def graph_from_chain(K, pi, tol=BALANCE_TOL):
    """Edge weights w_ij = pi_i K_ij of a reversible chain (total weight 1)."""
    K, pi = check_chain(K, pi)
    res = balance_residual(K, pi)
    if res > tol:
        raise NotReversibleError(f"detailed balance violated (residual {res:.3e})")
    flow = pi[:, None] * K
    return WeightedGraph.from_weights(0.5 * (flow + flow.T))


def theta_from_chain(K, pi, tol=BALANCE_TOL):
    """Map a zero-diagonal reversible chain to its theta vector."""
    K, pi = check_chain(K, pi)
    if np.abs(np.diag(K)).max() > 1e-12:
        raise DiagonalNotZeroError("theta parametrisation requires K_ii = 0 for all i")
    res = balance_residual(K, pi)
    if res > tol:
        raise NotReversibleError(f"detailed balance violated (residual {res:.3e})")
    flow = pi[:, None] * K
    k = K.shape[0]
    theta = (flow + flow.T)[np.triu_indices(k, 1)]
    return ThetaVector(k, theta / theta.sum())


def chain_from_theta(t):
    """Inverse of theta_from_chain: K_ij = theta~_ij / sum_j' theta~_ij'."""
    sym = t.symmetrized()
    rows = sym.sum(axis=1)
    if np.any(rows <= 0):
        bad = np.flatnonzero(rows <= 0) + 1
        raise ZeroRowError(f"states {bad.tolist()} have no theta mass")
    K = sym / rows[:, None]
    pi = rows / rows.sum()
    return _frozen(K), _frozen(pi)


@njit(cache=True, nogil=True)
def _walk(cum, x0, u):
    n = u.size + 1
    k = cum.shape[1]
    x = np.empty(n, dtype=np.int64)
    x[0] = x0
    s = x0
    for t in range(n - 1):
        row = cum[s]
        v = u[t] * row[k - 1]
        j = 0
        while j < k - 1 and row[j] <= v:
            j += 1
        s = j
        x[t + 1] = s
    return x


def _categorical(cdf, u):
    v = u * cdf[-1]
    return min(int(np.searchsorted(cdf, v, side="right")), cdf.size - 1)


def sample_path(K, pi, n, seed=None):
    """Sample a stationary path X_1 ~ pi, X_{t+1} | X_t = i ~ K[i].

    ``seed`` may be an int, a numpy SeedSequence or a Generator; the same
    seed always yields the same path.
    """
    K, pi = check_chain(K, pi)
    n = check_int("n", n, 1)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(n)
    x0 = _categorical(np.cumsum(pi), u[0])
    x = _walk(np.cumsum(K, axis=1), x0, u[1:])
    x += 1
    x.setflags(write=False)
    return PathSample(x, seed)


def _entropy_bits(p):
    p = np.asarray(p, dtype=float)
    nz = p > 0
    out = np.zeros_like(p)
    out[nz] = -p[nz] * np.log2(p[nz])
    return out


def process_entropy(K, pi, n):
    """Entropy in bits of X^n for the stationary chain: H(pi) + (n-1) H(X2|X1)."""
    K, pi = check_chain(K, pi)
    n = check_int("n", n, 1)
    h_start = _entropy_bits(pi).sum()
    h_cond = float(pi @ _entropy_bits(K).sum(axis=1))
    return float(h_start + (n - 1) * h_cond)


def is_reversible(K, pi, tol=BALANCE_TOL):
    K, pi = check_chain(K, pi)
    return balance_residual(K, pi) <= tol
