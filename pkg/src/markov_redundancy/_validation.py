"""Input validation helpers used at public API boundaries."""
import numpy as np

from .errors import ChainError, ZeroMassStateError

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
BALANCE_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def check_transition_matrix(K, tol=ROW_SUM_TOL):
    """Return `K` as a read-only float array after checking it is row-stochastic."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ChainError(f"transition matrix must be square, got shape {K.shape}")
    if K.shape[0] < 1:
        raise ChainError("transition matrix must have at least one state")
    if not np.all(np.isfinite(K)):
        raise ChainError("transition matrix has non-finite entries")
    if K.min() < 0 or K.max() > 1:
        raise ChainError("transition probabilities must lie in [0, 1]")
    dev = np.abs(K.sum(axis=1) - 1.0).max()
    if dev > tol:
        raise ChainError(f"rows must sum to 1 (max deviation {dev:.3e})")
    return _frozen(K)


def check_distribution(pi, k, tol=ROW_SUM_TOL):
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (k,):
        raise ChainError(f"distribution must have shape ({k},), got {pi.shape}")
    if pi.min() < 0:
        raise ChainError("distribution has negative entries")
    if abs(pi.sum() - 1.0) > tol:
        raise ChainError("distribution must sum to 1")
    return _frozen(pi)


def check_chain(K, pi, stationary_tol=STATIONARY_TOL):
    """Validate a (K, pi) pair and check that pi is stationary for K."""
    K = check_transition_matrix(K)
    pi = check_distribution(pi, K.shape[0])
    dev = np.abs(pi @ K - pi).max()
    if dev > stationary_tol:
        raise ChainError(f"pi is not stationary for K (max |piK - pi| = {dev:.3e})")
    return K, pi


def check_positive_mass(pi):
    if np.any(pi <= 0):
        bad = np.flatnonzero(pi <= 0) + 1
        raise ZeroMassStateError(f"states {bad.tolist()} have zero stationary mass")


def balance_residual(K, pi):
    """Largest detailed-balance violation max |pi_i K_ij - pi_j K_ji|."""
    flow = pi[:, None] * K
    return float(np.abs(flow - flow.T).max())


def check_int(name, value, minimum):
    if isinstance(value, (bool, np.bool_)) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
