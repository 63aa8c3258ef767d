"""Spectra of reversible chains, mixing functionals and the tuple chain
over consecutive pairs (X_t, X_{t+1}).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    BALANCE_TOL,
    _frozen,
    balance_residual,
    check_chain,
    check_int,
    check_positive_mass,
)
from .chains import WeightedGraph
from .errors import DimensionGuardError, IsolatedVertexError, NotReversibleError
from .linalg import jacobi_eigh

GAP_TOL = 1e-12
TUPLE_K_MAX = 32


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    gamma: float
    gamma_star: float
    tau_rel: float

    @classmethod
    def from_eigenvalues(cls, eigenvalues):
        lam = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
        if lam.size == 1:
            return cls(_frozen(lam), 1.0, 1.0, 1.0)
        gamma = 1.0 - lam[1]
        gamma_star = 1.0 - np.abs(lam[1:]).max()
        tau = math.inf if gamma_star <= GAP_TOL else 1.0 / gamma_star
        return cls(_frozen(lam), float(gamma), float(gamma_star), tau)

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "gamma": self.gamma,
            "gamma_star": self.gamma_star,
            "tau_rel": "inf" if math.isinf(self.tau_rel) else self.tau_rel,
        }


def sym_conjugate(K, graph):
    """Symmetric matrix S_ij = sqrt(rho_i / rho_j) K_ij similar to K."""
    if not isinstance(graph, WeightedGraph):
        graph = WeightedGraph.from_weights(graph)
    if np.any(graph.rho <= 0):
        raise IsolatedVertexError("graph has isolated vertices")
    K = np.asarray(K, dtype=float)
    r = np.sqrt(graph.rho)
    S = (r[:, None] / r[None, :]) * K
    return 0.5 * (S + S.T)


def _symmetrize_reversible(K, pi):
    d = np.sqrt(pi)
    A = (d[:, None] * K) / d[None, :]
    return 0.5 * (A + A.T)


def eigen_reversible(K, pi, tol=BALANCE_TOL):
    """Eigenvalues and gaps of a reversible chain via D^1/2 K D^-1/2."""
    K, pi = check_chain(K, pi)
    check_positive_mass(pi)
    res = balance_residual(K, pi)
    if res > tol:
        raise NotReversibleError(f"detailed balance violated (residual {res:.3e})")
    return SpectralSummary.from_eigenvalues(jacobi_eigh(_symmetrize_reversible(K, pi)))


def reversible_eigenvectors(K, pi):
    """Eigenvalues (descending) and right eigenvectors of a reversible K."""
    K, pi = check_chain(K, pi)
    check_positive_mass(pi)
    w, q = jacobi_eigh(_symmetrize_reversible(K, pi), vectors=True)
    return w, q / np.sqrt(pi)[:, None]


def reversibilization(K, pi):
    """Time-reversal kernel K*_ji = pi_i K_ij / pi_j."""
    K, pi = check_chain(K, pi)
    check_positive_mass(pi)
    return _frozen((pi[:, None] * K).T / pi[:, None])


def pseudo_spectral_gap(K, pi, r_max=8):
    """max_{1<=r<=r_max} gamma((K*)^r K^r) / r and the maximising r.

    Each (K*)^r K^r is self-adjoint in L2(pi), so its gap comes from
    eigen_reversible.  The scan stops early once 1/r cannot beat the best
    value found, since every such gap is at most 1.
    """
    K, pi = check_chain(K, pi)
    check_positive_mass(pi)
    r_max = check_int("r_max", r_max, 1)
    Kstar = np.asarray(reversibilization(K, pi))
    best, best_r = -math.inf, 1
    Kr = np.eye(K.shape[0])
    Ksr = np.eye(K.shape[0])
    for r in range(1, r_max + 1):
        if best >= 1.0 / r:
            break
        Kr = Kr @ K
        Ksr = Ksr @ Kstar
        M = Ksr @ Kr
        M = M / M.sum(axis=1, keepdims=True)
        value = eigen_reversible(M, pi, tol=1e-9).gamma / r
        if value > best:
            best, best_r = value, r
    return float(best), best_r


@dataclass(frozen=True)
class TupleChain:
    """Chain on pairs (a, b) indexed as a*k + b (0-based)."""

    k: int
    ktilde: np.ndarray
    ktilde_star: np.ndarray
    pi_tuple: np.ndarray
    support: np.ndarray = field(repr=False)


def _guard(k):
    if k > TUPLE_K_MAX:
        raise DimensionGuardError(f"tuple chain needs k <= {TUPLE_K_MAX}, got k={k}")


def tuple_chain(K, pi):
    """Tuple-chain kernel K~((a,b),(c,d)) = 1[b=c] K(c,d) and its closed-form
    reversibilisation K~*((a,b),(c,d)) = 1[a=d] K(d,c)."""
    K, pi = check_chain(K, pi)
    k = K.shape[0]
    _guard(k)
    eye = np.eye(k)
    shape = (k, k, k, k)  # axes (a, b, c, d)
    kt = np.broadcast_to(eye[None, :, :, None] * K[None, None, :, :], shape)
    kts = np.broadcast_to(eye[:, None, None, :] * K.T[None, None, :, :], shape)
    pi_t = (pi[:, None] * K).reshape(-1)
    return TupleChain(
        k,
        _frozen(kt.reshape(k * k, k * k)),
        _frozen(kts.reshape(k * k, k * k)),
        _frozen(pi_t),
        _frozen(np.flatnonzero(pi_t > 0)).astype(np.int64),
    )


def swap_operator(k):
    """Permutation T with (T M)((a,b), .) = M((b,a), .)."""
    idx = np.arange(k * k)
    a, b = np.divmod(idx, k)
    T = np.zeros((k * k, k * k))
    T[idx, b * k + a] = 1.0
    return T


@dataclass
class TupleIdentityReport:
    k: int
    r_max: int
    tol: float
    product_residual: float
    lift_residual: float
    gamma_ps_tuple: float
    gamma_ps_r: int
    gamma_star: float
    product_ok: bool
    lift_ok: bool
    gap_ok: bool

    @property
    def passed(self):
        return self.product_ok and self.lift_ok and self.gap_ok

    @property
    def max_residual(self):
        return max(self.product_residual, self.lift_residual)


def verify_tuple_identities(K, pi, r_max=3, tol=1e-9):
    """Check the tuple-chain identities for a reversible chain.

    (i)   (K~*)^r K~^r == (T K~^r)^2 for r = 1..r_max;
    (ii)  every eigenpair (eta, v) of K with eta != 0 lifts to
          V((a,b)) = v_a with T K~^2 V = eta V;
    (iii) gamma_ps(K~) >= gamma*(K) / 2, evaluated on the support of the
          tuple stationary vector with r ranging over 1..max(r_max, 2).
    """
    K, pi = check_chain(K, pi)
    k = K.shape[0]
    _guard(k)
    r_max = check_int("r_max", r_max, 1)
    tc = tuple_chain(K, pi)
    kt = np.asarray(tc.ktilde)
    kts = np.asarray(tc.ktilde_star)
    T = swap_operator(k)

    product_res = 0.0
    ktr = np.eye(k * k)
    ktsr = np.eye(k * k)
    for _ in range(r_max):
        ktr = ktr @ kt
        ktsr = ktsr @ kts
        tk = T @ ktr
        product_res = max(product_res, float(np.abs(ktsr @ ktr - tk @ tk).max()))

    summary = eigen_reversible(K, pi)
    eta, vecs = reversible_eigenvectors(K, pi)
    tk2 = T @ kt @ kt
    lift_res = 0.0
    for j in range(k):
        if abs(eta[j]) <= tol:
            continue
        v = vecs[:, j] / np.abs(vecs[:, j]).max()
        V = np.repeat(v, k)
        lift_res = max(lift_res, float(np.abs(tk2 @ V - eta[j] * V).max()))

    sup = tc.support
    sub = kt[np.ix_(sup, sup)]
    pi_sub = np.asarray(tc.pi_tuple)[sup]
    gps, gps_r = pseudo_spectral_gap(sub, pi_sub / pi_sub.sum(), r_max=max(r_max, 2))

    return TupleIdentityReport(
        k=k,
        r_max=r_max,
        tol=tol,
        product_residual=product_res,
        lift_residual=lift_res,
        gamma_ps_tuple=gps,
        gamma_ps_r=gps_r,
        gamma_star=summary.gamma_star,
        product_ok=product_res <= tol,
        lift_ok=lift_res <= tol,
        gap_ok=gps >= summary.gamma_star / 2 - tol,
    )
