import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markov_redundancy.errors import NonConvergenceError
from markov_redundancy.linalg import jacobi_eigh, reconstruction_residual


def random_symmetric(k, seed):
    a = np.random.default_rng(seed).standard_normal((k, k))
    return a + a.T


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_eigenvalues_match_numpy(k, seed):
    a = random_symmetric(k, seed)
    w = jacobi_eigh(a)
    assert np.all(np.diff(w) <= 0)
    assert np.abs(w - np.linalg.eigvalsh(a)[::-1]).max() <= 1e-10 * max(1, np.abs(a).max())


@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_eigenvectors_reconstruct(k, seed):
    a = random_symmetric(k, seed)
    w, v = jacobi_eigh(a, vectors=True)
    assert reconstruction_residual(a, w, v) <= 1e-9
    assert np.abs(v.T @ v - np.eye(k)).max() <= 1e-10
    assert np.abs(a @ v - v * w).max() <= 1e-9


def test_input_is_not_modified():
    a = random_symmetric(6, 1)
    before = a.copy()
    jacobi_eigh(a, vectors=True)
    assert np.array_equal(a, before)


def test_diagonal_and_degenerate():
    assert jacobi_eigh(np.diag([3.0, -1.0, 2.0])).tolist() == [3.0, 2.0, -1.0]
    w = jacobi_eigh(np.ones((4, 4)))
    assert np.allclose(w, [4, 0, 0, 0], atol=1e-12)


def test_large_matrix_against_numpy():
    a = random_symmetric(200, 5) / np.sqrt(200)
    assert np.abs(jacobi_eigh(a) - np.linalg.eigvalsh(a)[::-1]).max() <= 1e-11


def test_sweep_cap():
    with pytest.raises(NonConvergenceError):
        jacobi_eigh(random_symmetric(10, 3), max_sweeps=1)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))
