"""Transition counts N(a, b), empirical first-order entropy and the
count header."""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import AlphabetError, SequenceTooShortError
from .bitstream import BitWriter
from .prefix import encode_uint, read_uint


@dataclass(frozen=True)
class CountsTable:
    """k x k transition counts of a sequence of length n = 1 + sum N(a, b)."""

    k: int
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (self.k, self.k) or c.min(initial=0) < 0:
            raise ValueError("counts must be a nonnegative k x k integer table")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @property
    def transitions(self):
        return int(self.counts.sum())

    @property
    def n(self):
        return self.transitions + 1

    def rows(self):
        """Counts as nested Python int lists (cheap to combine with big ints)."""
        return [[int(v) for v in row] for row in self.counts]


def as_symbols(x, k):
    """Validate a 1-based symbol sequence and return it as an int64 array."""
    if hasattr(x, "x"):
        x = x.x
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise AlphabetError("sequence must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise AlphabetError("symbols must be integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 1 or arr.max() > k):
        bad = arr[(arr < 1) | (arr > k)][0]
        raise AlphabetError(f"symbol {bad} outside alphabet [1, {k}]")
    return arr


def count_transitions(x, k):
    """N(a, b) = #{i <= n-1 : (x_i, x_{i+1}) = (a, b)} for a 1-based sequence."""
    if k < 1:
        raise ValueError(f"alphabet size must be >= 1, got {k}")
    x = as_symbols(x, k)
    if x.size < 2:
        raise SequenceTooShortError(f"need n >= 2 symbols to count transitions, got {x.size}")
    idx = (x[:-1] - 1) * k + (x[1:] - 1)
    counts = np.bincount(idx, minlength=k * k).reshape(k, k)
    return CountsTable(k, counts)


def empirical_entropy_h1(c):
    """First-order empirical entropy in bits/symbol:
    sum_{a,b} N(a,b)/(n-1) * log2(N(a)/N(a,b))."""
    N = c.counts.astype(float)
    if c.transitions == 0:
        raise SequenceTooShortError("empirical entropy needs n >= 2")
    rows = N.sum(axis=1)
    nz = N > 0
    ratio = np.where(nz, rows[:, None] / np.where(nz, N, 1.0), 1.0)
    return float((N * np.log2(ratio)).sum() / c.transitions)


def sequence_info_bits(c):
    """(n-1) * H1 computed with exact integer counts; the ideal payload length."""
    total = 0.0
    for row in c.rows():
        na = sum(row)
        for nab in row:
            if nab:
                total += nab * (math.log2(na) - math.log2(nab))
    return total


def encode_params(c):
    """All k^2 counts, row-major, each as a universal prefix codeword."""
    w = BitWriter()
    for row in c.rows():
        for v in row:
            w.write_bits(encode_uint(v))
    return w.getbits()


def read_params(reader, k):
    counts = [[read_uint(reader) for _ in range(k)] for _ in range(k)]
    return CountsTable(k, np.array(counts, dtype=np.int64).reshape(k, k))


def param_bound(k, n):
    """Header size bound 2 k^2 log2(n/k^2 + 1) + k^2."""
    return 2 * k * k * math.log2(n / (k * k) + 1) + k * k


def seq_bound(k, n, h1):
    """Payload size bound log2 k + (n-1) H1 + 3."""
    return math.log2(k) + (n - 1) * h1 + 3
