"""Self-describing container for the two-pass Markov compressor.

Layout (MSB-first bits, zero-padded to a byte boundary)::

    magic (4 bytes) | uint(k-2) | uint(n-2) | k^2 x uint(N(a,b)) |
    first symbol (ceil(log2 k) bits) | arithmetic payload

``uint`` is the universal prefix code of :mod:`.prefix`.  The magic is
``MRC1`` for the exact coder and ``MRF1`` for the fast range coder.
"""
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import AlphabetError, BadMagicError, ModelMismatchError, TruncatedStreamError
from .arithmetic import arithmetic_decode, arithmetic_encode
from .bitstream import BitReader, BitWriter
from .model import (
    CountsTable,
    as_symbols,
    count_transitions,
    empirical_entropy_h1,
    encode_params,
    param_bound,
    seq_bound,
)
from .prefix import encode_uint, read_uint

MAGIC = {"exact": b"MRC1", "fast": b"MRF1"}
_MODE_OF = {v: k for k, v in MAGIC.items()}
_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class CodecReport:
    """Bit accounting for one compression run.

    ``l_total`` counts every bit of the container, padding included.
    """

    l_param: int
    l_seq: int
    l_total: int
    h1: float
    mode: str
    k: int
    n: int
    l_header: int

    def __post_init__(self):
        if self.l_param > param_bound(self.k, self.n) + _BOUND_SLACK:
            raise AssertionError(
                f"header uses {self.l_param} bits, above the bound {param_bound(self.k, self.n):.3f}"
            )
        if self.mode == "exact" and self.l_seq > self.seq_bound + _BOUND_SLACK:
            raise AssertionError(
                f"payload uses {self.l_seq} bits, above the bound {self.seq_bound:.3f}"
            )

    @property
    def param_bound(self):
        return param_bound(self.k, self.n)

    @property
    def seq_bound(self):
        return seq_bound(self.k, self.n, self.h1)

    @property
    def l_hat(self):
        """Header plus payload, without container framing."""
        return self.l_param + self.l_seq

    def to_dict(self):
        keys = ("l_param", "l_seq", "l_total", "h1", "mode")
        d = asdict(self)
        return {key: d[key] for key in keys}


def compress(x, k, mode="exact"):
    """Compress a 1-based sequence over [1, k]; returns (container bytes, report)."""
    if mode not in MAGIC:
        raise ValueError(f"mode must be one of {tuple(MAGIC)}, got {mode!r}")
    if k < 2:
        raise AlphabetError(f"container needs k >= 2, got {k}")
    xs = as_symbols(x, k)
    counts = count_transitions(xs, k)
    n = xs.size
    header = encode_uint(k - 2) + encode_uint(n - 2)
    params = encode_params(counts)
    seq = arithmetic_encode(xs, counts, mode=mode)
    w = BitWriter()
    w.write_bits("".join(format(b, "08b") for b in MAGIC[mode]))
    w.write_bits(header)
    w.write_bits(params)
    w.write_bits(seq)
    data = w.getvalue()
    report = CodecReport(
        l_param=len(params),
        l_seq=len(seq),
        l_total=8 * len(data),
        h1=empirical_entropy_h1(counts),
        mode=mode,
        k=k,
        n=n,
        l_header=len(header),
    )
    return data, report


def decompress(data):
    """Inverse of compress; returns (sequence as int64 array, k)."""
    data = bytes(data)
    if len(data) < 4:
        raise TruncatedStreamError("container shorter than its magic")
    mode = _MODE_OF.get(data[:4])
    if mode is None:
        raise BadMagicError(f"unknown magic {data[:4]!r}")
    reader = BitReader.from_bytes(data)
    reader.pos = 32
    k = read_uint(reader) + 2
    n = read_uint(reader) + 2
    if k * k > reader.remaining:
        raise TruncatedStreamError(f"stream too short for a k={k} count header")
    rows = [[read_uint(reader) for _ in range(k)] for _ in range(k)]
    if n >= 1 << 62 or sum(map(sum, rows)) != n - 1:
        raise ModelMismatchError("count header disagrees with the stored length")
    counts = CountsTable(k, np.array(rows, dtype=np.int64))
    x = arithmetic_decode(reader, counts, k, n, mode=mode)
    xs = np.asarray(x, dtype=np.int64)
    if not np.array_equal(count_transitions(xs, k).counts, counts.counts):
        raise ModelMismatchError("decoded sequence does not reproduce the count header")
    return xs, k


def read_tokens(path):
    """Read a token file: little-endian uint32 symbols."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) % 4:
        raise TruncatedStreamError(f"token file length {len(raw)} is not a multiple of 4")
    return np.frombuffer(raw, dtype="<u4").astype(np.int64)


def write_tokens(path, x):
    arr = np.asarray(x)
    if arr.size and (arr.min() < 0 or arr.max() > 0xFFFFFFFF):
        raise AlphabetError("tokens must fit in 32 unsigned bits")
    with open(path, "wb") as fh:
        fh.write(arr.astype("<u4").tobytes())

