"""Universal prefix code for nonnegative integers (Elias gamma on m + 1).

With m + 1 = 2^q + r, 0 <= r < 2^q, the codeword is q zeros, a one, and r
in q bits: 2q + 1 <= 2 log2(m + 1) + 1 bits in total.
"""
from ..errors import TruncatedStreamError
from .bitstream import BitReader


def encode_uint(m):
    if m < 0:
        raise ValueError(f"encode_uint needs m >= 0, got {m}")
    body = bin(m + 1)[2:]
    return "0" * (len(body) - 1) + body


def uint_code_length(m):
    if m < 0:
        raise ValueError(f"encode_uint needs m >= 0, got {m}")
    return 2 * (m + 1).bit_length() - 1


def read_uint(reader):
    """Decode one codeword from a BitReader."""
    q = 0
    while True:
        if reader.remaining == 0:
            raise TruncatedStreamError("stream ended inside a unary prefix")
        if reader.read_bit():
            break
        q += 1
    if q > reader.remaining:
        raise TruncatedStreamError(f"stream ended inside a {q}-bit remainder")
    return (1 << q) + reader.read_uint(q) - 1


def decode_uint(bits):
    """Decode a single codeword from a bit string; returns (m, bits consumed)."""
    reader = BitReader(bits)
    m = read_uint(reader)
    return m, reader.pos
