"""First-order arithmetic coding of x_2..x_n under q(b|a) = N(a,b)/N(a).

The first symbol is sent verbatim in ceil(log2 k) bits.  Two coders share
that layout:

* ``exact``: interval arithmetic on Python integers.  The codeword is the
  shortest dyadic interval inside the final interval, so the payload is at
  most ceil(log2 1/P) + 1 bits.
* ``fast``: a range coder with a 64-bit window and byte output.  Per-symbol
  truncation costs at most log2(1 + 2^-24) bits, plus an 8-byte flush.
"""
from bisect import bisect_right

from ..errors import AlphabetError, ModelMismatchError, SequenceTooShortError, TruncatedStreamError
from .bitstream import BitReader, BitWriter
from .model import as_symbols

MODES = ("exact", "fast")

_WINDOW = 64
_MASK = (1 << _WINDOW) - 1
_TOP = 1 << (_WINDOW - 8)
_FREQ_LIMIT = 1 << 32


def first_symbol_width(k):
    return (k - 1).bit_length()


def _cumulative(rows):
    cums = []
    for row in rows:
        acc = [0]
        for v in row:
            acc.append(acc[-1] + v)
        cums.append(acc)
    return cums


def quantize_row(row, limit=_FREQ_LIMIT):
    """Scale a count row so its total is below `limit`; nonzero stays nonzero."""
    total = sum(row)
    if total < limit:
        return list(row)
    budget = limit - 1 - len(row)
    return [0 if v == 0 else max(1, v * budget // total) for v in row]


def arithmetic_encode(x, c, mode="exact"):
    """Encode a 1-based sequence with its own counts; returns a bit string."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    k = c.k
    xs = as_symbols(x, k)
    if xs.size < 2:
        raise SequenceTooShortError("arithmetic coding needs n >= 2")
    if xs.size != c.n:
        raise ModelMismatchError(f"counts describe n={c.n}, sequence has n={xs.size}")
    xs = (xs - 1).tolist()
    w = BitWriter()
    w.write_uint(xs[0], first_symbol_width(k))
    if mode == "exact":
        w.write_bits(_exact_encode(xs, c.rows()))
    else:
        w.write_bits(_range_encode(xs, [quantize_row(r) for r in c.rows()]))
    return w.getbits()


def arithmetic_decode(bits, c, k, n, mode="exact"):
    """Inverse of arithmetic_encode; trailing zero padding is tolerated."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if n < 2:
        raise SequenceTooShortError("arithmetic coding needs n >= 2")
    reader = bits if isinstance(bits, BitReader) else BitReader(bits)
    x0 = reader.read_uint(first_symbol_width(k))
    if x0 >= k:
        raise AlphabetError(f"first symbol {x0 + 1} outside alphabet [1, {k}]")
    if mode == "exact":
        xs = _exact_decode(reader.rest(), x0, n, c.rows())
    else:
        xs = _range_decode(reader, x0, n, [quantize_row(r) for r in c.rows()])
    return [s + 1 for s in xs]


def _exact_encode(xs, rows):
    cums = _cumulative(rows)
    low, width, denom = 0, 1, 1
    for a, b in zip(xs, xs[1:]):
        na = cums[a][-1]
        low = low * na + width * cums[a][b]
        width *= rows[a][b]
        denom *= na
    if width == 0:
        raise ModelMismatchError("sequence has a transition with zero count")
    # smallest m with 2^-m <= width/denom, then at most one extra bit
    m = max(0, denom.bit_length() - width.bit_length())
    while (width << m) < denom:
        m += 1
    while m > 0 and (width << (m - 1)) >= denom:
        m -= 1
    hi = low + width
    for bits in (m, m + 1):
        z = -((-low << bits) // denom)
        if (z + 1) * denom <= hi << bits:
            return format(z, f"0{bits}b") if bits else ""
    raise AssertionError("no dyadic interval found")  # unreachable


def _exact_decode(payload, x0, n, rows):
    cums = _cumulative(rows)
    M = len(payload)
    r = int(payload, 2) if M else 0
    w = 1 << M
    out = [x0]
    a = x0
    for _ in range(n - 1):
        cum = cums[a]
        na = cum[-1]
        if na == 0:
            raise ModelMismatchError(f"context {a + 1} has no recorded transitions")
        s = (r * na) // w
        b = bisect_right(cum, s) - 1
        r = r * na - cum[b] * w
        w *= rows[a][b]
        out.append(b)
        a = b
    return out


def _range_encode(xs, rows):
    cums = _cumulative(rows)
    out = bytearray()
    low, rng = 0, _MASK
    for a, b in zip(xs, xs[1:]):
        cum = cums[a]
        freq = rows[a][b]
        if freq == 0:
            raise ModelMismatchError("sequence has a transition with zero count")
        step = rng // cum[-1]
        low += step * cum[b]
        rng = step * freq
        if low > _MASK:
            low &= _MASK
            i = len(out) - 1
            while out[i] == 0xFF:
                out[i] = 0
                i -= 1
            out[i] += 1
        while rng < _TOP:
            out.append(low >> (_WINDOW - 8))
            low = (low << 8) & _MASK
            rng <<= 8
    out += low.to_bytes(_WINDOW // 8, "big")
    return "".join(format(byte, "08b") for byte in out)


def _range_decode(reader, x0, n, rows):
    cums = _cumulative(rows)

    def next_byte():
        if reader.remaining < 8:
            raise TruncatedStreamError("range-coded payload ended early")
        return reader.read_uint(8)

    code = 0
    for _ in range(_WINDOW // 8):
        code = (code << 8) | next_byte()
    rng = _MASK
    out = [x0]
    a = x0
    for _ in range(n - 1):
        cum = cums[a]
        total = cum[-1]
        if total == 0:
            raise ModelMismatchError(f"context {a + 1} has no recorded transitions")
        step = rng // total
        s = code // step
        if s >= total:
            raise ModelMismatchError("range-coded value outside the model interval")
        b = bisect_right(cum, s) - 1
        code -= step * cum[b]
        rng = step * rows[a][b]
        while rng < _TOP:
            code = (code << 8) | next_byte()
            rng <<= 8
        out.append(b)
        a = b
    return out
