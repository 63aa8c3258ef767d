"""MSB-first bit streams backed by '0'/'1' strings."""
from ..errors import TruncatedStreamError


class BitWriter:
    def __init__(self):
        self._parts = []
        self._len = 0

    def __len__(self):
        return self._len

    def write_bits(self, bits):
        self._parts.append(bits)
        self._len += len(bits)

    def write_uint(self, value, width):
        if width == 0:
            if value:
                raise ValueError("cannot write a nonzero value in zero bits")
            return
        if value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        self.write_bits(format(value, f"0{width}b"))

    def getbits(self):
        return "".join(self._parts)

    def getvalue(self):
        """Bytes with the final partial byte zero-padded."""
        return bits_to_bytes(self.getbits())


class BitReader:
    def __init__(self, bits):
        self._bits = bits
        self.pos = 0

    @classmethod
    def from_bytes(cls, data):
        return cls(bytes_to_bits(data))

    @property
    def remaining(self):
        return len(self._bits) - self.pos

    def read_bits(self, width):
        if width > self.remaining:
            raise TruncatedStreamError(
                f"needed {width} bits at offset {self.pos}, only {self.remaining} left"
            )
        out = self._bits[self.pos:self.pos + width]
        self.pos += width
        return out

    def read_uint(self, width):
        if width == 0:
            return 0
        return int(self.read_bits(width), 2)

    def read_bit(self):
        return self.read_bits(1) == "1"

    def rest(self):
        out = self._bits[self.pos:]
        self.pos = len(self._bits)
        return out


def bits_to_bytes(bits):
    if not bits:
        return b""
    pad = -len(bits) % 8
    nbytes = (len(bits) + pad) // 8
    return int(bits + "0" * pad, 2).to_bytes(nbytes, "big")


def bytes_to_bits(data):
    if not data:
        return ""
    return format(int.from_bytes(data, "big"), f"0{8 * len(data)}b")
