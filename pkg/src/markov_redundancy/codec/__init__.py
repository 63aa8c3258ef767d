"""Two-pass universal compressor for first-order Markov sources."""
from .arithmetic import MODES, arithmetic_decode, arithmetic_encode
from .bitstream import BitReader, BitWriter
from .container import CodecReport, compress, decompress, read_tokens, write_tokens
from .model import (
    CountsTable,
    count_transitions,
    empirical_entropy_h1,
    encode_params,
    param_bound,
    read_params,
    seq_bound,
)
from .prefix import decode_uint, encode_uint, read_uint, uint_code_length

__all__ = [
    "MODES",
    "BitReader",
    "BitWriter",
    "CodecReport",
    "CountsTable",
    "arithmetic_decode",
    "arithmetic_encode",
    "compress",
    "count_transitions",
    "decode_uint",
    "decompress",
    "empirical_entropy_h1",
    "encode_params",
    "encode_uint",
    "param_bound",
    "read_params",
    "read_tokens",
    "read_uint",
    "seq_bound",
    "uint_code_length",
    "write_tokens",
]
