"""Universal compression of Markov sources: codec, redundancy bounds and spectral tools."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("markov-redundancy")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0+unknown"
