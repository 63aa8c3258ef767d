"""Exception hierarchy shared by every module."""


class MarkovRedundancyError(Exception):
    """Base class for all errors raised by this package."""


class ChainError(MarkovRedundancyError, ValueError):
    """A chain, graph or parametrisation violates a precondition."""


class IrreducibilityError(ChainError):
    pass


class IsolatedVertexError(ChainError):
    pass


class NotReversibleError(ChainError):
    pass


class DiagonalNotZeroError(ChainError):
    pass


class ZeroRowError(ChainError):
    pass


class ZeroMassStateError(ChainError):
    pass


class DimensionGuardError(MarkovRedundancyError, ValueError):
    pass


class NonConvergenceError(MarkovRedundancyError, RuntimeError):
    pass


class CodecError(MarkovRedundancyError):
    """Base class for encoding/decoding failures."""


class AlphabetError(CodecError, ValueError):
    pass


class SequenceTooShortError(CodecError, ValueError):
    pass


class TruncatedStreamError(CodecError):
    pass


class BadMagicError(CodecError):
    pass


class ModelMismatchError(CodecError):
    pass
