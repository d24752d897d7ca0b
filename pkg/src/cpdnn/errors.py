"""Exception hierarchy shared by every module."""


class CpdnnError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(CpdnnError, ValueError):
    pass


class NonFiniteError(CpdnnError, ValueError):
    pass


class AsymmetryError(CpdnnError, ValueError):
    pass


class ConvergenceError(CpdnnError):
    pass


class InvalidPermutation(CpdnnError, ValueError):
    pass


class NonPositiveScale(CpdnnError, ValueError):
    pass


class BlockSymmetryError(CpdnnError, ValueError):
    pass


class NonRealChoiError(CpdnnError, ValueError):
    """The Choi matrix has imaginary parts, so it cannot be doubly nonnegative."""


class NotQubitOutput(CpdnnError, ValueError):
    pass


class HypothesisViolation(CpdnnError):
    """Input does not satisfy DNN + trace conditions with qubit output."""


class ForcedZeroViolation(HypothesisViolation):
    """An off-diagonal a_ij or d_ij entry that must vanish does not."""


class NotAForest(CpdnnError, ValueError):
    pass


class NegativeSchurUpdate(CpdnnError):
    """Leaf elimination hit a negative pivot; the input is not PSD."""


class NotDiagonallyDominant(CpdnnError, ValueError):
    pass


class ZeroDiagonalNonzeroRow(CpdnnError):
    """A zero diagonal entry with a nonzero row; the input is not PSD."""


class PipelineExhausted(CpdnnError):
    """Every factorization engine failed on an input that is guaranteed to be CP."""


class ParseError(CpdnnError, ValueError):
    pass
