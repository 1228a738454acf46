"""Exception types shared across the package."""


class TruncationError(RuntimeError):
    """Fock-space truncation discarded more amplitude than the audit allows."""


class ZeroNormError(ValueError):
    """An operation produced (or was asked to normalize) a zero-norm state."""


class DegenerateOutcomeError(ValueError):
    """A projection outcome has zero probability."""


class GridTooSmallError(ValueError):
    """A quadrature/phase-space grid does not hold the state's mass."""


class RangeTooSmallError(ValueError):
    """POVM bin range misses too much of the identity resolution."""


class StalledLikelihoodError(RuntimeError):
    """An observed bin has (numerically) zero probability under the iterate."""
