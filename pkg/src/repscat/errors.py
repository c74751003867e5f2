"""Exception family shared by all repscat modules."""


class RepscatError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(RepscatError):
    """Invalid parameters: bad grid size, alpha out of range, malformed spec."""


class NumericalStateError(RepscatError):
    """A wavefunction contains NaN/Inf samples or has collapsed to zero."""


class SelfAdjointnessError(RepscatError):
    """An expectation value carries an imaginary residue above threshold."""


class DomainEscapeError(RepscatError):
    """Probability mass reached the outer region of the periodic box."""


class SingularTimeError(RepscatError):
    """Requested propagation time too close to a kernel singularity."""


class OracleScaleError(RepscatError):
    """A brute-force oracle was asked to run beyond its size limits."""


class PhaseWindingError(ConfigurationError):
    """Per-step potential phase exceeds the anti-aliasing bound."""


class NoEscapeError(RepscatError):
    """A trajectory did not escape over the requested fit window."""


class DerivativeError(RepscatError):
    """Finite-difference step underflowed or derivatives are unavailable."""
