"""Exception taxonomy shared by all csskit modules."""


class CsskitError(Exception):
    """Base class for all csskit errors."""


class ShapeMismatch(CsskitError):
    """Operands do not have compatible shapes."""


class DimensionMismatch(CsskitError):
    """Subsystem dimension list does not match the matrix dimension."""


class NotHermitian(CsskitError):
    """Matrix fails the Hermiticity tolerance."""


class NoConvergence(CsskitError):
    """Eigensolver failed to converge."""


class LengthMismatch(CsskitError):
    """Coefficient vector length does not match the basis size."""


class StateValidationError(CsskitError):
    """A candidate density matrix violates at least one invariant.

    The message lists every violated invariant; the concrete subclass
    identifies the first violation in priority order.
    """


class TraceNotOne(StateValidationError):
    """Trace differs from 1 beyond tolerance."""


class NotPSD(StateValidationError):
    """Minimum eigenvalue is below the PSD tolerance."""


class UnknownName(CsskitError):
    """Requested named state does not exist."""


class StateFileError(CsskitError):
    """A JSON state file is malformed; the message names the offending field."""


class MaxIterationsExceeded(CsskitError):
    """Iterative solver exceeded its iteration cap."""


class InvalidCss(CsskitError):
    """The converged candidate closest state is not a valid density matrix."""


class DegenerateInput(CsskitError):
    """Input is (numerically) separable, so no witness can be built."""


class DegenerateBasisWarning(UserWarning):
    """Eigenbasis is ambiguous because of (near-)degenerate eigenvalues."""
