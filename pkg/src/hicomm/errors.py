class HicommError(Exception):
    """Base class for all errors raised by hicomm."""


class AlgebraError(HicommError, ValueError):
    """Malformed algebra, term, congruence or argument."""


class ResourceLimitError(HicommError):
    """A closure or enumeration exceeded its configured budget."""

    def __init__(self, message, reached=None):
        super().__init__(message)
        self.reached = reached


class NoMalcevTermError(HicommError):
    """The algebra has no (verified) Mal'cev term."""


class VerificationError(HicommError):
    """An internal consistency check failed; indicates a bug."""
