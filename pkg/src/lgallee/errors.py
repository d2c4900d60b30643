"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """A parameter or configuration value violates its stated constraint."""


class DomainError(ValueError):
    """A state lies outside the domain where a field is defined (non-finite, N <= 0)."""


class PreconditionError(ValueError):
    """An operation was called outside the regime where it is meaningful."""


class NumericalError(RuntimeError):
    """A numeric procedure failed to produce a trustworthy result."""


class StiffnessError(NumericalError):
    """The adaptive step size underflowed.

    The partial trajectory up to the failure point is attached as ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class ManifoldSectionError(NumericalError):
    """A manifold branch never reached (or only grazed) the separation section."""

    def __init__(self, message, branch=None):
        super().__init__(message)
        self.branch = branch


class ScopeWarning(UserWarning):
    """Parameters are accepted but lie outside the weak-Allee regime (M >= 0)."""
