"""Exception types shared across the package."""


class DslabError(Exception):
    """Base class for all package-specific failures."""


class InvalidProblem(DslabError, ValueError):
    """Riemann data violates a structural invariant (v <= 0, even k, ...)."""


class UnsupportedConfiguration(DslabError):
    """Input outside the delta-shock regime (u_minus <= u_plus)."""


class NoRootInBracket(DslabError):
    """Bracketed search found no sign change."""


class MultipleRootsInBracket(DslabError):
    """Bracketed search found more than one sign change (degenerate input)."""


class NonConvergence(DslabError):
    """Iteration cap exhausted before the stopping tolerance was met."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SimulationError(DslabError):
    """Finite-volume run aborted (negative density, non-finite state)."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(DslabError, ValueError):
    """Run configuration failed validation (unknown key, bad value)."""
