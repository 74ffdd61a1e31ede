"""Exception types shared across the package."""


class RMTLabError(Exception):
    """Base class for rmtlab errors."""


class DomainError(RMTLabError, ValueError):
    """Input outside an operation's stated domain."""


class SingularityError(RMTLabError, ValueError):
    """Evaluation at a singular point (e.g. spectral edge)."""


class NumericError(RMTLabError, RuntimeError):
    """A numeric procedure failed to converge."""


class IntegrationError(NumericError):
    """SDE integration failed (persistent near-collision)."""

    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class ConfigurationError(RMTLabError, ValueError):
    """Invalid experiment or sampler configuration."""
