"""Exception types shared across the package."""


class DomainError(ValueError):
    """Parameters are outside the domain where an operation is defined."""


class UnsupportedConfigurationError(ValueError):
    """The closed-form machinery does not cover this parameter choice."""


class EvolutionOverflowError(RuntimeError):
    """Non-Hermitian amplitude growth exceeded the representable range."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced an inconsistency."""


class SynthesisError(ValueError):
    """Circuit synthesis cannot realize the requested parameters."""


class StepSizeError(ValueError):
    """Integration step too large for the requested dynamics."""


class ConfigError(ValueError):
    """Invalid run configuration (CLI or config file)."""


class NearResonanceWarning(UserWarning):
    """dc/ac frequency ratio is close to, but not exactly, an integer."""
