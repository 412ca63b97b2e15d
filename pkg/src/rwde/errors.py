"""Exception taxonomy shared across modules."""


class ParameterDomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class UsageError(ValueError):
    """The call is structurally malformed (empty input, index out of range...)."""


class StructuralError(ValueError):
    """The graph lacks a required property (connectivity, reachability...)."""


class ResourceLimitError(RuntimeError):
    """An enumeration or iteration guard tripped before completion."""


class DepthInsufficientError(RuntimeError):
    """An adaptive truncation failed to certify convergence at its cap."""
