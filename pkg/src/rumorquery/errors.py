"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class EdgeListParseError(ValueError):
    """Malformed edge-list input."""


class SimulationError(RuntimeError):
    """A diffusion cannot reach the requested size."""


class NotATreeError(ValueError):
    """A tree-only routine was handed a snapshot containing cycles."""


class ConfigurationError(ValueError):
    """An experiment configuration is invalid or infeasible."""
