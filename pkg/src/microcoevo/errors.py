"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid skirmish or experiment configuration."""


class SimulationError(RuntimeError):
    """A simulation contract was violated (e.g. stepping a finished fight)."""
