"""Shared exception types."""


class ConfigurationError(ValueError):
    """Invalid configuration: bad field values, budget violations, malformed files."""
