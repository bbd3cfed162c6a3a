"""Numerics lab for shell-model energy cascades and related turbulence closures."""

from cascadelab.errors import ConfigError, InstabilityError

__version__ = "0.1.0"

__all__ = ["ConfigError", "InstabilityError", "__version__"]
