"""Exception hierarchy shared across the package."""


class EnppError(Exception):
    """Base class for all package-specific errors."""


class GridError(EnppError, ValueError):
    """Invalid grid parameters or mismatched grids."""


class NonNeutralError(EnppError, ValueError):
    """Total positive and negative charge differ; the periodic Poisson
    problem has no solution without renormalizing the means."""


class CflError(EnppError, ValueError):
    """Requested timestep violates the advective CFL bound."""


class ConfigError(EnppError, ValueError):
    """Run-configuration file could not be parsed or validated."""
