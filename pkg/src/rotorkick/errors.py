"""Error types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration (maps to exit code 2 at the CLI)."""


class NumericalError(RuntimeError):
    """Numerical failure such as a non-converged eigensolve (exit code 3)."""
