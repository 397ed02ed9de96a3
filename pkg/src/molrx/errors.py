"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so raising the right class
matters more than the message text.
"""


class ConfigurationError(ValueError):
    """Invalid physical parameters or experiment configuration (exit code 2)."""


class StepSizeError(ConfigurationError):
    """Per-step reaction probability exceeds 1; the time step is too large
    for the requested forward rate (exit code 3)."""


class ConvergenceError(RuntimeError):
    """A numerical procedure (quadrature, inverse Laplace transform) failed
    its self-consistency check (exit code 4)."""
