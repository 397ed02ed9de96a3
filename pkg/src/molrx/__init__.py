"""Reactive-receiver channel model for diffusive molecular communication.

The package is organized around dimensionless (primed) variables: all lengths
are scaled by the receiver radius and all times by the diffusion timescale of
that radius, so the receiver surface always sits at r' = 1.

Modules
-------
units           dimensional <-> dimensionless parameter conversion
specfun         scaled complementary error function and the W(n, m) kernel
analytic        closed-form Green's function, impulse response, received signal
homogenization  finite-receptor correction factor and effective forward rate
sim             Brownian particle-based simulator (compiled core + fallback)
oracle          numerical inverse-Laplace cross-check of the closed forms
cli             experiment harness (``molrx`` command)
"""

__version__ = "0.1.0"

from molrx.errors import ConfigurationError, ConvergenceError, StepSizeError
from molrx.units import DimensionlessParams, SystemParams, to_dimensionless

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "StepSizeError",
    "DimensionlessParams",
    "SystemParams",
    "to_dimensionless",
    "__version__",
]
