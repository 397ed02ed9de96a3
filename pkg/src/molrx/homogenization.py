"""Boundary homogenization: finite receptor count -> effective forward rate.

A receiver carrying M circular receptor patches of dimensionless radius rs'
is mapped onto a fully covered receiver whose forward rate kf*' reproduces
the same steady-state flux.  Everything is dimensionless with the receiver
radius, diffusion coefficient, and far-field concentration set to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from molrx.analytic import FOUR_PI
from molrx.errors import ConfigurationError
from molrx.units import DimensionlessParams

__all__ = [
    "ReceptorLayoutParams",
    "correction_factor",
    "effective_forward_rate",
    "berg_purcell_factor",
    "zwanzig_factor",
    "equivalent_receptor_radius",
    "finite_receptor_params",
]


@dataclass(frozen=True)
class ReceptorLayoutParams:
    """M uniformly distributed circular patches of radius rs' on the unit
    sphere.  Coverage fraction lambda' = M rs'^2 / 4."""

    M: int
    rs_p: float

    def __post_init__(self) -> None:
        if self.M < 0:
            raise ConfigurationError("receptor count must be >= 0")
        if self.M > 0 and self.rs_p <= 0:
            raise ConfigurationError("receptor radius must be > 0")
        if self.coverage_lambda > 1.0 + 1e-12:
            raise ConfigurationError(
                f"coverage fraction {self.coverage_lambda:.4f} exceeds 1")

    @property
    def coverage_lambda(self) -> float:
        return self.M * self.rs_p * self.rs_p / 4.0

    @classmethod
    def from_mesh_counts(cls, M: int, n_faces: int) -> "ReceptorLayoutParams":
        """Layout for M receptor triangles out of n_faces equal-area ones.

        With rs' = sqrt((4 pi / n) / pi) = 2/sqrt(n) the coverage fraction
        reduces exactly to M / n_faces.
        """
        if n_faces <= 0:
            raise ConfigurationError("mesh must have faces")
        return cls(M=M, rs_p=2.0 / math.sqrt(n_faces))


def correction_factor(layout: ReceptorLayoutParams, kf_p: float) -> float:
    """Steady-state flux ratio phi' in [0, 1] between the patchy receiver
    and the fully covered one, for partially absorbing receptors."""
    if kf_p < 0:
        raise ConfigurationError("kf' must be >= 0")
    if layout.M == 0:
        return 0.0
    lam = layout.coverage_lambda
    rs = layout.rs_p
    num = layout.M * rs * rs * (kf_p + FOUR_PI)
    den = (1.0 - lam) * (math.pi * rs * kf_p + 16.0 * math.pi) + num
    return num / den


def effective_forward_rate(kf_p: float, phi: float) -> float:
    """kf*' = 4 pi kf' phi / (kf' (1 - phi) + 4 pi); in [0, kf']."""
    if not 0.0 <= phi <= 1.0:
        raise ConfigurationError("phi must lie in [0, 1]")
    if kf_p < 0:
        raise ConfigurationError("kf' must be >= 0")
    if phi == 1.0:
        return kf_p
    return FOUR_PI * kf_p * phi / (kf_p * (1.0 - phi) + FOUR_PI)


def berg_purcell_factor(layout: ReceptorLayoutParams) -> float:
    """Classic fully absorbing correction M rs' / (pi + M rs')."""
    x = layout.M * layout.rs_p
    return x / (math.pi + x)


def zwanzig_factor(layout: ReceptorLayoutParams) -> float:
    """Fully absorbing correction with the (1 - lambda') crowding term:
    M j_r / ((1 - lambda') J_sphere + M j_r) with J_sphere = 4 pi, j_r = 4 rs'."""
    lam = layout.coverage_lambda
    num = layout.M * 4.0 * layout.rs_p
    den = (1.0 - lam) * FOUR_PI + num
    if den == 0.0:  # M = 0 and full coverage cannot coexist; M=0 -> 0/4pi
        return 0.0
    return num / den


def equivalent_receptor_radius(triangle_area: float) -> float:
    """Radius of the circular patch with the same area as a mesh triangle."""
    if triangle_area <= 0:
        raise ConfigurationError("area must be > 0")
    return math.sqrt(triangle_area / math.pi)


def finite_receptor_params(p: DimensionlessParams,
                           layout: ReceptorLayoutParams) -> DimensionlessParams:
    """Replace kf' by the homogenized kf*'; kb', kd' are untouched."""
    if math.isinf(p.kf_p):
        raise ConfigurationError(
            "homogenization of kf' = inf is expressed via the fully "
            "absorbing factors; use a finite rate")
    phi = correction_factor(layout, p.kf_p)
    return p.with_kf(effective_forward_rate(p.kf_p, phi))
