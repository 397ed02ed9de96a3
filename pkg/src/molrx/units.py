"""Dimensional <-> dimensionless parameter conversion.

Every other module works exclusively in primed (dimensionless) variables:
lengths scaled by a reference distance (the receiver radius by default),
times by ref_distance**2 / D_A, and the forward rate additionally by the
reference molecule count.  Dimensional quantities enter only at the CLI
boundary through :func:`to_dimensionless`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "SystemParams",
    "DimensionlessParams",
    "to_dimensionless",
    "to_dimensional_time",
    "to_dimensionless_time",
]

from molrx.errors import ConfigurationError


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ConfigurationError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Dimensional description of the system.

    Units: metres, seconds, and molecule counts.  The forward rate constant
    is per molecule, i.e. molecule^-1 m^3 s^-1.
    """

    receiver_radius_a: float
    release_distance_r0: float
    diffusion_DA: float
    kf: float
    kb: float
    kd: float
    NA: int
    ref_distance: float | None = None  # defaults to the receiver radius
    ref_count: float = 1.0

    def __post_init__(self) -> None:
        for name in ("receiver_radius_a", "release_distance_r0", "diffusion_DA",
                     "kf", "kb", "kd", "ref_count"):
            _require_finite(name, getattr(self, name))
        if self.receiver_radius_a <= 0:
            raise ConfigurationError("receiver radius must be > 0")
        if self.release_distance_r0 <= self.receiver_radius_a:
            raise ConfigurationError(
                "release distance must exceed the receiver radius "
                f"({self.release_distance_r0} <= {self.receiver_radius_a})")
        if self.diffusion_DA <= 0:
            raise ConfigurationError("diffusion coefficient must be > 0")
        if self.kf < 0 or self.kb < 0 or self.kd < 0:
            raise ConfigurationError("rate constants must be >= 0")
        if self.NA < 1:
            raise ConfigurationError("molecule count must be >= 1")
        if self.ref_distance is not None:
            _require_finite("ref_distance", self.ref_distance)
            if self.ref_distance <= 0:
                raise ConfigurationError("reference distance must be > 0")
        if self.ref_count <= 0:
            raise ConfigurationError("reference count must be > 0")

    @property
    def reference_distance(self) -> float:
        return self.ref_distance if self.ref_distance is not None else self.receiver_radius_a


@dataclass(frozen=True)
class DimensionlessParams:
    """Primed parameter set; the receiver surface sits at r' = 1 when the
    reference distance equals the receiver radius.

    ``kf_p`` may be ``math.inf`` to request the fully absorbing limit; the
    analytic module maps that onto the corresponding closed forms.
    """

    kf_p: float
    kb_p: float
    kd_p: float
    r0_p: float
    NA: int = 1

    def __post_init__(self) -> None:
        for name in ("kb_p", "kd_p", "r0_p"):
            _require_finite(name, getattr(self, name))
        if math.isnan(self.kf_p):
            raise ConfigurationError("kf_p must not be NaN")
        if self.kf_p < 0 or self.kb_p < 0 or self.kd_p < 0:
            raise ConfigurationError("dimensionless rates must be >= 0")
        if self.r0_p <= 1:
            raise ConfigurationError(
                f"dimensionless release distance must be > 1, got {self.r0_p}")
        if self.NA < 0:
            raise ConfigurationError("molecule count must be >= 0")

    def with_kf(self, kf_p: float) -> "DimensionlessParams":
        return replace(self, kf_p=kf_p)


def to_dimensionless(p: SystemParams) -> DimensionlessParams:
    """Convert dimensional parameters to the primed set.

    kf' = kf * ref_count / (D_A * ref_distance),
    kb' = kb * ref_distance**2 / D_A,
    kd' = kd * ref_distance**2 / D_A,
    r0' = r0 / ref_distance.
    """
    rref = p.reference_distance
    return DimensionlessParams(
        kf_p=p.kf * p.ref_count / (p.diffusion_DA * rref),
        kb_p=p.kb * rref * rref / p.diffusion_DA,
        kd_p=p.kd * rref * rref / p.diffusion_DA,
        r0_p=p.release_distance_r0 / rref,
        NA=p.NA,
    )


def to_dimensional_time(t_p: float, p: SystemParams) -> float:
    """Map dimensionless time t' back to seconds: t = t' * ref**2 / D_A."""
    _require_finite("t_p", t_p)
    if t_p < 0:
        raise ConfigurationError("time must be >= 0")
    rref = p.reference_distance
    return t_p * rref * rref / p.diffusion_DA


def to_dimensionless_time(t: float, p: SystemParams) -> float:
    """Map a time in seconds to dimensionless form: t' = D_A t / ref**2."""
    _require_finite("t", t)
    if t < 0:
        raise ConfigurationError("time must be >= 0")
    rref = p.reference_distance
    return t * p.diffusion_DA / (rref * rref)
