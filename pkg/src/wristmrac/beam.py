"""Timoshenko cantilever model of the soft wrist segment.

The segment is treated as a cantilever clamped at the base disc and loaded
at the hand end. Two deflection profiles are provided:

* ``deflection_profile_paper`` evaluates the closed form exactly as it is
  usually printed for this model. Its axial coordinate runs from the free
  end (x = 0 at the tip, x = L at the clamp).
* ``deflection_profile_corrected`` is the same solution with x measured
  from the clamped base, which is the convention used everywhere else here.

The two satisfy ``paper(x) == corrected(L - x)``.
"""

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError

PROFILE_VARIANTS = ("paper", "corrected")


@dataclass(frozen=True)
class BeamParams:
    """Material and geometry constants of the wrist segment (SI units).

    Defaults are plausible magnitudes for a soft segment; they produce
    centimetre-scale tip deflections for newton-scale tendon tensions.
    """

    youngs_modulus: float = 1e6  # E, Pa
    area_moment: float = 1e-8  # I, m^4
    length: float = 0.1  # L, m
    shear_coeff: float = 0.9  # K
    area: float = 1e-4  # A, m^2
    shear_modulus: float = 4e5  # G, Pa
    curvature_radius: float = 0.05  # R, m

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{f.name} must be finite and > 0, got {value!r}")

    @property
    def flexural_rigidity(self):
        return self.youngs_modulus * self.area_moment

    @property
    def shear_rigidity(self):
        return self.shear_coeff * self.area * self.shear_modulus


@dataclass(frozen=True)
class TipPose:
    x: float
    y: float
    alpha: float


def tip_pose(params, alpha):
    """Planar tip position for bending angle ``alpha`` on an arc of radius R."""
    if not math.isfinite(alpha) or abs(alpha) >= math.pi:
        raise DomainError(f"bending angle must be finite with |alpha| < pi, got {alpha!r}")
    R = params.curvature_radius
    return TipPose(x=R * math.sin(alpha), y=R * (1.0 - math.cos(alpha)), alpha=alpha)


def angle_from_arc(params):
    """Bending angle of a constant-curvature arc, alpha = L / R."""
    return params.length / params.curvature_radius


def _check_position(params, x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > params.length):
        raise DomainError(f"axial position must lie in [0, {params.length}], got {x}")
    return x


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


def shear_deflection(params, F, x):
    """Shear part of the corrected profile, F x / (K A G)."""
    x = _check_position(params, x)
    return _as_output(F * x / params.shear_rigidity)


def bending_deflection(params, F, x):
    """Bending part of the corrected profile, F x^2 (3L - x) / (6 E I)."""
    x = _check_position(params, x)
    L = params.length
    return _as_output(F * x**2 * (3.0 * L - x) / (6.0 * params.flexural_rigidity))


def deflection_profile_paper(params, F, x):
    """Transverse deflection with x measured from the loaded free end.

    ``F (L - x)/(KAG) - F x/(2EI) (L^2 - x^2/3) + F L^3/(3EI)``. The value at
    x = 0 is the tip deflection; it vanishes at the clamp, x = L.
    """
    x = _check_position(params, x)
    L = params.length
    EI = params.flexural_rigidity
    y = F * (L - x) / params.shear_rigidity - F * x / (2.0 * EI) * (L**2 - x**2 / 3.0) + F * L**3 / (3.0 * EI)
    return _as_output(y)


def deflection_profile_corrected(params, F, x):
    """Transverse deflection with x measured from the clamped base."""
    return _as_output(np.add(shear_deflection(params, F, x), bending_deflection(params, F, x)))


def deflection_profile(params, F, x, variant="corrected"):
    if variant == "corrected":
        return deflection_profile_corrected(params, F, x)
    if variant == "paper":
        return deflection_profile_paper(params, F, x)
    raise DomainError(f"unknown profile variant {variant!r}; expected one of {PROFILE_VARIANTS}")


def tip_deflection(params, F, variant="corrected"):
    """Deflection at the loaded end for either profile convention."""
    x_tip = params.length if variant == "corrected" else 0.0
    return deflection_profile(params, F, x_tip, variant)


def static_gain(params):
    """Tip deflection per newton of tendon tension, R L^2 / (2 E I)."""
    return params.curvature_radius * params.length**2 / (2.0 * params.flexural_rigidity)


def tip_deflection_from_moment(params, F):
    """Tip deflection under the tendon moment M = F R, i.e. M L^2 / (2 E I)."""
    if not math.isfinite(F):
        raise DomainError(f"tension must be finite, got {F!r}")
    return F * static_gain(params)
