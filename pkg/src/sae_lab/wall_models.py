"""Physical realizations of the Robin wall: scattering data and thin wells.

Two ways to pin down the wall parameter gamma of a perfectly reflecting
surface:

* scattering: a plane wave hitting the wall picks up the phase shift
  delta(k) = 2*arctan(k/gamma) + pi, with reflection amplitude
  R = exp(i delta) = -(gamma + ik)/(gamma - ik);
* construction: a hard wall plus a square well of width eps and depth
  -V0 = -q^2/2m reproduces an effective gamma_eff = q*cot(q*eps), which
  converges linearly in eps to any target gamma when q is slaved to it as
  q = pi/(2 eps) - (2/pi) gamma.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidArgumentError, SingularConfigurationError

__all__ = [
    "ScatterResult",
    "WellApprox",
    "reflection",
    "square_well_parameters",
    "effective_gamma",
]


@dataclass(frozen=True)
class ScatterResult:
    """Reflection data at one wavenumber: amplitude R and phase shift delta.

    delta is reported in its principal form 2*arctan(k/gamma) + pi, which for
    k > 0 always lies in (0, 2*pi]: Dirichlet gives pi, Neumann 2*pi, and R is
    exp(i*delta), unimodular by construction.
    """

    k: float
    R: complex
    delta: float


@dataclass(frozen=True)
class WellApprox:
    """A hard wall dressed with a square well of width epsilon, depth V0.

    ``q`` is the interior wavenumber sqrt(2 m V0); ``target_gamma`` records
    which wall parameter the construction is aiming at.
    """

    epsilon: float
    V0: float
    q: float
    target_gamma: float


def reflection(k: float, gamma: float) -> ScatterResult:
    """Phase shift and reflection amplitude for a plane wave of wavenumber k.

    gamma may be +-inf (Dirichlet, delta = pi).  Requires k > 0.
    """
    k = float(k)
    gamma = float(gamma)
    if not math.isfinite(k) or k <= 0.0:
        raise InvalidArgumentError(f"wavenumber must be positive and finite, got {k}")
    if math.isnan(gamma):
        raise InvalidArgumentError("gamma must not be NaN")
    delta = 2.0 * math.atan(k / gamma) + math.pi if gamma != 0.0 else 2.0 * math.pi
    return ScatterResult(k, cmath.exp(1j * delta), delta)


def square_well_parameters(gamma: float, epsilon: float, m: float) -> WellApprox:
    """Well parameters that mimic a wall with the given gamma at width epsilon.

    Requires q = pi/(2 epsilon) - (2/pi) gamma > 0, which fails once gamma
    exceeds pi^2/(4 epsilon); shrink epsilon in that case.
    """
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise InvalidArgumentError(f"well width must be positive and finite, got {epsilon}")
    if not (math.isfinite(m) and m > 0):
        raise InvalidArgumentError(f"mass must be positive and finite, got {m}")
    if not math.isfinite(gamma):
        raise InvalidArgumentError("thin-well construction needs finite gamma")
    q = math.pi / (2.0 * epsilon) - (2.0 / math.pi) * gamma
    if q <= 0.0:
        raise InvalidArgumentError(
            f"interior wavenumber q = {q} <= 0; epsilon = {epsilon} is too wide "
            f"for gamma = {gamma}"
        )
    return WellApprox(epsilon, q * q / (2.0 * m), q, gamma)


def effective_gamma(well: WellApprox, m: float) -> float:
    """The wall parameter the well actually produces at its finite width.

    gamma_eff = q*cot(q*epsilon) with q = sqrt(2 m V0).  Raises when q*epsilon
    sits on a pole of the cotangent.
    """
    if not (math.isfinite(m) and m > 0):
        raise InvalidArgumentError(f"mass must be positive and finite, got {m}")
    q = math.sqrt(2.0 * m * well.V0)
    phase = q * well.epsilon
    s = math.sin(phase)
    if abs(s) < 1e-12:
        raise SingularConfigurationError(
            f"q*epsilon = {phase} lies on a cotangent pole; no finite effective gamma"
        )
    return q * math.cos(phase) / s
