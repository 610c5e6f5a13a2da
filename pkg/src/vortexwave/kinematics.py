"""Units, four-vectors, longitudinal boosts and packet parameters.

Internally the particle mass is the energy unit (m = 1) and lengths/times are
measured in reduced Compton wavelengths 1/m. Physical units only enter through
:class:`UnitSystem`.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .specfun import gamma_ratio_half

__all__ = [
    "UnitSystem",
    "ELECTRON",
    "FourVector",
    "PacketSpec",
    "ParaxialityWarning",
    "REGIMES",
    "PARAXIALITY_LIMIT",
    "energy_exact",
    "energy_paraxial",
    "boost_longitudinal",
    "opening_angle",
]

REGIMES = ("nonrelativistic", "nonparaxial", "paraxial")
PARAXIALITY_LIMIT = 0.1


class ParaxialityWarning(UserWarning):
    """The packet is declared paraxial but (|l|+2n+1) sigma^2/m^2 is not small."""


@dataclass(frozen=True)
class UnitSystem:
    """Conversion between physical units and the internal m = 1 units."""

    compton_wavelength_nm: float  # reduced, hbar/(m c)
    rest_energy_kev: float
    bohr_radius_nm: float = 0.052917721

    def length_to_internal(self, nm):
        return np.asarray(nm, dtype=float) / self.compton_wavelength_nm

    def length_to_nm(self, internal):
        return np.asarray(internal, dtype=float) * self.compton_wavelength_nm

    def energy_to_internal(self, kev):
        return np.asarray(kev, dtype=float) / self.rest_energy_kev

    def energy_to_kev(self, internal):
        return np.asarray(internal, dtype=float) * self.rest_energy_kev

    def sigma_from_width(self, sigma_perp_nm: float) -> float:
        """Momentum spread sigma/m for a beam width sigma_perp = 1/sigma given in nm."""
        return self.compton_wavelength_nm / sigma_perp_nm

    def momentum_from_kinetic(self, kinetic_kev: float) -> float:
        """Longitudinal momentum pbar/m of a particle with the given kinetic energy."""
        gamma = 1.0 + kinetic_kev / self.rest_energy_kev
        return math.sqrt(gamma * gamma - 1.0)


# CODATA 2018
ELECTRON = UnitSystem(compton_wavelength_nm=3.8615926796e-4, rest_energy_kev=510.99895)


@dataclass(frozen=True)
class FourVector:
    """Contravariant components (x0, x1, x2, x3); metric diag(1, -1, -1, -1)."""

    t: float
    x: float
    y: float
    z: float

    def minkowski_square(self) -> float:
        return self.t * self.t - self.x * self.x - self.y * self.y - self.z * self.z

    def dot(self, other: "FourVector") -> float:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])


def boost_longitudinal(v: FourVector, rapidity: float) -> FourVector:
    """Active boost along +z: the rest vector (m, 0, 0, 0) goes to (m cosh, 0, 0, m sinh)."""
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    return FourVector(ch * v.t + sh * v.z, v.x, v.y, sh * v.t + ch * v.z)


@dataclass(frozen=True)
class PacketSpec:
    """Parameters of one packet in m = 1 units.

    ``sigma_z`` defaults to ``sigma_perp``; distinct spreads are only meaningful
    for paraxial Laguerre-Gaussian states. ``helicity`` is only needed for
    fermion observables.
    """

    sigma_perp: float
    pbar: float = 0.0
    ell: int = 0
    n: int = 0
    sigma_z: float | None = None
    helicity: float | None = None
    regime: str = "nonparaxial"
    mass: float = 1.0

    def __post_init__(self):
        if self.sigma_z is None:
            object.__setattr__(self, "sigma_z", self.sigma_perp)
        if not (self.sigma_perp > 0 and self.sigma_z > 0):
            raise ValueError("momentum spreads must be positive")
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.pbar < 0:
            raise ValueError("only packets moving along +z (pbar >= 0) are supported")
        if int(self.ell) != self.ell or int(self.n) != self.n or self.n < 0:
            raise ValueError("ell must be an integer and n a non-negative integer")
        object.__setattr__(self, "ell", int(self.ell))
        object.__setattr__(self, "n", int(self.n))
        if self.helicity is not None and self.helicity not in (0.5, -0.5):
            raise ValueError("helicity must be +1/2 or -1/2")
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if self.regime == "nonparaxial" and self.sigma_z != self.sigma_perp:
            raise ValueError("the exact (non-paraxial) state has a single invariant spread")
        if self.regime == "paraxial" and self.paraxiality > PARAXIALITY_LIMIT:
            warnings.warn(
                f"(|l|+2n+1) sigma^2/m^2 = {self.paraxiality:.3g} exceeds {PARAXIALITY_LIMIT}",
                ParaxialityWarning,
                stacklevel=3,
            )

    @property
    def sigma(self) -> float:
        if self.sigma_z != self.sigma_perp:
            raise ValueError("packet has two spreads; use sigma_perp / sigma_z")
        return self.sigma_perp

    @property
    def abs_ell(self) -> int:
        return abs(self.ell)

    @property
    def energy_bar(self) -> float:
        if self.regime == "nonrelativistic":
            return self.pbar ** 2 / (2.0 * self.mass)
        return math.hypot(self.pbar, self.mass)

    @property
    def u_bar(self) -> float:
        if self.regime == "nonrelativistic":
            return self.pbar / self.mass
        return self.pbar / math.hypot(self.pbar, self.mass)

    @property
    def rapidity(self) -> float:
        return math.asinh(self.pbar / self.mass)

    @property
    def mean_four_momentum_parameter(self) -> FourVector:
        return FourVector(math.hypot(self.pbar, self.mass), 0.0, 0.0, self.pbar)

    @property
    def chi(self) -> float:
        """Argument 2 m^2 / sigma^2 of every normalisation Bessel function."""
        return 2.0 * self.mass ** 2 / self.sigma ** 2

    @property
    def paraxiality(self) -> float:
        s = max(self.sigma_perp, self.sigma_z)
        return (self.abs_ell + 2 * self.n + 1) * s * s / self.mass ** 2

    @property
    def diffraction_time_perp(self) -> float:
        return math.hypot(self.pbar, self.mass) / self.sigma_perp ** 2

    @property
    def diffraction_time_z(self) -> float:
        return math.hypot(self.pbar, self.mass) / self.sigma_z ** 2

    def replace(self, **changes) -> "PacketSpec":
        return dataclasses.replace(self, **changes)

    def boosted(self, rapidity: float) -> "PacketSpec":
        """Same packet seen after an active longitudinal boost (pbar must stay >= 0)."""
        pz = boost_longitudinal(self.mean_four_momentum_parameter, rapidity).z
        if pz < 0:
            if pz < -1e-12 * self.mass:
                raise ValueError("boost would reverse the direction of motion")
            pz = 0.0
        return self.replace(pbar=pz)


def energy_exact(p, mass: float = 1.0):
    """sqrt(p^2 + m^2) for 3-momenta along the last axis."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.sum(p * p, axis=-1) + mass * mass)


def energy_paraxial(p, spec: PacketSpec):
    """Second-order expansion of the energy around the mean momentum (0, 0, pbar)."""
    p = np.asarray(p, dtype=float)
    eb = spec.mean_four_momentum_parameter.t
    ub = spec.pbar / eb
    d = p - np.array([0.0, 0.0, spec.pbar])
    d2 = np.sum(d * d, axis=-1)
    dz = d[..., 2]
    return eb + ub * dz + (d2 - (ub * dz) ** 2) / (2.0 * eb)


def opening_angle(spec: PacketSpec) -> float:
    """arctan(<p_perp>/pbar) with the paraxial <p_perp> of the (n, l) mode."""
    if spec.pbar <= 0:
        raise ValueError("opening angle is undefined for a packet at rest")
    if spec.n == 0:
        factor = gamma_ratio_half(spec.abs_ell)
    else:
        from .observables import lg_radial_mean_factor

        factor = lg_radial_mean_factor(spec.n, spec.abs_ell)
    return math.atan(spec.sigma_perp * factor / spec.pbar)
