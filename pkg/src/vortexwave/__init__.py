"""Relativistic vortex wave packets: exact and paraxial states, observables, and a quadrature oracle."""

__version__ = "0.1.0"

from .kinematics import ELECTRON, FourVector, PacketSpec, UnitSystem, boost_longitudinal, opening_angle
from .specfun import LogComplex, bessel_k_ratio, bessel_k_scaled, gamma_ratio_half, laguerre
from .wavefunctions import (
    MomentumPoint,
    SpacetimePoint,
    bispinor_u,
    momentum_amplitude,
    position_amplitude,
    psi_fermion_p,
)

__all__ = [
    "__version__",
    "ELECTRON",
    "FourVector",
    "PacketSpec",
    "UnitSystem",
    "boost_longitudinal",
    "opening_angle",
    "LogComplex",
    "bessel_k_ratio",
    "bessel_k_scaled",
    "gamma_ratio_half",
    "laguerre",
    "MomentumPoint",
    "SpacetimePoint",
    "bispinor_u",
    "momentum_amplitude",
    "position_amplitude",
    "psi_fermion_p",
]
