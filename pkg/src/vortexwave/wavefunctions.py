"""Momentum- and position-space wave functions of vortex packets.

All amplitudes are returned as :class:`~vortexwave.specfun.LogComplex` so that
factors like ``exp(-m^2/sigma^2)`` and ``p_perp^|l|`` never under- or overflow.
Coordinates are in m = 1 units (momenta in m, lengths and times in 1/m).

Every evaluator broadcasts over numpy arrays held in the point objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .kinematics import PacketSpec, energy_paraxial
from .specfun import LogComplex, laguerre, log_bessel_k

__all__ = [
    "MomentumPoint",
    "SpacetimePoint",
    "BranchError",
    "RegimeError",
    "psi_nr_p",
    "psi_nr_x",
    "psi_boson_p",
    "psi_vortex_p",
    "varsigma",
    "psi_boson_x",
    "psi_vortex_x",
    "psi_paraxial_p",
    "psi_paraxial_x",
    "momentum_amplitude",
    "position_amplitude",
    "bispinor_u",
    "psi_fermion_p",
    "bispinor_current_derivative_identity",
]


class RegimeError(ValueError):
    """A wave function was requested for a packet of a different regime."""


class BranchError(ArithmeticError):
    """No square-root branch with positive real part exists for varsigma."""


@dataclass(frozen=True)
class MomentumPoint:
    p_perp: np.ndarray | float
    phi_p: np.ndarray | float
    p_z: np.ndarray | float

    def __post_init__(self):
        for name in ("p_perp", "phi_p", "p_z"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.p_perp < 0):
            raise ValueError("p_perp must be non-negative")

    @classmethod
    def from_cartesian(cls, px, py, pz) -> "MomentumPoint":
        return cls(np.hypot(px, py), np.arctan2(py, px), pz)

    def cartesian(self) -> np.ndarray:
        """Stack (p_x, p_y, p_z) along a new last axis."""
        p_perp, phi, pz = np.broadcast_arrays(self.p_perp, self.phi_p, self.p_z)
        return np.stack([p_perp * np.cos(phi), p_perp * np.sin(phi), pz], axis=-1)


@dataclass(frozen=True)
class SpacetimePoint:
    rho: np.ndarray | float
    phi_r: np.ndarray | float = 0.0
    z: np.ndarray | float = 0.0
    t: np.ndarray | float = 0.0

    def __post_init__(self):
        for name in ("rho", "phi_r", "z", "t"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.rho < 0):
            raise ValueError("rho must be non-negative")

    @classmethod
    def from_cartesian(cls, t, x, y, z) -> "SpacetimePoint":
        return cls(np.hypot(x, y), np.arctan2(y, x), z, t)


def _require(spec: PacketSpec, *regimes: str):
    if spec.regime not in regimes:
        raise RegimeError(f"state needs regime {' or '.join(regimes)}, got {spec.regime}")


def _power_log(base, power: int):
    # power * log(base) with 0**0 = 1
    if power == 0:
        return np.zeros_like(np.asarray(base, dtype=float))
    with np.errstate(divide="ignore"):
        return power * np.log(base)


def _from_log(c) -> LogComplex:
    c = np.asarray(c, dtype=complex)
    return LogComplex(c.real, c.imag)


@lru_cache(maxsize=256)
def _log_norm_k(order: int, chi: float) -> float:
    return float(log_bessel_k(order, chi).real)


# --- non-relativistic ----------------------------------------------------


def psi_nr_p(spec: PacketSpec, q: MomentumPoint, t=0.0) -> LogComplex:
    """Schroedinger vortex packet in momentum space, normalised with d^3p/(2 pi)^3."""
    _require(spec, "nonrelativistic")
    s, L, m = spec.sigma, spec.abs_ell, spec.mass
    dz = q.p_z - spec.pbar
    log_mag = (
        1.5 * np.log(2.0 * np.sqrt(np.pi) / s)
        + _power_log(q.p_perp / s, L)
        - 0.5 * gammaln(L + 1)
        - (q.p_perp ** 2 + dz ** 2) / (2.0 * s * s)
    )
    energy = (q.p_perp ** 2 + q.p_z ** 2) / (2.0 * m)
    return LogComplex(log_mag, spec.ell * q.phi_p - np.asarray(t) * energy)


def psi_nr_x(spec: PacketSpec, x: SpacetimePoint) -> LogComplex:
    """Exact Fourier transform of :func:`psi_nr_p`; normalised with d^3x."""
    _require(spec, "nonrelativistic")
    s, L, m = spec.sigma, spec.abs_ell, spec.mass
    a = s ** -2 + 1j * x.t / m
    c = (
        -0.75 * np.log(np.pi)
        - 0.5 * gammaln(L + 1)
        - (L + 1.5) * np.log(s)
        + _power_log(x.rho, L)
        + 1j * (L * np.pi / 2 + spec.ell * x.phi_r)
        - (L + 1.5) * np.log(a)
        - 1j * spec.energy_bar * x.t
        + 1j * spec.pbar * x.z
        - 0.5 * (x.rho ** 2 + (x.z - spec.u_bar * x.t) ** 2) / a
    )
    return _from_log(c)


# --- exact relativistic scalar states ------------------------------------


def _minkowski_offset_square(spec: PacketSpec, q: MomentumPoint):
    """(p - pbar)^2 <= 0 evaluated without cancellation."""
    m = spec.mass
    eps = np.sqrt(q.p_perp ** 2 + q.p_z ** 2 + m * m)
    eb = spec.mean_four_momentum_parameter.t
    dz = q.p_z - spec.pbar
    de = (q.p_perp ** 2 + dz * (q.p_z + spec.pbar)) / (eps + eb)
    return de * de - q.p_perp ** 2 - dz * dz


def psi_vortex_p(spec: PacketSpec, q: MomentumPoint) -> LogComplex:
    """Exact Lorentz-invariant vortex packet, normalised with d^3p/((2 pi)^3 2 eps)."""
    _require(spec, "nonparaxial")
    s, L = spec.sigma, spec.abs_ell
    log_mag = (
        1.5 * np.log(2.0)
        + np.log(np.pi)
        - (L + 1) * np.log(s)
        - 0.5 * gammaln(L + 1)
        + _power_log(q.p_perp, L)
        - 0.5 * _log_norm_k(L + 1, spec.chi)
        + _minkowski_offset_square(spec, q) / (2.0 * s * s)
    )
    return LogComplex(log_mag, spec.ell * q.phi_p)


def psi_boson_p(spec: PacketSpec, q: MomentumPoint) -> LogComplex:
    """Phaseless exact scalar packet (the l = 0 member of :func:`psi_vortex_p`)."""
    return psi_vortex_p(spec.replace(ell=0), q)


def varsigma(spec: PacketSpec, x: SpacetimePoint) -> np.ndarray:
    """sqrt((pbar_mu + i x_mu sigma^2)^2) / m on the branch with Re > 0."""
    m, s2 = spec.mass, spec.sigma ** 2
    eb = spec.mean_four_momentum_parameter.t
    x_sq = x.t ** 2 - x.rho ** 2 - x.z ** 2
    arg = m * m + 2j * s2 * (eb * x.t - spec.pbar * x.z) - s2 * s2 * x_sq
    root = np.sqrt(np.asarray(arg, dtype=complex)) / m
    if np.any(~(root.real > 0)):
        bad = np.argwhere(~(np.atleast_1d(root.real) > 0))[:3]
        raise BranchError(f"Re varsigma <= 0 at point indices {bad.tolist()}")
    return root


def psi_vortex_x(spec: PacketSpec, x: SpacetimePoint) -> LogComplex:
    """Exact position-space vortex packet: a Klein-Gordon solution."""
    _require(spec, "nonparaxial")
    s, L, m = spec.sigma, spec.abs_ell, spec.mass
    vs = varsigma(spec, x)
    chi = spec.chi
    x_sq = x.t ** 2 - x.rho ** 2 - x.z ** 2
    eb = spec.mean_four_momentum_parameter.t
    # varsigma - 1 without cancellation near x = 0
    vs_minus_one = (2j * s * s * (eb * x.t - spec.pbar * x.z) - s ** 4 * x_sq) / (m * m * (vs + 1.0))
    c = (
        _power_log(x.rho, L)
        + 1j * (L * np.pi / 2 + spec.ell * x.phi_r)
        + (L + 1) * np.log(s)
        - 0.5 * np.log(2.0)
        - 0.5 * gammaln(L + 1)
        - np.log(np.pi)
        - (L + 1) * np.log(vs)
        + log_bessel_k(L + 1, vs * chi / 2.0)
        - vs_minus_one * chi / 2.0
        - 0.5 * _log_norm_k(L + 1, chi)
    )
    return _from_log(c)


def psi_boson_x(spec: PacketSpec, x: SpacetimePoint) -> LogComplex:
    """Exact position-space phaseless packet (l = 0 of :func:`psi_vortex_x`)."""
    return psi_vortex_x(spec.replace(ell=0), x)


# --- paraxial Laguerre-Gaussian states -----------------------------------


def _log_laguerre(n: int, alpha: int, arg):
    val = laguerre(n, alpha, arg)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(val)) + 1j * np.where(val < 0, np.pi, 0.0)


def psi_paraxial_p(spec: PacketSpec, q: MomentumPoint) -> LogComplex:
    """Paraxial Laguerre-Gaussian packet in momentum space (two spreads allowed).

    Normalised with the paraxial measure d^3p/((2 pi)^3 2 eps_bar).
    """
    _require(spec, "paraxial")
    sp, sz, L, n, m = spec.sigma_perp, spec.sigma_z, spec.abs_ell, spec.n, spec.mass
    eb = spec.mean_four_momentum_parameter.t
    x = (q.p_perp / sp) ** 2
    c = (
        0.5 * (gammaln(n + 1) - gammaln(n + L + 1))
        + np.log(2.0 * np.sqrt(np.pi) / sp)
        + 0.5 * np.log(2.0 * np.sqrt(np.pi) / sz)
        + 0.5 * np.log(2.0 * m)
        + _power_log(q.p_perp / sp, L)
        + _log_laguerre(n, L, x)
        + 1j * spec.ell * q.phi_p
        - 0.5 * x
        - (m / eb) ** 2 * (q.p_z - spec.pbar) ** 2 / (2.0 * sz * sz)
    )
    return _from_log(c)


def psi_paraxial_x(spec: PacketSpec, x: SpacetimePoint) -> LogComplex:
    """Paraxial Laguerre-Gaussian packet in space-time, normalised with d^3x 2 eps_bar.

    With distinct spreads the state carries two Gouy phases,
    (2n+|l|+1) arctan(t/t_d_perp) and arctan(t/t_d_z)/2.
    """
    _require(spec, "paraxial")
    L, n, m = spec.abs_ell, spec.n, spec.mass
    eb = spec.mean_four_momentum_parameter.t
    tau_p = x.t / spec.diffraction_time_perp
    tau_z = x.t / spec.diffraction_time_z
    w_perp = np.sqrt(1.0 + tau_p ** 2) / spec.sigma_perp
    w_z = np.sqrt(1.0 + tau_z ** 2) / spec.sigma_z
    arg = (x.rho / w_perp) ** 2
    zeta = x.z - spec.u_bar * x.t
    c = (
        0.5 * (gammaln(n + 1) - gammaln(n + L + 1))
        + 1j * (2 * n + L) * np.pi / 2
        - 0.75 * np.log(np.pi)
        - 0.5 * np.log(2.0 * m)
        + _power_log(x.rho / w_perp, L)
        - np.log(w_perp)
        - 0.5 * np.log(w_z)
        + _log_laguerre(n, L, arg)
        + 1j * spec.ell * x.phi_r
        - 1j * (eb * x.t - spec.pbar * x.z)
        - 1j * (2 * n + L + 1) * np.arctan(tau_p)
        - 0.5j * np.arctan(tau_z)
        - (1.0 - 1j * tau_p) * x.rho ** 2 / (2.0 * w_perp ** 2)
        - (1.0 - 1j * tau_z) * (eb / m) ** 2 * zeta ** 2 / (2.0 * w_z ** 2)
    )
    return _from_log(c)


def momentum_amplitude(spec: PacketSpec, q: MomentumPoint, t=0.0) -> LogComplex:
    """Momentum-space state of whatever regime ``spec`` declares (t only for Schroedinger)."""
    if spec.regime == "nonrelativistic":
        return psi_nr_p(spec, q, t)
    if spec.regime == "nonparaxial":
        return psi_vortex_p(spec, q)
    return psi_paraxial_p(spec, q)


def position_amplitude(spec: PacketSpec, x: SpacetimePoint) -> LogComplex:
    if spec.regime == "nonrelativistic":
        return psi_nr_x(spec, x)
    if spec.regime == "nonparaxial":
        return psi_vortex_x(spec, x)
    return psi_paraxial_x(spec, x)


def phase_energy(spec: PacketSpec, q: MomentumPoint) -> np.ndarray:
    """Energy that drives the time dependence of each regime's state."""
    if spec.regime == "paraxial":
        return energy_paraxial(q.cartesian(), spec)
    return np.sqrt(q.p_perp ** 2 + q.p_z ** 2 + spec.mass ** 2)


# --- fermions ------------------------------------------------------------


def bispinor_u(p, helicity: float, mass: float = 1.0) -> np.ndarray:
    """Dirac-representation bispinor with spin along z; |u|^2 = 2 eps.

    ``p`` holds Cartesian 3-momenta along its last axis. The lower spinor is
    written as (p.sigma) omega / sqrt(eps + m), which is regular at p = 0.
    """
    p = np.asarray(p, dtype=float)
    px, py, pz = p[..., 0], p[..., 1], p[..., 2]
    eps = np.sqrt(px * px + py * py + pz * pz + mass * mass)
    a = np.sqrt(eps + mass)
    zero = np.zeros_like(eps)
    if helicity == 0.5:
        comps = [a, zero, pz / a, (px + 1j * py) / a]
    elif helicity == -0.5:
        comps = [zero, a, (px - 1j * py) / a, -pz / a]
    else:
        raise ValueError("helicity must be +1/2 or -1/2")
    return np.stack([np.asarray(c, dtype=complex) for c in comps], axis=-1)


def psi_fermion_p(spec: PacketSpec, q: MomentumPoint) -> np.ndarray:
    """u(p)/sqrt(2 eps) times the scalar state of the packet's regime; shape (..., 4)."""
    if spec.helicity is None:
        raise ValueError("fermion states need a helicity")
    p = q.cartesian()
    eps = np.sqrt(np.sum(p * p, axis=-1) + spec.mass ** 2)
    scalar = momentum_amplitude(spec, q).to_complex()
    return bispinor_u(p, spec.helicity, spec.mass) / np.sqrt(2.0 * eps)[..., None] * scalar[..., None]


_GAMMA0 = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_GAMMA = tuple(np.block([[np.zeros((2, 2)), s], [-s, np.zeros((2, 2))]]) for s in _PAULI)


def bispinor_current_derivative_identity(p, helicity: float, h: float = 1e-4, mass: float = 1.0) -> np.ndarray:
    """Residual matrix R[j, k] of the helicity identity

        ubar g_j d_k u - (d_k ubar) g_j u = 2i (p_k/(eps (eps+m)) [zeta x p]_j + [zeta x e_j]_k)

    with the derivative taken by central differences of step ``h``.
    """
    p = np.asarray(p, dtype=float)
    eps = np.sqrt(p @ p + mass * mass)
    zeta = np.array([0.0, 0.0, 2.0 * helicity])
    u = bispinor_u(p, helicity, mass)
    ubar = u.conj() @ _GAMMA0
    zxp = np.cross(zeta, p)
    out = np.empty((3, 3), dtype=complex)
    for k in range(3):
        dp = np.zeros(3)
        dp[k] = h
        du = (bispinor_u(p + dp, helicity, mass) - bispinor_u(p - dp, helicity, mass)) / (2 * h)
        dubar = du.conj() @ _GAMMA0
        for j in range(3):
            lhs = ubar @ _GAMMA[j] @ du - dubar @ _GAMMA[j] @ u
            rhs = 2j * (p[k] / (eps * (eps + mass)) * zxp[j] + np.cross(zeta, np.eye(3)[j])[k])
            out[j, k] = lhs - rhs
    return out
