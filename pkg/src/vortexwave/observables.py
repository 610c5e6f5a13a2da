"""Closed-form and O(sigma^2/m^2) observables of vortex packets.

Functions for the exact (non-paraxial) state return the exact Bessel-ratio
value together with its truncated expansion, so the truncation error is
always visible. Magnetic moments and the spin-orbit parameter exist only as
expansions here; their brute-force counterparts live in :mod:`vortexwave.oracle`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .kinematics import PacketSpec
from .specfun import gamma_ratio_half, log_bessel_k_ratio
from .wavefunctions import RegimeError

__all__ = [
    "ObservableReport",
    "MomentSet",
    "BeamGeometry",
    "ExpansionWarning",
    "EXPANSION_LIMIT",
    "mean_four_momentum",
    "invariant_mass",
    "mass_excess",
    "mean_pperp",
    "mean_inverse_energy",
    "magnetic_moment_orbital",
    "magnetic_moment_spin",
    "sok_delta",
    "sok_delta_angle",
    "mean_velocity",
    "electric_dipole",
    "mean_path",
    "lg_radial_mean_factor",
    "lg_moments",
    "uncertainty_products",
    "beam_geometry",
    "nonparaxiality_figure_of_merit",
    "nonparaxiality_from_width",
    "required_mean_radius",
    "all_observables",
]

EXPANSION_LIMIT = 0.1


class ExpansionWarning(UserWarning):
    """|l| sigma^2/m^2 is too large for a second-order expansion to be trusted."""


@dataclass(frozen=True)
class ObservableReport:
    """One observable with its provenance.

    ``method`` is ``"closed-form"``, ``"expansion"`` or ``"quadrature"``. For
    closed forms ``expansion`` holds the O(sigma^2/m^2) approximation when one
    exists; for expansions ``truncation_order`` says which power of sigma/m
    was kept and ``error_estimate`` is the size of the first dropped term.
    """

    name: str
    value: float | np.ndarray
    method: str
    spec: PacketSpec
    error_estimate: float = 0.0
    expansion: float | np.ndarray | None = None
    truncation_order: int | None = None

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")

    @property
    def remainder(self):
        """Exact minus expansion, or None if there is no expansion."""
        if self.expansion is None:
            return None
        return np.asarray(self.value) - np.asarray(self.expansion)


# closed-form values are accurate to a few ulp; this is the reported bound
_CLOSED_FORM_REL_ERROR = 1e-13


def _require_exact(spec: PacketSpec):
    if spec.regime != "nonparaxial":
        raise RegimeError(f"Bessel-ratio closed forms need the exact (nonparaxial) state, got {spec.regime}")


def _check_expansion(spec: PacketSpec):
    merit = (spec.abs_ell + 1) * spec.sigma_perp ** 2 / spec.mass ** 2
    if merit > EXPANSION_LIMIT:
        warnings.warn(
            f"(|l|+1) sigma^2/m^2 = {merit:.3g}; the second-order expansion is unreliable",
            ExpansionWarning,
            stacklevel=3,
        )


def _energy_ratio_log(spec: PacketSpec, ell: int | None = None) -> float:
    L = spec.abs_ell if ell is None else abs(ell)
    return float(log_bessel_k_ratio(L + 2, L + 1, spec.chi))


def mean_four_momentum(spec: PacketSpec) -> ObservableReport:
    """(<eps>, 0, 0, <p_z>) of the exact state: pbar_mu times K_{|l|+2}/K_{|l|+1}."""
    _require_exact(spec)
    ratio = math.exp(_energy_ratio_log(spec))
    s2 = (spec.sigma / spec.mass) ** 2
    pbar = np.array([spec.energy_bar, 0.0, 0.0, spec.pbar])
    value = pbar * ratio
    approx = pbar * (1.0 + (0.75 + spec.abs_ell / 2) * s2)
    return ObservableReport(
        "mean_four_momentum",
        value,
        "closed-form",
        spec,
        _CLOSED_FORM_REL_ERROR * float(np.max(np.abs(value))),
        approx,
        2,
    )


def invariant_mass(spec: PacketSpec) -> ObservableReport:
    """m_l = sqrt(<p>^2), i.e. m K_{|l|+2}/K_{|l|+1}; boost invariant."""
    _require_exact(spec)
    value = spec.mass * math.exp(_energy_ratio_log(spec))
    s2 = (spec.sigma / spec.mass) ** 2
    approx = spec.mass * math.sqrt(1.0 + (1.5 + spec.abs_ell) * s2)
    return ObservableReport("invariant_mass", value, "closed-form", spec, _CLOSED_FORM_REL_ERROR * value, approx, 2)


def mass_excess(spec: PacketSpec) -> ObservableReport:
    """(m_l - m_0)/m_0, the mass excess over the l = 0 packet of the same spread."""
    _require_exact(spec)
    log_r = _energy_ratio_log(spec) - _energy_ratio_log(spec, 0)
    value = math.expm1(log_r)
    approx = spec.abs_ell / 2 * (spec.sigma / spec.mass) ** 2
    return ObservableReport("mass_excess", value, "closed-form", spec, _CLOSED_FORM_REL_ERROR * (1 + abs(value)), approx, 2)


def mean_pperp(spec: PacketSpec) -> ObservableReport:
    """Mean |p_perp|.

    Exact state: sigma Gamma(|l|+3/2)/Gamma(|l|+1) K_{|l|+3/2}/K_{|l|+1}, with the
    expansion factor 1 + (5+4|l|) sigma^2/16m^2. Paraxial LG state: sigma_perp
    times the (n, l) radial factor, which has no correction.
    """
    L = spec.abs_ell
    if spec.regime == "paraxial":
        value = spec.sigma_perp * lg_radial_mean_factor(spec.n, L)
        return ObservableReport("mean_pperp", value, "closed-form", spec, _CLOSED_FORM_REL_ERROR * value)
    _require_exact(spec)
    lead = spec.sigma * gamma_ratio_half(L)
    value = lead * math.exp(float(log_bessel_k_ratio(L + 1.5, L + 1, spec.chi)))
    approx = lead * (1.0 + (5 + 4 * L) / 16 * (spec.sigma / spec.mass) ** 2)
    return ObservableReport("mean_pperp", value, "closed-form", spec, _CLOSED_FORM_REL_ERROR * value, approx, 2)


def _second_order_error(spec: PacketSpec, leading: float) -> float:
    return abs(leading) * ((spec.abs_ell + 1) * spec.sigma_perp ** 2 / spec.mass ** 2) ** 2


def mean_inverse_energy(spec: PacketSpec) -> ObservableReport:
    """<1/(2 eps)> to O(sigma^2/m^2): [1 - sigma^2/2m^2 (|l| + 1/2 + m^2/eps_bar^2)]/(2 eps_bar)."""
    _check_expansion(spec)
    m, eb, s = spec.mass, spec.mean_four_momentum_parameter.t, spec.sigma_perp
    lead = 1.0 / (2.0 * eb)
    value = lead * (1.0 - s * s / (2 * m * m) * (spec.abs_ell + 0.5 + (m / eb) ** 2))
    return ObservableReport("mean_inverse_energy", value, "expansion", spec, _second_order_error(spec, lead), None, 2)


def magnetic_moment_orbital(spec: PacketSpec) -> ObservableReport:
    """z l <1/(2 eps)>; the correction is negative and frame dependent through m^2/eps_bar^2."""
    inv = mean_inverse_energy(spec)
    value = np.array([0.0, 0.0, spec.ell * inv.value])
    return ObservableReport("magnetic_moment_orbital", value, "expansion", spec, abs(spec.ell) * inv.error_estimate, None, 2)


def _spin_bracket(spec: PacketSpec) -> tuple[float, float]:
    """(l-independent, l-coefficient) parts of the sigma^2/2m^2 bracket of mu_s."""
    m, eb = spec.mass, spec.mean_four_momentum_parameter.t
    r = m / eb
    q = m / (eb + m)
    base = 0.5 + 1.5 * r + 0.5 * r ** 2 - 1.5 * r ** 3 - q * (1.5 - 2 * r ** 2 - 1.5 * r ** 3)
    return base, 1.0 + r - q


def magnetic_moment_spin(spec: PacketSpec) -> ObservableReport:
    """<(zeta (eps+m) + p (p.zeta)/(eps+m))/(2 eps)^2> to O(sigma^2/m^2), zeta = 2 lambda z."""
    if spec.helicity is None:
        raise ValueError("spin moment needs a helicity")
    _check_expansion(spec)
    m, eb, s = spec.mass, spec.mean_four_momentum_parameter.t, spec.sigma_perp
    zeta = 2.0 * spec.helicity
    base, per_ell = _spin_bracket(spec)
    lead = zeta / (2.0 * eb)
    value = np.array([0.0, 0.0, lead * (1.0 - s * s / (2 * m * m) * (base + spec.abs_ell * per_ell))])
    return ObservableReport("magnetic_moment_spin", value, "expansion", spec, _second_order_error(spec, lead), None, 2)


def sok_delta(spec: PacketSpec) -> ObservableReport:
    """Spin-orbit parameter |l| sigma^2/m^2 (m/eps_bar - m/(eps_bar + m)); grows linearly in |l|."""
    m, eb, s = spec.mass, spec.mean_four_momentum_parameter.t, spec.sigma_perp
    value = spec.abs_ell * (s / m) ** 2 * (m / eb - m / (eb + m))
    return ObservableReport("sok_delta", value, "expansion", spec, abs(value) * spec.abs_ell * (s / m) ** 2, None, 2)


def sok_delta_angle(spec: PacketSpec) -> float:
    """The same parameter written as (1 - m/eps_bar) sin^2(theta_0); needs pbar > 0."""
    from .kinematics import opening_angle

    m, eb = spec.mass, spec.mean_four_momentum_parameter.t
    return (1.0 - m / eb) * math.sin(opening_angle(spec)) ** 2


def mean_velocity(spec: PacketSpec) -> ObservableReport:
    """<u> to leading order, u_bar z; the O(|l| sigma^2/m^2) correction is frame dependent."""
    lead = spec.u_bar
    value = np.array([0.0, 0.0, lead])
    err = abs(lead) * spec.paraxiality
    return ObservableReport("mean_velocity", value, "expansion", spec, err, None, 0)


def electric_dipole(spec: PacketSpec, t: float) -> ObservableReport:
    """d_f = <u> t; the phase-gradient and spin terms integrate to zero by azimuthal symmetry."""
    v = mean_velocity(spec)
    return ObservableReport("electric_dipole", v.value * t, "expansion", spec, v.error_estimate * abs(t), None, 0)


def mean_path(spec: PacketSpec, t: float) -> ObservableReport:
    """<r> = d_f / int j^0 with unit normalisation."""
    d = electric_dipole(spec, t)
    return ObservableReport("mean_path", d.value, d.method, spec, d.error_estimate, None, 0)


# --- paraxial Laguerre-Gaussian moments -----------------------------------


@lru_cache(maxsize=1024)
def _lg_sqrt_moment(n: int, ell: int) -> Fraction:
    """<sqrt(x)> / Gamma(l+3/2) * l! for the density x^l (L_n^l(x))^2 e^{-x}, exactly."""
    coeff = [Fraction((-1) ** j * comb(n + ell, n - j), factorial(j)) for j in range(n + 1)]
    # Gamma(l + 3/2 + s) / Gamma(l + 3/2) as exact rationals
    rising = [Fraction(1)]
    for s in range(2 * n):
        rising.append(rising[-1] * (Fraction(2 * ell + 3, 2) + s))
    total = sum(coeff[j] * coeff[k] * rising[j + k] for j in range(n + 1) for k in range(n + 1))
    return total * Fraction(factorial(n) * factorial(ell), factorial(n + ell))


def lg_radial_mean_factor(n: int, ell: int) -> float:
    """<rho>/sigma_perp(t) (equivalently <p_perp>/sigma) of the (n, l) Laguerre-Gaussian mode.

    Reduces to Gamma(|l|+3/2)/Gamma(|l|+1) for n = 0; for n > 0 the Laguerre
    factor reshapes the radial profile and the value is computed exactly.
    """
    n, ell = int(n), abs(int(ell))
    if n < 0:
        raise ValueError("radial index must be non-negative")
    if n == 0:
        return gamma_ratio_half(ell)
    return gamma_ratio_half(ell) * float(_lg_sqrt_moment(n, ell))


@dataclass(frozen=True)
class MomentSet:
    mean_rho: float
    mean_rho2: float
    mean_pperp: float
    mean_pperp2: float
    mean_x2: float
    mean_px2: float
    t: float = 0.0

    def __post_init__(self):
        if self.mean_rho2 < self.mean_rho ** 2 * (1 - 1e-12):
            raise ValueError("inconsistent moments: <rho^2> < <rho>^2")


def _width_factor(spec: PacketSpec, t: float) -> float:
    return math.sqrt(1.0 + (t / spec.diffraction_time_perp) ** 2)


def _require_paraxial(spec: PacketSpec):
    if spec.regime != "paraxial":
        raise RegimeError(f"Laguerre-Gaussian moments need a paraxial spec, got {spec.regime}")


def lg_moments(spec: PacketSpec, t: float = 0.0) -> MomentSet:
    """Radial and Cartesian moments of the paraxial (n, l) state at time t.

    <rho^2> = sigma_perp(t)^2 (2n + |l| + 1) and <p_perp^2> = sigma^2 (2n + |l| + 1).
    """
    _require_paraxial(spec)
    n, L = spec.n, spec.abs_ell
    width = _width_factor(spec, t) / spec.sigma_perp
    factor = lg_radial_mean_factor(n, L)
    second = 2 * n + L + 1
    return MomentSet(
        mean_rho=width * factor,
        mean_rho2=width ** 2 * second,
        mean_pperp=spec.sigma_perp * factor,
        mean_pperp2=spec.sigma_perp ** 2 * second,
        mean_x2=width ** 2 * second / 2,
        mean_px2=spec.sigma_perp ** 2 * second / 2,
        t=t,
    )


def uncertainty_products(spec: PacketSpec, t: float = 0.0) -> tuple[float, float]:
    """(Delta rho Delta p_perp, Delta x Delta p_x) of the paraxial state."""
    mom = lg_moments(spec, t)
    d_rho = math.sqrt(mom.mean_rho2 - mom.mean_rho ** 2)
    d_p = math.sqrt(mom.mean_pperp2 - mom.mean_pperp ** 2)
    return d_rho * d_p, math.sqrt(mom.mean_x2 * mom.mean_px2)


@dataclass(frozen=True)
class BeamGeometry:
    sigma_perp_t: float
    sigma_z_t: float
    mean_rho: float
    t_d_perp: float
    t_d_z: float
    gouy_phase: float


def beam_geometry(spec: PacketSpec, t: float = 0.0) -> BeamGeometry:
    """Transverse width, length, mean radius, diffraction times and Gouy phase at time t.

    The Gouy phase is (2n+|l|+1) arctan(t/t_d_perp) + arctan(t/t_d_z)/2, which is
    (2n+|l|+3/2) arctan(t/t_d) for equal spreads.
    """
    _require_paraxial(spec)
    td_p, td_z = spec.diffraction_time_perp, spec.diffraction_time_z
    s_perp = math.sqrt(1 + (t / td_p) ** 2) / spec.sigma_perp
    s_z = math.sqrt(1 + (t / td_z) ** 2) / spec.sigma_z
    gouy = (2 * spec.n + spec.abs_ell + 1) * math.atan(t / td_p) + 0.5 * math.atan(t / td_z)
    return BeamGeometry(s_perp, s_z, s_perp * lg_radial_mean_factor(spec.n, spec.abs_ell), td_p, td_z, gouy)


def nonparaxiality_figure_of_merit(spec: PacketSpec) -> float:
    """|l| sigma^2/m^2, the size of every non-paraxial correction."""
    return spec.abs_ell * (spec.sigma_perp / spec.mass) ** 2


def nonparaxiality_from_width(ell: int, mean_rho: float, mass: float = 1.0) -> float:
    """l^2 lambda_c^2/<rho>^2: the same figure of merit written with the beam radius.

    ``mean_rho`` is in 1/m units, so lambda_c = 1/mass.
    """
    return (ell / (mass * mean_rho)) ** 2


def required_mean_radius(ell: int, mean_pperp: float) -> float:
    """<rho> ~ |l|/<p_perp>, the radius a beam of given OAM and transverse momentum must have."""
    if mean_pperp <= 0:
        raise ValueError("mean transverse momentum must be positive")
    return abs(ell) / mean_pperp


def all_observables(spec: PacketSpec, t: float = 0.0) -> list[ObservableReport]:
    """Every observable that applies to ``spec``, in a fixed order."""
    reports: list[ObservableReport] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExpansionWarning)
        if spec.regime == "nonparaxial":
            reports += [mean_four_momentum(spec), invariant_mass(spec), mass_excess(spec)]
        if spec.regime in ("nonparaxial", "paraxial"):
            reports.append(mean_pperp(spec))
        reports.append(magnetic_moment_orbital(spec))
        if spec.helicity is not None:
            reports += [magnetic_moment_spin(spec), sok_delta(spec)]
        reports.append(electric_dipole(spec, t))
    merit = nonparaxiality_figure_of_merit(spec)
    reports.append(ObservableReport("nonparaxiality", merit, "closed-form", spec))
    return reports
