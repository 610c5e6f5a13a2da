"""Curve data for the three standard plots: radial fall-off, <p_perp>/sigma vs l, LG radial profiles."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .kinematics import PacketSpec, ParaxialityWarning
from .observables import mean_pperp
from .wavefunctions import SpacetimePoint, position_amplitude

__all__ = ["Curves", "falloff_curves", "pperp_curve", "lg_profile_curves", "count_maxima", "log_slope", "radial_variance"]


@dataclass
class Curves:
    """Named columns sharing one abscissa."""

    x_name: str
    x: np.ndarray
    columns: dict[str, np.ndarray]

    def names(self) -> list[str]:
        return [self.x_name, *self.columns]

    def rows(self):
        for i, xv in enumerate(self.x):
            yield [xv, *(col[i] for col in self.columns.values())]


def _quiet_paraxial(sigma: float, **kw) -> PacketSpec:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParaxialityWarning)
        return PacketSpec(sigma, regime="paraxial", **kw)


def falloff_curves(
    r_max: float = 40.0,
    points: int = 401,
    exact_width: float = 2.0,
    paraxial_widths: tuple[float, ...] = (2.0, 10.0),
) -> Curves:
    """ln(|psi|/|psi|_max) along a radius at t = 0 in the rest frame.

    Widths are sigma_perp = 1/sigma in Compton wavelengths. The exact state and
    each paraxial Gaussian are normalised to their own peak.
    """
    r = np.linspace(0.0, r_max, points)
    x = SpacetimePoint(r, 0.0, 0.0, 0.0)
    cols = {}
    exact = PacketSpec(1.0 / exact_width)
    amp = position_amplitude(exact, x).log_magnitude
    cols["exact"] = amp - amp.max()
    for w in paraxial_widths:
        amp = position_amplitude(_quiet_paraxial(1.0 / w), x).log_magnitude
        cols[f"paraxial_{w:g}"] = amp - amp.max()
    return Curves("r", r, cols)


def log_slope(r, log_psi, r_lo: float, r_hi: float, power: float = 0.0) -> float:
    """Least-squares slope of log|psi| + power*ln r over [r_lo, r_hi]."""
    r = np.asarray(r)
    sel = (r >= r_lo) & (r <= r_hi)
    y = np.asarray(log_psi)[sel] + power * np.log(r[sel])
    return float(np.polyfit(r[sel], y, 1)[0])


def pperp_curve(ell_max: int = 100, sigma: float = 1e-3) -> Curves:
    """Paraxial <p_perp>/sigma for l = 0..ell_max together with sqrt(l)."""
    ells = np.arange(ell_max + 1)
    vals = np.array([mean_pperp(_quiet_paraxial(sigma, ell=int(l))).value / sigma for l in ells])
    return Curves("ell", ells, {"mean_pperp_over_sigma": vals, "sqrt_ell": np.sqrt(ells)})


def lg_profile_curves(
    ells: tuple[int, ...] = (3, 50),
    ns: tuple[int, ...] = (0, 1, 3),
    x_max: float = 14.0,
    points: int = 1401,
    sigma: float = 1e-3,
) -> Curves:
    """Peak-normalised |psi|^2 of the paraxial (n, l) modes against rho*sigma at t = 0."""
    xs = np.linspace(0.0, x_max, points)
    point = SpacetimePoint(xs / sigma, 0.0, 0.0, 0.0)
    cols = {}
    for ell in ells:
        for n in ns:
            dens = 2.0 * position_amplitude(_quiet_paraxial(sigma, ell=ell, n=n), point).log_magnitude
            cols[f"l{ell}_n{n}"] = np.exp(dens - dens.max())
    return Curves("rho_sigma", xs, cols)


def count_maxima(y, floor: float = 1e-8) -> int:
    """Interior strict local maxima above ``floor`` (relative to the peak)."""
    y = np.asarray(y)
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]) & (y[1:-1] > floor * y.max())
    return int(inner.sum())


def radial_variance(x, density) -> float:
    """Variance of rho under the radial density |psi|^2 rho d rho (trapezoid rule)."""
    x = np.asarray(x)
    w = np.asarray(density) * x
    norm = np.trapezoid(w, x)
    m1 = np.trapezoid(w * x, x) / norm
    m2 = np.trapezoid(w * x * x, x) / norm
    return float(m2 - m1 * m1)
