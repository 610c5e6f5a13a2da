"""Brute-force checks of the closed forms.

Momentum expectation values, overlaps and Fourier transforms are reduced to
two-dimensional (p_perp, p_z) integrals: the azimuthal integral is done
analytically (a factor 2 pi, or the Hankel kernel J_l) whenever the integrand
allows it, and otherwise by a uniform rule in phi that is exact for the
low-order trigonometric weights used here. The remaining 2D integral goes to
``scipy.integrate.cubature`` (adaptive Genz-Malik / Gauss-Kronrod), which is
deterministic for fixed inputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from .kinematics import PacketSpec
from .wavefunctions import (
    MomentumPoint,
    SpacetimePoint,
    bispinor_u,
    momentum_amplitude,
    phase_energy,
    position_amplitude,
)

__all__ = [
    "QuadratureResult",
    "QuadratureError",
    "CancellationWarning",
    "ExpectationSpec",
    "WEIGHTS",
    "expectation",
    "expectations",
    "overlap",
    "fourier_to_x",
    "fourier_to_x_fermion",
    "position_norm",
    "position_moment",
    "pde_residual",
    "position_evaluator",
    "FermionMoments",
    "moment_quadrature_fermion",
]

TRUNCATION_SIGMAS = 12.0
AZIMUTHAL_NODES = 16


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class CancellationWarning(UserWarning):
    """Finite-difference step is so small that round-off dominates."""


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float | np.ndarray
    abs_error: float | np.ndarray
    evaluations: int
    truncation_bound: float = 0.0


@dataclass
class _Grid:
    """Integration nodes handed to the weight functions."""

    p_perp: np.ndarray
    phi: np.ndarray
    p_z: np.ndarray
    eps: np.ndarray
    spec: PacketSpec

    @property
    def p_x(self):
        return self.p_perp * np.cos(self.phi)

    @property
    def p_y(self):
        return self.p_perp * np.sin(self.phi)


def _zeta(g: _Grid) -> float:
    if g.spec.helicity is None:
        raise ValueError("spin weights need a packet with helicity")
    return 2.0 * g.spec.helicity


def _spin_moment_z(g: _Grid):
    m = g.spec.mass
    z = _zeta(g)
    return z * ((g.eps + m) + g.p_z ** 2 / (g.eps + m)) / (2.0 * g.eps) ** 2


def _spin_moment_x(g: _Grid):
    m = g.spec.mass
    return _zeta(g) * g.p_x * g.p_z / ((g.eps + m) * (2.0 * g.eps) ** 2)


def _with_pole(values, p_perp):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p_perp > 0, values / np.where(p_perp > 0, p_perp, 1.0), 0.0)


# name -> (weight, depends on phi)
WEIGHTS: dict[str, tuple[Callable[[_Grid], np.ndarray], bool]] = {
    "one": (lambda g: np.ones_like(g.p_perp), False),
    "energy": (lambda g: g.eps, False),
    "p_z": (lambda g: g.p_z, False),
    "p_perp": (lambda g: g.p_perp, False),
    "p_perp2": (lambda g: g.p_perp ** 2, False),
    "p_z2": (lambda g: g.p_z ** 2, False),
    "p_x": (lambda g: g.p_x, True),
    "p_y": (lambda g: g.p_y, True),
    "p_x2": (lambda g: g.p_x ** 2, True),
    "inverse_2energy": (lambda g: 1.0 / (2.0 * g.eps), False),
    "velocity_z": (lambda g: g.p_z / g.eps, False),
    "velocity_x": (lambda g: g.p_x / g.eps, True),
    "spin_moment_z": (_spin_moment_z, False),
    "spin_moment_x": (_spin_moment_x, True),
    # d(phase)/dp = l (z x p)/p_perp^2
    "phase_gradient_x": (lambda g: _with_pole(-g.spec.ell * np.sin(g.phi), g.p_perp), True),
    "phase_gradient_y": (lambda g: _with_pole(g.spec.ell * np.cos(g.phi), g.p_perp), True),
    # (p x zeta)/(2 eps (eps + m)) with zeta along z
    "spin_dipole_x": (lambda g: _zeta(g) * g.p_y / (2 * g.eps * (g.eps + g.spec.mass)), True),
    "spin_dipole_y": (lambda g: -_zeta(g) * g.p_x / (2 * g.eps * (g.eps + g.spec.mass)), True),
}

MEASURES = ("invariant", "paraxial", "plain")


@dataclass(frozen=True)
class ExpectationSpec:
    """A named weight from :data:`WEIGHTS` and the momentum measure to average with.

    ``measure=None`` picks the natural one for the packet's regime.
    """

    integrand: str
    measure: str | None = None
    normalized: bool = False

    def __post_init__(self):
        if self.integrand not in WEIGHTS:
            raise KeyError(f"unknown integrand {self.integrand!r}; choose from {sorted(WEIGHTS)}")
        if self.measure is not None and self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}")


def _natural_measure(spec: PacketSpec) -> str:
    return {"nonrelativistic": "plain", "nonparaxial": "invariant", "paraxial": "paraxial"}[spec.regime]


def _measure_factor(measure: str, spec: PacketSpec, eps):
    if measure == "invariant":
        return 1.0 / (2.0 * eps)
    if measure == "paraxial":
        return np.full_like(eps, 1.0 / (2.0 * spec.mean_four_momentum_parameter.t))
    return np.ones_like(eps)


def _box(spec: PacketSpec, width: float = TRUNCATION_SIGMAS):
    """(p_perp, p_z) box holding the packet out to ``width`` spreads."""
    sp, sz = spec.sigma_perp, spec.sigma_z
    centre = sp * math.sqrt(spec.abs_ell + 2 * spec.n + 0.5)
    lo = max(0.0, centre - width * sp)
    hi = centre + width * sp
    if spec.regime == "nonrelativistic":
        half = width * sz
    else:
        # longitudinal Lorentz extension of the momentum spread
        half = width * sz * spec.mean_four_momentum_parameter.t / spec.mass
    if spec.regime == "nonparaxial" and spec.sigma > 0.05:
        # the exact packet has exponential, not Gaussian, tails at large sigma/m
        hi += width * sp * spec.sigma / spec.mass * 4
        half *= 1.0 + 4 * spec.sigma / spec.mass
    return np.array([lo, spec.pbar - half]), np.array([hi, spec.pbar + half])


def _density(spec: PacketSpec, p_perp, p_z, measure: str):
    """|psi|^2 times measure times p_perp/(4 pi^2), i.e. d^3p/(2pi)^3 with phi done."""
    q = MomentumPoint(p_perp, 0.0, p_z)
    amp = momentum_amplitude(spec, q)
    eps = np.sqrt(p_perp ** 2 + p_z ** 2 + spec.mass ** 2)
    return np.exp(2.0 * amp.log_magnitude) * _measure_factor(measure, spec, eps) * p_perp / (4 * np.pi ** 2), eps


def _truncation_bound(fn, a, b, n_edge: int = 64) -> float:
    """Crude tail bound: largest boundary value times the box perimeter times a decay length."""
    s = np.linspace(0.0, 1.0, n_edge)
    edges = [
        np.column_stack([a[0] + s * (b[0] - a[0]), np.full_like(s, a[1])]),
        np.column_stack([a[0] + s * (b[0] - a[0]), np.full_like(s, b[1])]),
        np.column_stack([np.full_like(s, b[0]), a[1] + s * (b[1] - a[1])]),
    ]
    if a[0] > 0:
        edges.append(np.column_stack([np.full_like(s, a[0]), a[1] + s * (b[1] - a[1])]))
    worst = max(float(np.max(np.abs(fn(e)))) for e in edges)
    decay = (b[0] - a[0] + b[1] - a[1]) / (2.0 * TRUNCATION_SIGMAS)
    return worst * 2.0 * (b[0] - a[0] + b[1] - a[1]) * decay


def _cubature(fn, a, b, rtol: float, atol: float, max_subdivisions: int = 20000) -> QuadratureResult:
    res = integrate.cubature(fn, a, b, rule="gk21", rtol=rtol, atol=atol, max_subdivisions=max_subdivisions)
    evals = int(res.subdivisions + 1) * 21 * 21
    if res.status != "converged":
        raise QuadratureError(
            f"cubature did not converge (estimate {res.estimate}, error {res.error})",
            res.estimate,
            res.error,
        )
    bound = _truncation_bound(fn, a, b)
    return QuadratureResult(res.estimate, np.asarray(res.error) + bound, evals, bound)


def _azimuthal_average(weight, grid_kwargs, spec):
    phis = 2 * np.pi * np.arange(AZIMUTHAL_NODES) / AZIMUTHAL_NODES
    total = 0.0
    for phi in phis:
        g = _Grid(phi=np.full_like(grid_kwargs["p_perp"], phi), spec=spec, **grid_kwargs)
        total = total + weight(g)
    return total / AZIMUTHAL_NODES


def expectations(
    spec: PacketSpec,
    names: list[str] | tuple[str, ...],
    measure: str | None = None,
    tol: float = 1e-10,
) -> QuadratureResult:
    """Integrals of several weights against the packet density at once.

    Values are raw integrals, not divided by the norm; include ``"one"`` to
    normalise. Returns an array-valued :class:`QuadratureResult`.
    """
    measure = measure or _natural_measure(spec)
    weights = [WEIGHTS[name] for name in names]
    a, b = _box(spec)

    def fn(x):
        p_perp, p_z = x[:, 0], x[:, 1]
        dens, eps = _density(spec, p_perp, p_z, measure)
        kw = dict(p_perp=p_perp, p_z=p_z, eps=eps)
        cols = []
        for w, azimuthal in weights:
            if azimuthal:
                cols.append(_azimuthal_average(w, kw, spec))
            else:
                cols.append(w(_Grid(phi=np.zeros_like(p_perp), spec=spec, **kw)))
        return dens[:, None] * np.column_stack(cols)

    return _cubature(fn, a, b, rtol=tol * 0.1, atol=tol * 1e-3)


def expectation(spec: PacketSpec, what: ExpectationSpec | str, tol: float = 1e-10) -> QuadratureResult:
    """Mean of one named weight over the packet's momentum density.

    With ``what.normalized`` the result is divided by the computed norm.
    """
    if isinstance(what, str):
        what = ExpectationSpec(what)
    names = [what.integrand] + (["one"] if what.normalized else [])
    res = expectations(spec, names, what.measure, tol)
    if not what.normalized:
        return QuadratureResult(float(res.value[0]), float(res.abs_error[0]), res.evaluations, res.truncation_bound)
    value = res.value[0] / res.value[1]
    err = abs(value) * (res.abs_error[0] / max(abs(res.value[0]), 1e-300) + res.abs_error[1] / res.value[1])
    return QuadratureResult(float(value), float(err), res.evaluations, res.truncation_bound)


def overlap(spec_a: PacketSpec, spec_b: PacketSpec, tol: float = 1e-10) -> QuadratureResult:
    """<a|b> under the measure natural to ``spec_a``'s regime.

    Different l gives an exactly vanishing azimuthal integral, reported with
    zero error and no evaluations.
    """
    if spec_a.mass != spec_b.mass:
        raise ValueError("overlap needs equal masses")
    if spec_a.ell != spec_b.ell:
        return QuadratureResult(0j, 0.0, 0)
    measure = _natural_measure(spec_a)
    a1, b1 = _box(spec_a)
    a2, b2 = _box(spec_b)
    a, b = np.minimum(a1, a2), np.maximum(b1, b2)

    def fn(x):
        q = MomentumPoint(x[:, 0], 0.0, x[:, 1])
        amp = momentum_amplitude(spec_a, q).conjugate() * momentum_amplitude(spec_b, q)
        eps = np.sqrt(x[:, 0] ** 2 + x[:, 1] ** 2 + spec_a.mass ** 2)
        val = amp.to_complex() * _measure_factor(measure, spec_a, eps) * x[:, 0] / (4 * np.pi ** 2)
        return np.column_stack([val.real, val.imag])

    res = _cubature(fn, a, b, rtol=tol * 0.1, atol=tol * 1e-3)
    err = float(np.hypot(*res.abs_error))
    return QuadratureResult(complex(res.value[0], res.value[1]), err, res.evaluations, res.truncation_bound)


def _fourier_integrand(spec: PacketSpec, x: SpacetimePoint, harmonics, spinor=None):
    """Integrand factory for d^3p/(2pi)^3 * measure * psi(p) e^{-i p x} per spinor component."""
    measure = _natural_measure(spec)
    rho, phi_r, z, t = (float(v) for v in (x.rho, x.phi_r, x.z, x.t))

    def fn(pts):
        p_perp, p_z = pts[:, 0], pts[:, 1]
        q = MomentumPoint(p_perp, 0.0, p_z)
        amp = momentum_amplitude(spec, q).to_complex()
        eps = np.sqrt(p_perp ** 2 + p_z ** 2 + spec.mass ** 2)
        if spec.regime == "nonrelativistic":
            energy = (p_perp ** 2 + p_z ** 2) / (2.0 * spec.mass)
        else:
            energy = phase_energy(spec, q)
        carrier = np.exp(-1j * energy * t + 1j * p_z * z)
        base = amp * carrier * _measure_factor(measure, spec, eps) * p_perp / (4 * np.pi ** 2)
        cols = []
        for idx, harmonic in enumerate(harmonics):
            # int dphi e^{i m phi} e^{i p rho cos(phi - phi_r)} = 2 pi i^m J_m e^{i m phi_r}
            kernel = (1j ** harmonic) * special.jv(harmonic, p_perp * rho) * np.exp(1j * harmonic * phi_r)
            radial = base * kernel
            if spinor is not None:
                radial = radial * spinor(p_perp, p_z, eps, idx)
            cols += [radial.real, radial.imag]
        return np.column_stack(cols)

    return fn


def _fourier_box(spec: PacketSpec):
    a, b = _box(spec)
    if spec.regime == "nonparaxial":
        # the exact packet has a heavy exponential tail in momentum
        b = b.copy()
        b[0] += 2 * TRUNCATION_SIGMAS * spec.sigma_perp
    return a, b


def fourier_to_x(spec: PacketSpec, x: SpacetimePoint, tol: float = 1e-9) -> QuadratureResult:
    """Numerical position-space amplitude at one point, from the momentum state.

    Uses the regime's own measure: 1/(2 eps) for the exact state, 1/(2 eps_bar)
    with the quadratic energy for the paraxial one, and the plain measure with
    e^{i p r} for the Schroedinger packet.
    """
    fn = _fourier_integrand(spec, x, [spec.ell])
    a, b = _fourier_box(spec)
    res = _cubature(fn, a, b, rtol=tol * 0.1, atol=tol * 1e-6)
    return QuadratureResult(complex(res.value[0], res.value[1]), float(np.hypot(*res.abs_error)), res.evaluations, res.truncation_bound)


def fourier_to_x_fermion(spec: PacketSpec, x: SpacetimePoint, tol: float = 1e-8) -> QuadratureResult:
    """Position-space bispinor: int d^3p/(2pi)^3 u(p)/(2 eps) psi(p) e^{-ipx}.

    Each bispinor component carries its own azimuthal harmonic (l, l+1 or
    l-1), so each gets its own Hankel kernel.
    """
    if spec.helicity is None:
        raise ValueError("fermion transform needs a helicity")
    ell = spec.ell
    if spec.helicity == 0.5:
        harmonics = [ell, ell, ell, ell + 1]
    else:
        harmonics = [ell, ell, ell - 1, ell]
    m = spec.mass

    def spinor(p_perp, p_z, eps, idx):
        # u(p) at phi = 0, i.e. with the e^{+-i phi} factor moved into the harmonic
        cols = bispinor_u(np.column_stack([p_perp, np.zeros_like(p_perp), p_z]), spec.helicity, m)
        return cols[:, idx]

    fn = _fourier_integrand(spec, x, harmonics, spinor)
    a, b = _fourier_box(spec)
    res = _cubature(fn, a, b, rtol=tol * 0.1, atol=tol * 1e-6)
    vals = res.value[0::2] + 1j * res.value[1::2]
    errs = np.hypot(res.abs_error[0::2], res.abs_error[1::2])
    return QuadratureResult(vals, errs, res.evaluations, res.truncation_bound)


_POSITION_WEIGHTS = {
    "one": lambda rho, z: np.ones_like(rho),
    "rho": lambda rho, z: rho,
    "rho2": lambda rho, z: rho ** 2,
    "x2": lambda rho, z: rho ** 2 / 2,  # azimuthal average of x^2
    "z": lambda rho, z: z,
}


def position_moment(spec: PacketSpec, weight: str = "one", t: float = 0.0, tol: float = 1e-9) -> QuadratureResult:
    """int d^3x 2 eps_bar |psi_par(x)|^2 w(x) for an azimuthally symmetric weight.

    The azimuthal integral is done analytically; ``weight`` is one of
    ``one``, ``rho``, ``rho2``, ``x2`` or ``z``.
    """
    if spec.regime != "paraxial":
        raise ValueError("position-space moments are defined for paraxial states")
    w = _POSITION_WEIGHTS[weight]
    eb = spec.mean_four_momentum_parameter.t
    w_perp = math.sqrt(1 + (t / spec.diffraction_time_perp) ** 2) / spec.sigma_perp
    w_z = math.sqrt(1 + (t / spec.diffraction_time_z) ** 2) / spec.sigma_z * spec.mass / eb
    centre = w_perp * math.sqrt(spec.abs_ell + 2 * spec.n + 0.5)
    zc = spec.u_bar * t
    a = np.array([max(0.0, centre - TRUNCATION_SIGMAS * w_perp), zc - TRUNCATION_SIGMAS * w_z])
    b = np.array([centre + TRUNCATION_SIGMAS * w_perp, zc + TRUNCATION_SIGMAS * w_z])

    def fn(pts):
        x = SpacetimePoint(pts[:, 0], 0.0, pts[:, 1], t)
        amp = position_amplitude(spec, x)
        dens = 2 * eb * 2 * np.pi * pts[:, 0] * np.exp(2 * amp.log_magnitude)
        return (dens * w(pts[:, 0], pts[:, 1]))[:, None]

    res = _cubature(fn, a, b, rtol=tol * 0.1, atol=tol * 1e-3)
    return QuadratureResult(float(res.value[0]), float(res.abs_error[0]), res.evaluations, res.truncation_bound)


def position_norm(spec: PacketSpec, t: float = 0.0, tol: float = 1e-9) -> QuadratureResult:
    """int d^3x 2 eps_bar |psi_par(x)|^2, which should be 1."""
    return position_moment(spec, "one", t, tol)


# --- finite-difference wave-equation residuals ---------------------------


def position_evaluator(spec: PacketSpec) -> Callable:
    """Cartesian closure (t, x, y, z) -> complex amplitude for the packet's regime."""

    def evaluate(t, x, y, z):
        return position_amplitude(spec, SpacetimePoint.from_cartesian(t, x, y, z)).to_complex()

    return evaluate


def pde_residual(
    state: Callable,
    x,
    h: float,
    equation: str = "klein-gordon",
    mass: float = 1.0,
) -> float:
    """Relative residual of a wave equation by second-order central differences.

    ``state(t, x, y, z)`` returns complex amplitudes. For Klein-Gordon the
    residual (d_t^2 - lap + m^2) psi is divided by |m^2 psi|; for Schroedinger
    (i d_t + lap/2m) psi is divided by |m psi|.
    """
    if h < 1e-4 / mass:
        warnings.warn(f"step h={h} is below 1e-4 Compton wavelengths", CancellationWarning, stacklevel=2)
    x0 = np.asarray(x, dtype=float)
    offsets = np.vstack([np.zeros(4), np.eye(4) * h, -np.eye(4) * h])
    pts = x0[None, :] + offsets
    vals = state(pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3])
    c = vals[0]
    second = [(vals[1 + k] - 2 * c + vals[5 + k]) / (h * h) for k in range(4)]
    lap = second[1] + second[2] + second[3]
    if equation == "klein-gordon":
        return float(abs(second[0] - lap + mass * mass * c) / abs(mass * mass * c))
    if equation == "schroedinger":
        dt = (vals[1] - vals[5]) / (2 * h)
        return float(abs(1j * dt + lap / (2 * mass)) / abs(mass * c))
    raise ValueError(f"unknown equation {equation!r}")


# --- fermion moments -----------------------------------------------------


@dataclass(frozen=True)
class FermionMoments:
    """Quadrature values of the fermion's magnetic and electric dipole averages."""

    mu_orbital: np.ndarray
    mu_spin: np.ndarray
    mean_velocity: np.ndarray
    dipole_phase_term: np.ndarray
    dipole_spin_term: np.ndarray
    abs_error: float
    extras: dict = field(default_factory=dict)

    def electric_dipole(self, t: float) -> np.ndarray:
        return self.mean_velocity * t - self.dipole_phase_term + self.dipole_spin_term


def moment_quadrature_fermion(spec: PacketSpec, tol: float = 1e-10) -> FermionMoments:
    """mu_b = l <1/(2 eps)> z, mu_s = <(zeta (eps+m) + p (p.zeta)/(eps+m))/(2 eps)^2>, and d_f terms."""
    if spec.helicity is None:
        raise ValueError("fermion moments need a helicity")
    names = [
        "one",
        "inverse_2energy",
        "spin_moment_z",
        "spin_moment_x",
        "velocity_z",
        "velocity_x",
        "phase_gradient_x",
        "phase_gradient_y",
        "spin_dipole_x",
        "spin_dipole_y",
    ]
    res = expectations(spec, names, tol=tol)
    v = dict(zip(names, res.value / res.value[0]))
    rel = float(np.max(res.abs_error / np.maximum(np.abs(res.value), 1e-300)))
    zero = 0.0
    return FermionMoments(
        mu_orbital=np.array([zero, zero, spec.ell * v["inverse_2energy"]]),
        mu_spin=np.array([v["spin_moment_x"], zero, v["spin_moment_z"]]),
        mean_velocity=np.array([v["velocity_x"], zero, v["velocity_z"]]),
        dipole_phase_term=np.array([v["phase_gradient_x"], v["phase_gradient_y"], zero]),
        dipole_spin_term=np.array([v["spin_dipole_x"], v["spin_dipole_y"], zero]),
        abs_error=rel,
        extras={"norm": float(res.value[0])},
    )
