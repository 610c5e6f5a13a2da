"""The acceptance panel: twelve checks of closed forms against the oracle and the figures.

Each check returns a :class:`CriterionResult`; :func:`run_criteria` runs a
selection. ``tol_scale`` multiplies every pass threshold, and ``corrupt``
names criteria whose thresholds are forced to zero so the harness's failure
path can be exercised.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from . import figures
from . import observables as obs
from . import oracle
from .kinematics import ELECTRON, PacketSpec
from .specfun import gamma_ratio_half
from .wavefunctions import SpacetimePoint, position_amplitude

__all__ = ["CriterionResult", "Criterion", "CRITERIA", "QUICK", "run_criteria"]

SIGMAS = (0.2, 0.1, 0.05)
ELLS = (0, 1, 5, 20)
PANEL_PBAR = 0.5
LG_PAIRS = ((0, 3), (1, 3), (3, 3))


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: str  # which closed form is being tested
    passed: bool
    worst: float  # worst measured discrepancy, in the criterion's own metric
    threshold: float
    detail: str = ""
    seconds: float = 0.0


@dataclass
class _Context:
    tol_scale: float = 1.0
    corrupt: frozenset = frozenset()
    quad_tol: float = 1e-10
    notes: list = field(default_factory=list)

    def threshold(self, number: int, value: float) -> float:
        return 0.0 if number in self.corrupt else value * self.tol_scale


def _result(number, name, checks, worst, threshold, detail="", passed=None):
    ok = (worst <= threshold) if passed is None else passed
    return CriterionResult(number, name, checks, bool(ok), float(worst), float(threshold), detail)


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


# --- 1. normalisation and orthogonality -----------------------------------


def _norm_orthogonality(ctx: _Context) -> CriterionResult:
    thr = ctx.threshold(1, 1e-8)
    worst = 0.0
    where = ""
    for s in SIGMAS:
        states = [PacketSpec(s, PANEL_PBAR, l) for l in ELLS]
        for sp in states:
            err = abs(oracle.expectation(sp, "one", ctx.quad_tol).value - 1.0)
            if err > worst:
                worst, where = err, f"norm sigma={s} l={sp.ell}"
        for i, a in enumerate(states):
            for b in states[i + 1:]:
                err = abs(oracle.overlap(a, b, ctx.quad_tol).value)
                if err > worst:
                    worst, where = err, f"overlap l={a.ell},{b.ell}"
    lg = [PacketSpec(0.05, PANEL_PBAR, l, n=n, regime="paraxial") for n, l in LG_PAIRS]
    for i, a in enumerate(lg):
        for b in lg[i:]:
            target = 1.0 if a == b else 0.0
            err = abs(oracle.overlap(a, b, ctx.quad_tol).value - target)
            if err > worst:
                worst, where = err, f"LG <{a.n},{a.ell}|{b.n},{b.ell}>"
    return _result(1, "normalization & orthogonality", "norms and overlaps of exact and LG states", worst, thr, where)


# --- 2. closed forms vs quadrature ----------------------------------------


def _closed_vs_oracle(ctx: _Context) -> CriterionResult:
    thr = ctx.threshold(2, 1e-6)
    worst, where = 0.0, ""
    for s in SIGMAS:
        for l in ELLS:
            sp = PacketSpec(s, PANEL_PBAR, l)
            q = oracle.expectations(sp, ["one", "energy", "p_z", "p_perp"], tol=ctx.quad_tol).value
            e, pz, pp = q[1] / q[0], q[2] / q[0], q[3] / q[0]
            four = obs.mean_four_momentum(sp).value
            pairs = {
                "<eps>": (e, four[0]),
                "<p_z>": (pz, four[3]),
                "<p_perp>": (pp, obs.mean_pperp(sp).value),
                "m_l": (math.sqrt(e * e - pz * pz), obs.invariant_mass(sp).value),
            }
            for name, (num, closed) in pairs.items():
                err = _rel(num, closed)
                if err > worst:
                    worst, where = err, f"{name} sigma={s} l={l}"
    return _result(2, "closed form vs oracle", "Bessel-ratio <eps>, <p_z>, <p_perp>, m_l", worst, thr, where)


# --- 3. expansion order ---------------------------------------------------


def _expansion_order(ctx: _Context) -> CriterionResult:
    tol = ctx.threshold(3, 0.25)
    worst, where, lines = 0.0, "", []
    probes = {
        "<eps>/eps_bar": lambda sp: float(obs.mean_four_momentum(sp).remainder[0]) / sp.energy_bar,
        "dm/m": lambda sp: float(obs.mass_excess(sp).remainder),
        "<p_perp>/sigma": lambda sp: float(obs.mean_pperp(sp).remainder) / sp.sigma,
    }
    for l in (1, 10):
        for name, probe in probes.items():
            coarse = abs(probe(PacketSpec(0.1, PANEL_PBAR, l)))
            fine = abs(probe(PacketSpec(0.05, PANEL_PBAR, l)))
            ratio = coarse / fine
            dev = abs(ratio / 16.0 - 1.0)
            lines.append(f"{name} l={l}: {ratio:.2f}")
            if dev > worst:
                worst, where = dev, f"{name} l={l} ratio {ratio:.2f}"
    return _result(3, "expansion order", "O(sigma^4) remainders of the K-ratio expansions", worst, tol, where + "; " + ", ".join(lines))


# --- 4. mass-excess headline ----------------------------------------------


def _mass_headline(ctx: _Context) -> CriterionResult:
    sigma = ELECTRON.sigma_from_width(0.4)
    sp = PacketSpec(sigma, ELECTRON.momentum_from_kinetic(300.0), 1000)
    rep = obs.mass_excess(sp)
    in_window = 1e-4 <= rep.value <= 1e-3
    lead_err = _rel(rep.expansion, rep.value)
    thr = ctx.threshold(4, 0.03)
    return _result(
        4,
        "mass-excess headline",
        "exact double K-ratio of the mass excess at l=1000, 0.4 nm",
        lead_err,
        thr,
        f"dm/m = {rep.value:.4e}, leading term {rep.expansion:.4e}, window [1e-4, 1e-3] {'ok' if in_window else 'missed'}",
        passed=in_window and lead_err <= thr,
    )


# --- 5. Fourier consistency -----------------------------------------------


def _sample_points(rng, count):
    return [
        SpacetimePoint(rng.uniform(0.2, 15.0), rng.uniform(-np.pi, np.pi), rng.uniform(-8.0, 8.0), rng.uniform(-6.0, 6.0))
        for _ in range(count)
    ]


def _peak_magnitude(sp: PacketSpec) -> float:
    rho = np.linspace(0.0, 20.0, 201)
    z = np.linspace(-10.0, 10.0, 101)
    R, Z = np.meshgrid(rho, z)
    return float(np.exp(position_amplitude(sp, SpacetimePoint(R, 0.0, Z, 0.0)).log_magnitude.max()))


def _fourier(ctx: _Context) -> CriterionResult:
    thr = ctx.threshold(5, 1e-6)
    rng = np.random.default_rng(20240605)
    worst, where, used = 0.0, "", 0
    for l in (0, 2):
        sp = PacketSpec(0.2, PANEL_PBAR, l)
        peak = _peak_magnitude(sp)
        for x in _sample_points(rng, 10):
            closed = complex(position_amplitude(sp, x).to_complex())
            if abs(closed) < 1e-6 * peak:
                continue
            used += 1
            err = abs(oracle.fourier_to_x(sp, x, tol=1e-10).value - closed) / abs(closed)
            if err > worst:
                worst, where = err, f"l={l} rho={float(x.rho):.2f} z={float(x.z):.2f} t={float(x.t):.2f}"
    return _result(5, "Fourier consistency", "exact position-space vortex state vs Hankel transform", worst, thr, f"{used} points; worst at {where}")


# --- 6. wave-equation residuals -------------------------------------------

_PDE_POINT = (0.9, 1.3, 0.6, 1.1)  # (t, x, y, z)


def _pde(ctx: _Context) -> CriterionResult:
    ratio_tol = ctx.threshold(6, 0.5)
    steps = (0.04, 0.02, 0.01)
    worst, lines = 0.0, []
    for sp in (PacketSpec(0.2, PANEL_PBAR, 0), PacketSpec(0.2, PANEL_PBAR, 2)):
        res = [oracle.pde_residual(oracle.position_evaluator(sp), _PDE_POINT, h) for h in steps]
        for a, b in zip(res, res[1:]):
            dev = abs(a / b - 4.0)
            worst = max(worst, dev)
            lines.append(f"l={sp.ell}: {a / b:.3f}")
    exact = oracle.pde_residual(oracle.position_evaluator(PacketSpec(0.1, PANEL_PBAR, 0)), _PDE_POINT, 0.01)
    par_spec = PacketSpec(0.1, PANEL_PBAR, 0, regime="paraxial")
    par = [oracle.pde_residual(oracle.position_evaluator(par_spec), _PDE_POINT, h) for h in steps]
    plateau = par[-1] >= 10 * exact * (ctx.tol_scale if 6 not in ctx.corrupt else float("inf"))
    flat = abs(par[-1] / par[-2] - 1.0) < 0.5
    detail = f"halving ratios {', '.join(lines)}; paraxial {par[-1]:.2e} vs exact {exact:.2e} at h=0.01"
    return _result(6, "PDE residuals", "Klein-Gordon residual of exact and paraxial states", worst, ratio_tol, detail,
                   passed=worst <= ratio_tol and plateau and flat)


# --- 7. fall-off figure -----------------------------------------------------


def _fig1(ctx: _Context) -> CriterionResult:
    curves = figures.falloff_curves()
    slope = figures.log_slope(curves.x, curves.columns["exact"], 20.0, 40.0, power=1.5)
    slope_err = abs(slope + 1.0)
    width_err = 0.0
    for w in (2.0, 10.0):
        y = curves.columns[f"paraxial_{w:g}"]
        fitted = math.sqrt(-1.0 / (2.0 * np.polyfit(curves.x ** 2, y, 1)[0]))
        width_err = max(width_err, _rel(fitted, w))
    thr_s, thr_w = ctx.threshold(7, 0.02), ctx.threshold(7, 0.01)
    return _result(7, "radial fall-off", "exponential fall-off of the exact state, Gaussian paraxial law", slope_err, thr_s,
                   f"slope {slope:.4f}; worst paraxial width error {width_err:.2e}",
                   passed=slope_err <= thr_s and width_err <= thr_w)


# --- 8. <p_perp>/sigma curve ------------------------------------------------


def _fig2(ctx: _Context) -> CriterionResult:
    curve = figures.pperp_curve(100)
    ells = curve.x
    reference = np.exp(gammaln(ells + 1.5) - gammaln(ells + 1.0))
    err = float(np.max(np.abs(curve.columns["mean_pperp_over_sigma"] / reference - 1.0)))
    big = ells >= 50
    sqrt_dev = float(np.max(np.abs(curve.columns["mean_pperp_over_sigma"][big] / np.sqrt(ells[big]) - 1.0)))
    v1000 = gamma_ratio_half(1000)
    thr = ctx.threshold(8, 1e-10)
    ok = err <= thr and sqrt_dev <= ctx.threshold(8, 0.02) and abs(v1000 - 31.6) < ctx.threshold(8, 0.05)
    return _result(8, "mean p_perp curve", "<p_perp>/sigma = Gamma(l+3/2)/Gamma(l+1)", err, thr,
                   f"max dev from sqrt(l) for l>=50: {sqrt_dev:.2e}; value at l=1000: {v1000:.4f}", passed=ok)


# --- 9. LG radial profiles --------------------------------------------------


def _fig3(ctx: _Context) -> CriterionResult:
    curves = figures.lg_profile_curves()
    bad = []
    for ell in (3, 50):
        var0 = figures.radial_variance(curves.x, curves.columns[f"l{ell}_n0"])
        for n in (0, 1, 3):
            col = curves.columns[f"l{ell}_n{n}"]
            k = figures.count_maxima(col)
            if k != n + 1 or 9 in ctx.corrupt:
                bad.append(f"l={ell} n={n}: {k} maxima")
            if n > 0 and not figures.radial_variance(curves.x, col) > var0:
                bad.append(f"l={ell} n={n}: not wider than n=0")
    return _result(9, "LG ring count", "n+1 radial maxima, super-Poissonian width", len(bad), 0, "; ".join(bad) or "all counts n+1",
                   passed=not bad)


# --- 10. magnetic moments ---------------------------------------------------


def _moments(ctx: _Context) -> CriterionResult:
    thr_c, thr_d = ctx.threshold(10, 0.05), ctx.threshold(10, 0.10)
    s = 0.02
    worst_c, worst_d, lines = 0.0, 0.0, []
    for pbar in (0.0, 1.0):
        spin0 = None
        for ell in (0, 20):
            sp = PacketSpec(s, pbar, ell, helicity=0.5)
            eb = sp.energy_bar
            fm = oracle.moment_quadrature_fermion(sp, ctx.quad_tol)
            inv = oracle.expectation(sp, oracle.ExpectationSpec("inverse_2energy", normalized=True), ctx.quad_tol).value
            # corrections relative to the leading 1/(2 eps_bar)
            orb_num = 1.0 - 2 * eb * inv
            orb_exp = 1.0 - 2 * eb * obs.mean_inverse_energy(sp).value
            spin_num = 1.0 - 2 * eb * fm.mu_spin[2]
            spin_exp = 1.0 - 2 * eb * float(obs.magnetic_moment_spin(sp).value[2])
            eb_c = abs(orb_num / orb_exp - 1.0)
            es_c = abs(spin_num / spin_exp - 1.0)
            worst_c = max(worst_c, eb_c, es_c)
            if ell > 0 and abs(fm.mu_orbital[2] - ell * inv) > 1e-14:
                worst_c = max(worst_c, 1.0)
            lines.append(f"pbar={pbar} l={ell}: orb {eb_c:.1e} spin {es_c:.1e}")
            if ell == 0:
                spin0 = spin_num
            else:
                extracted = 2.0 * (spin_num - spin0) - ell * s * s
                delta = obs.sok_delta(sp).value
                err = _rel(extracted, delta)
                worst_d = max(worst_d, err)
                lines.append(f"Delta {delta:.3e} vs {extracted:.3e}")
    return _result(10, "magnetic moments", "O(sigma^2) orbital and spin moment corrections, spin-orbit Delta", worst_c, thr_c,
                   "; ".join(lines), passed=worst_c <= thr_c and worst_d <= thr_d)


# --- 11. Lorentz invariance -------------------------------------------------


def _boost_point(x, rapidity):
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    t, z = float(x.t), float(x.z)
    return SpacetimePoint(float(x.rho), float(x.phi_r), sh * t + ch * z, ch * t + sh * z)


def _lorentz(ctx: _Context) -> CriterionResult:
    thr_c, thr_a = ctx.threshold(11, 1e-8), ctx.threshold(11, 1e-6)
    worst_c, worst_a = 0.0, 0.0
    base = PacketSpec(0.05, 0.3, 5)
    par = PacketSpec(0.05, 0.3, 5, n=1, regime="paraxial")
    exact_amp = PacketSpec(0.2, 0.3, 2)
    rng = np.random.default_rng(7)
    for eta in (1.0, 2.0):
        b = base.boosted(eta)
        worst_c = max(worst_c, _rel(obs.invariant_mass(b).value, obs.invariant_mass(base).value))
        worst_c = max(worst_c, _rel(obs.mass_excess(b).value, obs.mass_excess(base).value))
        pb = par.boosted(eta)
        for t in (0.5 * par.diffraction_time_perp, 2.0 * par.diffraction_time_perp):
            x = SpacetimePoint(0.0, 0.0, par.u_bar * t, t)
            xb = _boost_point(x, eta)
            worst_c = max(worst_c, _rel(float(xb.t) / pb.diffraction_time_perp, t / par.diffraction_time_perp))
            worst_c = max(worst_c, _rel(obs.beam_geometry(pb, float(xb.t)).gouy_phase, obs.beam_geometry(par, t).gouy_phase))
        for _ in range(5):
            t = rng.uniform(-2, 2) * par.diffraction_time_perp
            # the paraxial state is a scalar on the packet's world sheet z = u_bar t
            x = SpacetimePoint(rng.uniform(1.0, 60.0), rng.uniform(-3, 3), par.u_bar * t, t)
            a0 = position_amplitude(par, x).log_magnitude
            a1 = position_amplitude(pb, _boost_point(x, eta)).log_magnitude
            worst_a = max(worst_a, abs(math.expm1(float(a1 - a0))))
            xe = SpacetimePoint(rng.uniform(0.5, 8.0), rng.uniform(-3, 3), rng.uniform(-5, 5), rng.uniform(-5, 5))
            e0 = position_amplitude(exact_amp, xe).log_magnitude
            e1 = position_amplitude(exact_amp.boosted(eta), _boost_point(xe, eta)).log_magnitude
            worst_a = max(worst_a, abs(math.expm1(float(e1 - e0))))
    return _result(11, "Lorentz invariance", "m_l, dm/m, t/t_d, Gouy phase and |psi| under boosts", worst_c, thr_c,
                   f"closed forms {worst_c:.1e}, amplitudes {worst_a:.1e}", passed=worst_c <= thr_c and worst_a <= thr_a)


# --- 12. uncertainty relations ----------------------------------------------


def _uncertainty(ctx: _Context) -> CriterionResult:
    thr_x, thr_r = ctx.threshold(12, 1e-8), ctx.threshold(12, 1e-3)
    worst_x, where = 0.0, ""
    for n, ell in ((0, 0), (0, 3), (1, 3), (2, 5)):
        sp = PacketSpec(0.05, 0.5, ell, n=n, regime="paraxial")
        for tau in (0.0, 1.0):
            t = tau * sp.diffraction_time_perp
            x2 = oracle.position_moment(sp, "x2", t).value
            px2 = oracle.expectations(sp, ["one", "p_x2"], tol=1e-11).value
            product = math.sqrt(x2 * px2[1] / px2[0])
            closed = 0.5 * (n + ell + 1) * math.sqrt(1 + tau * tau)
            err = _rel(product, closed)
            if err > worst_x:
                worst_x, where = err, f"n={n} l={ell} t/t_d={tau}: quadrature {product:.6f} vs closed form {closed:.6f}"
    sp = PacketSpec(0.01, 0.0, 100, regime="paraxial")
    moment = obs.lg_moments(sp)
    pp = oracle.expectations(sp, ["one", "p_perp", "p_perp2"], tol=1e-12).value
    d_p = math.sqrt(pp[2] / pp[0] - (pp[1] / pp[0]) ** 2)
    d_rho = math.sqrt(moment.mean_rho2 - moment.mean_rho ** 2)
    rho_err = abs(d_rho * d_p - (0.25 - 1 / (32 * 101)))
    rng = np.random.default_rng(12)
    squeezed = 0
    for _ in range(50):
        s = 10 ** rng.uniform(-3, -1.5)
        ell = int(rng.integers(-60, 61))
        n = int(rng.integers(0, 6))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spc = PacketSpec(s, float(rng.uniform(0, 3)), ell, n=n, regime="paraxial")
        m = obs.lg_moments(spc, float(rng.uniform(0, 3)) * spc.diffraction_time_perp)
        if math.sqrt(m.mean_px2) < s / math.sqrt(2) * (1 - 1e-12) or math.sqrt(m.mean_x2) < 1 / (s * math.sqrt(2)) * (1 - 1e-12):
            squeezed += 1
    ok = worst_x <= thr_x and rho_err <= thr_r and squeezed == 0
    return _result(12, "uncertainty suite", "Delta x Delta p_x law, Delta rho Delta p_perp at l=100, no squeezing", worst_x, thr_x,
                   f"worst {where}; Delta rho Delta p_perp off by {rho_err:.1e}; squeezed cases {squeezed}", passed=ok)


@dataclass(frozen=True)
class Criterion:
    number: int
    run: Callable[[_Context], CriterionResult]
    quick: bool


CRITERIA = {
    1: Criterion(1, _norm_orthogonality, True),
    2: Criterion(2, _closed_vs_oracle, False),
    3: Criterion(3, _expansion_order, True),
    4: Criterion(4, _mass_headline, True),
    5: Criterion(5, _fourier, False),
    6: Criterion(6, _pde, True),
    7: Criterion(7, _fig1, True),
    8: Criterion(8, _fig2, True),
    9: Criterion(9, _fig3, True),
    10: Criterion(10, _moments, False),
    11: Criterion(11, _lorentz, True),
    12: Criterion(12, _uncertainty, True),
}
QUICK = tuple(k for k, c in CRITERIA.items() if c.quick)


def run_criteria(
    numbers=None,
    quick: bool = False,
    tol_scale: float = 1.0,
    corrupt=(),
    quad_tol: float = 1e-10,
) -> list[CriterionResult]:
    """Run the selected criteria in numeric order and return their results."""
    if numbers is None:
        numbers = QUICK if quick else tuple(CRITERIA)
    unknown = set(numbers) - set(CRITERIA)
    if unknown:
        raise KeyError(f"unknown criteria {sorted(unknown)}")
    ctx = _Context(tol_scale=tol_scale, corrupt=frozenset(corrupt), quad_tol=quad_tol)
    out = []
    for k in sorted(numbers):
        start = time.perf_counter()
        res = CRITERIA[k].run(ctx)
        res.seconds = time.perf_counter() - start
        out.append(res)
    return out
