import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexwave import oracle
from vortexwave.kinematics import PacketSpec
from vortexwave.wavefunctions import (
    MomentumPoint,
    RegimeError,
    SpacetimePoint,
    bispinor_current_derivative_identity,
    bispinor_u,
    momentum_amplitude,
    position_amplitude,
    psi_boson_p,
    psi_boson_x,
    psi_fermion_p,
    psi_nr_x,
    psi_paraxial_x,
    psi_vortex_p,
    psi_vortex_x,
    varsigma,
)

# Hankel-transform quadrature of the momentum states at tol 1e-11, frozen
FOURIER_REFERENCE = [
    (PacketSpec(0.2, 0.0, 0), (0.0, 0.0, 0.0, 0.0), 0.027098388484157562 + 0j),
    (PacketSpec(0.2, 0.5, 0), (1.5, 0.3, 0.7, 0.4), 0.025515757278822004 - 0.002634292989674198j),
    (PacketSpec(0.2, 0.0, 2), (2.0, 0.0, 0.0, 0.0), -0.0031452480981833714 + 0j),
    (PacketSpec(0.2, 0.5, 2), (3.0, 1.1, -2.0, 1.5), -0.0034629017974306562 + 0.0037120406015035165j),
    (PacketSpec(0.2, 0.5, 1, regime="nonrelativistic"), (2.5, 0.4, 1.0, 3.0), -0.00392158121566503 + 0.015900539873205933j),
    (PacketSpec(0.1, 0.5, 3, n=1, regime="paraxial"), (15.0, 0.2, 3.0, 40.0), 8.197542886108292e-05 + 0.0010751584327066473j),
]


@pytest.mark.parametrize("spec, point, expected", FOURIER_REFERENCE)
def test_position_closed_forms_match_frozen_transform(spec, point, expected):
    got = complex(position_amplitude(spec, SpacetimePoint(*point)).to_complex())
    assert abs(got - expected) <= 1e-9 * abs(expected)


@pytest.mark.slow
@pytest.mark.parametrize("spec, point", [(s, p) for s, p, _ in FOURIER_REFERENCE[1::2]])
def test_position_closed_forms_match_live_transform(spec, point):
    x = SpacetimePoint(*point)
    got = complex(position_amplitude(spec, x).to_complex())
    assert abs(oracle.fourier_to_x(spec, x, tol=1e-10).value - got) <= 1e-8 * abs(got)


def test_boson_is_zero_ell_vortex():
    spec = PacketSpec(0.1, 0.4, 0)
    q = MomentumPoint(np.linspace(0, 0.4, 9), 0.7, np.linspace(0.1, 0.8, 9))
    a, b = psi_vortex_p(spec, q), psi_boson_p(spec.replace(ell=4), q)
    np.testing.assert_array_equal(a.log_magnitude, b.log_magnitude)
    x = SpacetimePoint(np.linspace(0, 5, 5), 0.0, 1.0, 2.0)
    np.testing.assert_allclose(psi_vortex_x(spec, x).to_complex(), psi_boson_x(spec.replace(ell=-3), x).to_complex(), rtol=1e-15)


def test_regime_guards():
    with pytest.raises(RegimeError):
        psi_vortex_x(PacketSpec(0.1, regime="paraxial"), SpacetimePoint(1.0))
    with pytest.raises(RegimeError):
        psi_paraxial_x(PacketSpec(0.1), SpacetimePoint(1.0))
    with pytest.raises(RegimeError):
        psi_nr_x(PacketSpec(0.1), SpacetimePoint(1.0))


def test_points_validate_and_convert():
    with pytest.raises(ValueError):
        SpacetimePoint(-1.0)
    with pytest.raises(ValueError):
        MomentumPoint(-0.1, 0.0, 0.0)
    q = MomentumPoint.from_cartesian(0.3, -0.4, 0.2)
    assert float(q.p_perp) == pytest.approx(0.5)
    np.testing.assert_allclose(q.cartesian(), [0.3, -0.4, 0.2], atol=1e-16)
    x = SpacetimePoint.from_cartesian(1.0, 0.0, 2.0, 3.0)
    assert (float(x.rho), float(x.phi_r), float(x.z), float(x.t)) == pytest.approx((2.0, math.pi / 2, 3.0, 1.0))


# --- varsigma ------------------------------------------------------------------


def test_varsigma_is_one_at_origin():
    for pbar in (0.0, 0.5, 3.0):
        assert complex(varsigma(PacketSpec(0.2, pbar), SpacetimePoint(0.0))) == 1.0


@given(st.floats(0, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0, 5), st.floats(0.01, 0.5))
def test_varsigma_positive_branch(rho, z, t, pbar, sigma):
    assert varsigma(PacketSpec(sigma, pbar), SpacetimePoint(rho, 0.0, z, t)).real > 0


@given(st.floats(0, 30), st.floats(-30, 30), st.floats(-30, 30), st.floats(-2, 2))
def test_varsigma_is_boost_invariant(rho, z, t, eta):
    spec = PacketSpec(0.2, 0.4)
    if spec.rapidity + eta < 0:
        return
    ch, sh = math.cosh(eta), math.sinh(eta)
    xb = SpacetimePoint(rho, 0.0, sh * t + ch * z, ch * t + sh * z)
    a = complex(varsigma(spec, SpacetimePoint(rho, 0.0, z, t)))
    b = complex(varsigma(spec.boosted(eta), xb))
    assert abs(a - b) <= 1e-9 * abs(a) * (1 + abs(t) + abs(z))


# --- structure: vortex line, winding, profile ----------------------------------------


@pytest.mark.parametrize("regime", ["nonrelativistic", "nonparaxial", "paraxial"])
def test_vortex_line_is_a_zero(regime):
    spec = PacketSpec(0.1, 0.3, 3, regime=regime)
    x = SpacetimePoint(0.0, 1.2, np.array([-2.0, 0.0, 5.0]), np.array([0.0, 1.0, 3.0]))
    assert np.all(position_amplitude(spec, x).is_zero)
    q = MomentumPoint(0.0, 0.4, np.array([0.1, 0.3, 0.5]))
    assert np.all(momentum_amplitude(spec, q).is_zero)
    # the l = 0 state is finite on the axis
    assert not np.any(position_amplitude(spec.replace(ell=0), x).is_zero)


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(["nonrelativistic", "nonparaxial", "paraxial"]),
    st.integers(-6, 6),
    st.floats(-math.pi, math.pi),
    st.floats(-3.0, 3.0),
)
def test_phase_winding(regime, ell, phi, delta):
    spec = PacketSpec(0.1, 0.3, ell, regime=regime)
    x0 = SpacetimePoint(7.0, phi, 1.0, 2.0)
    x1 = SpacetimePoint(7.0, phi + delta, 1.0, 2.0)
    turn = float(position_amplitude(spec, x1).phase - position_amplitude(spec, x0).phase) - ell * delta
    assert abs(np.exp(1j * turn) - 1) < 1e-9
    q0, q1 = MomentumPoint(0.1, phi, 0.3), MomentumPoint(0.1, phi + delta, 0.3)
    turn_p = float(momentum_amplitude(spec, q1).phase - momentum_amplitude(spec, q0).phase) - ell * delta
    assert abs(np.exp(1j * turn_p) - 1) < 1e-9


@pytest.mark.parametrize("ell", [1, 5, 40])
def test_transverse_density_peaks_at_ring_radius(ell):
    sigma = 0.02
    spec = PacketSpec(sigma, 0.5, ell, regime="paraxial")
    rho = np.linspace(0.1, 3 * math.sqrt(ell) / sigma, 20001)
    dens = np.exp(2 * position_amplitude(spec, SpacetimePoint(rho)).log_magnitude)
    assert rho[np.argmax(dens)] == pytest.approx(math.sqrt(ell) / sigma, abs=rho[1] - rho[0])


def test_amplitudes_stay_representable_far_out():
    # sigma from a 0.4 nm width with l = 1000: the plain exponent would underflow
    sigma = 3.8615926796e-4 / 0.4
    spec = PacketSpec(sigma, 1.2, 1000)
    amp = position_amplitude(spec, SpacetimePoint(2e5, 0.0, 0.0, 0.0))
    assert np.isfinite(amp.log_magnitude) and amp.log_magnitude < -700
    q = MomentumPoint(50 * sigma, 0.0, 1.2)
    assert np.isfinite(momentum_amplitude(spec, q).log_magnitude)


# --- limits ------------------------------------------------------------------------


def _reduction_gap(sigma, pbar):
    exact = PacketSpec(sigma, pbar, 3)
    par = exact.replace(regime="paraxial")
    eb = exact.energy_bar
    P, Z = np.meshgrid(np.linspace(0, 4 * sigma, 41), pbar + np.linspace(-4, 4, 41) * sigma * eb)
    q = MomentumPoint(P, 0.3, Z)
    eps = np.sqrt(P ** 2 + Z ** 2 + 1)
    a = momentum_amplitude(exact, q).to_complex() / np.sqrt(2 * eps)
    b = momentum_amplitude(par, q).to_complex() / np.sqrt(2 * eb)
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


def test_exact_state_reduces_to_paraxial():
    # quadratic in sigma in the packet rest frame
    assert _reduction_gap(0.1, 0.0) / _reduction_gap(0.05, 0.0) == pytest.approx(4.0, rel=0.05)
    # a moving frame keeps the cubic term of the energy expansion, so the pointwise gap is linear
    assert _reduction_gap(0.1, 0.5) / _reduction_gap(0.05, 0.5) == pytest.approx(2.0, rel=0.05)
    assert _reduction_gap(0.02, 0.5) < 0.02


def test_paraxial_state_reduces_to_schroedinger():
    x = SpacetimePoint(np.array([5.0, 12.0, 20.0]), 0.4, np.array([1.0, -3.0, 4.0]), np.array([0.0, 50.0, 300.0]))

    def ratio(pbar):
        nr = PacketSpec(0.1, pbar, 2, regime="nonrelativistic")
        par = nr.replace(regime="paraxial")
        # paraxial states carry the rest-energy phase and the 2 eps_bar measure
        shift = np.sqrt(2.0 * par.energy_bar) * np.exp(1j * (par.energy_bar - nr.energy_bar) * x.t)
        return position_amplitude(nr, x).to_complex() / (position_amplitude(par, x).to_complex() * shift)

    np.testing.assert_allclose(ratio(0.0), 1.0, atol=1e-13)
    gaps = [np.max(np.abs(ratio(p) - 1.0)) for p in (0.01, 0.005)]
    assert gaps[0] < 1e-3
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.2)


def test_equal_spreads_collapse_to_single_spread_state():
    one = PacketSpec(0.05, 0.7, 4, n=2, regime="paraxial")
    two = PacketSpec(0.05, 0.7, 4, n=2, sigma_z=0.05 * (1 + 1e-15), regime="paraxial")
    x = SpacetimePoint(np.linspace(1, 150, 7), 0.3, np.linspace(-20, 40, 7), np.linspace(0, 500, 7))
    np.testing.assert_allclose(position_amplitude(one, x).to_complex(), position_amplitude(two, x).to_complex(), rtol=1e-12)


@pytest.mark.parametrize("sz", [0.05, 0.02])
def test_gouy_phase_on_axis_motion(sz):
    # with l = 0 at rho = 0 and z = u t the phase is -(eps t - p z) minus the Gouy terms
    spec = PacketSpec(0.05, 0.7, 0, n=1, sigma_z=sz, regime="paraxial")
    t = np.array([0.5, 2.0, 7.0]) * spec.diffraction_time_perp
    x = SpacetimePoint(0.0, 0.0, spec.u_bar * t, t)
    phase = np.unwrap(np.angle(position_amplitude(spec, x).to_complex() * np.exp(1j * (spec.energy_bar * t - spec.pbar * spec.u_bar * t))))
    gouy = 3 * np.arctan(t / spec.diffraction_time_perp) + 0.5 * np.arctan(t / spec.diffraction_time_z)
    # the constant i^(2n+|l|) and the Laguerre sign at rho = 0 cancel here
    expect = np.angle(np.exp(1j * (np.pi - gouy)))
    np.testing.assert_allclose(np.exp(1j * phase), np.exp(1j * expect), atol=1e-12)


# --- wave equations ----------------------------------------------------------------


@pytest.mark.parametrize("ell", [0, 1, 3])
def test_exact_state_solves_klein_gordon(ell):
    f = oracle.position_evaluator(PacketSpec(0.2, 0.5, ell))
    res = [oracle.pde_residual(f, (0.9, 1.3, 0.6, 1.1), h) for h in (0.04, 0.02, 0.01)]
    assert res[0] / res[1] == pytest.approx(4.0, abs=0.5)
    assert res[1] / res[2] == pytest.approx(4.0, abs=0.5)


def test_paraxial_state_plateaus():
    point = (0.9, 1.3, 0.6, 1.1)
    par = oracle.position_evaluator(PacketSpec(0.1, 0.5, 0, regime="paraxial"))
    exact = oracle.position_evaluator(PacketSpec(0.1, 0.5, 0))
    p = [oracle.pde_residual(par, point, h) for h in (0.01, 0.005)]
    assert p[0] / p[1] == pytest.approx(1.0, abs=0.05)
    assert p[0] >= 10 * oracle.pde_residual(exact, point, 0.01)


def test_schroedinger_state_solves_schroedinger():
    f = oracle.position_evaluator(PacketSpec(0.2, 0.5, 2, regime="nonrelativistic"))
    res = [oracle.pde_residual(f, (0.7, 2.1, -1.0, 0.5), h, equation="schroedinger") for h in (0.04, 0.02, 0.01)]
    assert res[0] / res[1] == pytest.approx(4.0, abs=0.5)
    assert res[2] < 1e-4


def test_tiny_step_warns():
    f = oracle.position_evaluator(PacketSpec(0.2, 0.5, 0))
    with pytest.warns(oracle.CancellationWarning):
        oracle.pde_residual(f, (0.9, 1.3, 0.6, 1.1), 1e-5)
    with pytest.raises(ValueError):
        oracle.pde_residual(f, (0.9, 1.3, 0.6, 1.1), 0.01, equation="dirac")


# --- boosts ------------------------------------------------------------------------


def _boost(x: SpacetimePoint, eta):
    ch, sh = math.cosh(eta), math.sinh(eta)
    return SpacetimePoint(x.rho, x.phi_r, sh * x.t + ch * x.z, ch * x.t + sh * x.z)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 10), st.floats(-6, 6), st.floats(-6, 6), st.sampled_from([-0.2, 1.0, 2.0]))
def test_exact_amplitude_is_a_scalar(rho, z, t, eta):
    spec = PacketSpec(0.2, 0.3, 2)
    x = SpacetimePoint(rho, 0.4, z, t)
    a = position_amplitude(spec, x)
    b = position_amplitude(spec.boosted(eta), _boost(x, eta))
    assert abs(math.expm1(float(b.log_magnitude - a.log_magnitude))) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(1, 80), st.floats(-3, 3), st.sampled_from([1.0, 2.0]))
def test_paraxial_amplitude_is_a_scalar_on_the_world_sheet(rho, tau, eta):
    spec = PacketSpec(0.05, 0.3, 5, n=1, regime="paraxial")
    t = tau * spec.diffraction_time_perp
    x = SpacetimePoint(rho, 0.3, spec.u_bar * t, t)
    a = position_amplitude(spec, x)
    b = position_amplitude(spec.boosted(eta), _boost(x, eta))
    assert abs(math.expm1(float(b.log_magnitude - a.log_magnitude))) < 1e-8


# --- fermions ------------------------------------------------------------------------

momenta = st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))


@given(momenta, st.sampled_from([0.5, -0.5]))
def test_bispinor_norm(p, lam):
    u = bispinor_u(np.array(p), lam)
    eps = math.sqrt(sum(c * c for c in p) + 1)
    assert float(np.vdot(u, u).real) == pytest.approx(2 * eps, rel=1e-12)


def test_bispinor_rejects_bad_helicity():
    with pytest.raises(ValueError):
        bispinor_u([0.0, 0.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        psi_fermion_p(PacketSpec(0.1), MomentumPoint(0.1, 0.0, 0.0))


@pytest.mark.parametrize("lam", [0.5, -0.5])
def test_current_identity_on_axis(lam):
    r = bispinor_current_derivative_identity(np.array([0.0, 0.0, 0.7]), lam)
    assert abs(r[2, 2]) < 1e-8
    assert np.max(np.abs(r)) < 1e-7


@pytest.mark.parametrize("lam", [0.5, -0.5])
def test_current_identity_converges(lam):
    p = np.array([0.4, -0.9, 0.3])
    r1 = np.max(np.abs(bispinor_current_derivative_identity(p, lam, h=0.02)))
    r2 = np.max(np.abs(bispinor_current_derivative_identity(p, lam, h=0.01)))
    assert r1 / r2 == pytest.approx(4.0, rel=0.1)
    assert r2 < 1e-4


@pytest.mark.parametrize("lam", [0.5, -0.5])
def test_fermion_density_equals_scalar_density(lam):
    spec = PacketSpec(0.1, 0.4, 3, helicity=lam)
    q = MomentumPoint(np.linspace(0.01, 0.4, 9), 0.8, np.linspace(0.1, 0.7, 9))
    psi = psi_fermion_p(spec, q)
    scalar = momentum_amplitude(spec, q).abs()
    np.testing.assert_allclose(np.sum(np.abs(psi) ** 2, axis=-1), scalar ** 2, rtol=1e-12)


@pytest.mark.parametrize("lam", [0.5, -0.5])
@pytest.mark.parametrize("ell", [0, 2, -3])
def test_fermion_total_angular_momentum(lam, ell):
    # -i d/dphi + S_z acting on every component gives l + lambda
    spec = PacketSpec(0.1, 0.4, ell, helicity=lam)
    phi, h = 0.7, 1e-5
    psi = [psi_fermion_p(spec, MomentumPoint(0.15, phi + d, 0.5)) for d in (-h, 0.0, h)]
    lz = -1j * (psi[2] - psi[0]) / (2 * h)
    sz = np.array([0.5, -0.5, 0.5, -0.5]) * psi[1]
    jz = lz + sz
    mask = np.abs(psi[1]) > 1e-12 * np.max(np.abs(psi[1]))
    np.testing.assert_allclose(jz[mask], (ell + lam) * psi[1][mask], rtol=1e-8, atol=0)


@pytest.mark.slow
def test_fermion_fourier_transform_is_finite_and_winds():
    spec = PacketSpec(0.2, 0.5, 1, helicity=0.5)
    a = oracle.fourier_to_x_fermion(spec, SpacetimePoint(2.0, 0.0, 0.5, 0.3), tol=1e-7).value
    b = oracle.fourier_to_x_fermion(spec, SpacetimePoint(2.0, 0.6, 0.5, 0.3), tol=1e-7).value
    assert np.all(np.isfinite(a)) and np.linalg.norm(a) > 0
    # each component winds with its own harmonic l, l, l, l+1
    for k, harmonic in enumerate((1, 1, 1, 2)):
        if abs(a[k]) > 1e-6 * np.max(np.abs(a)):
            assert b[k] / a[k] == pytest.approx(np.exp(1j * harmonic * 0.6), abs=1e-6)


def test_position_evaluator_batch_matches_points():
    spec = PacketSpec(0.2, 0.5, 1)
    f = oracle.position_evaluator(spec)
    t, x, y, z = np.array([0.1, 1.0]), np.array([1.0, -2.0]), np.array([0.5, 0.5]), np.array([0.0, 2.0])
    batch = f(t, x, y, z)
    single = [complex(position_amplitude(spec, SpacetimePoint.from_cartesian(*a)).to_complex()) for a in zip(t, x, y, z)]
    np.testing.assert_allclose(batch, single, rtol=1e-15)


def test_no_warnings_on_plain_evaluation():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        position_amplitude(PacketSpec(0.1, 0.2, 2), SpacetimePoint(np.linspace(0, 30, 50), 0.0, 1.0, 0.5))
        momentum_amplitude(PacketSpec(0.1, 0.2, 2, regime="paraxial"), MomentumPoint(np.linspace(0, 1, 50), 0.0, 0.2))
