import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from vortexwave.specfun import (
    ASYMPTOTIC_MIN_MODULUS,
    BesselDomainError,
    BesselOverflowError,
    LogComplex,
    bessel_j,
    bessel_k_ratio,
    bessel_k_scaled,
    gamma_ratio_half,
    laguerre,
    log_bessel_k,
    log_bessel_k_ratio,
)

# log|e^z K_nu(z)| and arg, from mpmath at 30 digits
MPMATH_SCALED_K = [
    (0, 0.3, 0.616604794192566, 0.0),
    (1, 5.0, -0.5103692965852233, 0.0),
    (2, 5.0, -0.23836238776804525, 0.0),
    (5, 16.9, -0.48048946266201203, 0.0),
    (5, 17.1, -0.49432963662179963, 0.0),
    (20, 50.0, 2.1799514676304774, 0.0),
    (1, 800.0, -3.1160460538380654, 0.0),
    (12, 800.0, -3.026728518722999, 0.0),
    (0.5, 3.0, -0.3235147916893274, 0.0),
    (21.5, 40.0, 3.9659002550517575, 0.0),
    (3, 3 + 4j, -0.02954572714157865, -1.0747162276537903),
    (2, 20 + 15j, -1.3240751011002307, -0.3653321012187226),
    (7, 1 + 30j, -1.4338600537796937, -1.582608193234522),
    (1, 2000 + 5000j, -4.069884377593023, -0.5952096255542653),
]


@pytest.mark.parametrize("nu, z, logmag, phase", MPMATH_SCALED_K)
def test_scaled_k_against_mpmath(nu, z, logmag, phase):
    k = bessel_k_scaled(nu, z)
    tol = 1e-10 if np.isrealobj(z) else 1e-8
    assert abs(float(k.log_magnitude) - logmag) < tol
    assert abs(float(k.phase) - phase) < tol


def _k_integral(nu, z):
    # e^z K_nu(z) = int_0^inf cosh(nu t) exp(-z (cosh t - 1)) dt
    t_max = math.acosh(1 + 800 / z)  # integrand below e^-700 beyond
    val, _ = integrate.quad(lambda t: np.cosh(nu * t) * np.exp(-z * (np.cosh(t) - 1.0)), 0, t_max, epsabs=0, epsrel=1e-13, limit=200)
    return val


@pytest.mark.parametrize("nu, z", [(1, 5.0), (2, 5.0), (0, 1.0), (3, 12.0), (4, 25.0)])
def test_scaled_k_against_integral_representation(nu, z):
    assert bessel_k_scaled(nu, z).abs() == pytest.approx(_k_integral(nu, z), rel=1e-11)


def test_ratio_examples():
    assert bessel_k_ratio(2, 1, 5.0) == pytest.approx(_k_integral(2, 5.0) / _k_integral(1, 5.0), rel=1e-11)
    assert bessel_k_ratio(2, 1, 5.0) == pytest.approx(1.3125960697660567, rel=1e-12)
    # leading behaviour 1 + 3/(2z)
    assert abs(bessel_k_ratio(2, 1, 200.0) - 1.0075) < 1e-4
    assert bessel_k_ratio(2, 1, 200.0) == pytest.approx(1.007509328430009, rel=1e-12)
    assert bessel_k_ratio(2, 1, 800.0) == pytest.approx(1.0018755852062772, rel=1e-12)
    assert abs(bessel_k_ratio(2, 1, 800.0) - 1.001875) < 1e-5
    assert bessel_k_ratio(12, 11, 800.0) == pytest.approx(1.0144692138110592, rel=1e-12)
    assert abs(bessel_k_ratio(12, 11, 800.0) - 1.014375) < 2e-4


@given(st.integers(0, 10_000), st.floats(1e-3, 1e6))
def test_ratio_identity_is_exact(nu, z):
    assert bessel_k_ratio(nu, nu, z) == 1.0


def test_ratio_direction_and_half_orders():
    z = 37.0
    r = bessel_k_ratio(7, 3, z)
    assert bessel_k_ratio(3, 7, z) == pytest.approx(1 / r, rel=1e-14)
    # mixed half/integer orders go through two ladders
    expect = special.kve(2.5, z) / special.kve(2, z)
    assert bessel_k_ratio(2.5, 2, z) == pytest.approx(expect, rel=1e-12)


def test_real_argument_has_zero_phase():
    z = np.array([0.5, 3.0, 17.0, 400.0, 1e5])
    k = bessel_k_scaled(40, z)
    assert np.all(k.phase == 0.0)
    assert np.all(np.isreal(log_bessel_k_ratio(40, 39, z)))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 1000), st.floats(0.0, 6.0))
def test_recurrence_residual(nu, log10_z):
    z = 10.0 ** log10_z
    lo = math.exp(log_bessel_k_ratio(nu - 1, nu + 1, z))
    mid = math.exp(log_bessel_k_ratio(nu, nu + 1, z))
    assert abs(1.0 - lo - 2 * nu / z * mid) <= 1e-10


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 120), st.floats(0.05, 600.0))
def test_matches_amos_wherever_it_is_finite(nu, z):
    ref = special.kve(nu, z)
    if not (np.isfinite(ref) and ref > 0):
        return
    got = float(log_bessel_k(nu, z).real)
    assert got == pytest.approx(math.log(ref), abs=1e-10 * max(1.0, abs(math.log(ref))))


@pytest.mark.parametrize("nu", [0, 1, 2, 3])
@pytest.mark.parametrize("z", [1e4, 3e4, 1e6])
def test_large_argument_two_term_series(nu, z):
    two_term = math.sqrt(math.pi / (2 * z)) * (1 + (4 * nu * nu - 1) / (8 * z))
    assert abs(float(bessel_k_scaled(nu, z).abs()) / two_term - 1) <= 10 / z ** 2


def test_seed_switch_is_continuous():
    for z in (ASYMPTOTIC_MIN_MODULUS - 1e-9, ASYMPTOTIC_MIN_MODULUS + 1e-9):
        for nu in (0, 1, 3):
            assert bessel_k_scaled(nu, z).abs() == pytest.approx(special.kve(nu, z), rel=1e-14)


def test_half_integer_elementary_form():
    z = np.array([0.1, 2.0, 50.0])
    np.testing.assert_allclose(bessel_k_scaled(0.5, z).abs(), np.sqrt(np.pi / (2 * z)), rtol=1e-15)
    np.testing.assert_allclose(bessel_k_scaled(1.5, z).abs(), np.sqrt(np.pi / (2 * z)) * (1 + 1 / z), rtol=1e-15)


def test_huge_order_and_argument_stays_finite():
    # chi for sigma from a 0.4 nm width: K_1000 needs the log form
    chi = 2.0 / (3.8615926796e-4 / 0.4) ** 2
    val = float(log_bessel_k(1001, chi).real)
    assert np.isfinite(val)
    assert bessel_k_ratio(1002, 1001, chi) == pytest.approx(1 + (1001 + 1.5) / chi, rel=1e-6)


@pytest.mark.parametrize("nu, z", [(1, 0.0), (1, -2.0), (1, -1 + 3j), (-1, 2.0), (0.3, 2.0), (20_000, 5.0)])
def test_domain_errors(nu, z):
    with pytest.raises(BesselDomainError):
        bessel_k_scaled(nu, z)


def test_overflow_error_names_order():
    with pytest.raises(BesselOverflowError, match="K_10000"):
        bessel_k_scaled(10_000, 1e-305)


# --- LogComplex ---------------------------------------------------------------

finite_complex = st.complex_numbers(min_magnitude=1e-100, max_magnitude=1e100, allow_nan=False, allow_infinity=False)


@given(finite_complex, finite_complex)
def test_logcomplex_multiplication_matches_complex(a, b):
    prod = (LogComplex.from_complex(a) * LogComplex.from_complex(b)).to_complex()
    assert abs(prod - a * b) <= 1e-12 * abs(a * b)


@given(finite_complex, finite_complex)
def test_logcomplex_division_and_conjugate(a, b):
    q = (LogComplex.from_complex(a) / LogComplex.from_complex(b)).to_complex()
    assert abs(q - a / b) <= 1e-12 * abs(a / b)
    assert abs(LogComplex.from_complex(a).conjugate().to_complex() - np.conj(a)) <= 1e-12 * abs(a)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_logcomplex_phase_wraps(p1, p2):
    x = LogComplex(0.0, p1) * LogComplex(0.0, p2)
    assert -math.pi < float(x.phase) <= math.pi
    assert abs(np.exp(1j * float(x.phase)) - np.exp(1j * (p1 + p2))) < 1e-9


def test_logcomplex_dynamic_range_and_zero():
    big = LogComplex(1e6, 1.0)
    tiny = LogComplex(-1e6, -0.5)
    assert float((big * big).log_magnitude) == 2e6
    assert float((big * tiny).log_magnitude) == 0.0
    assert float((big * tiny).phase) == pytest.approx(0.5)
    z = LogComplex.zero((3,))
    assert np.all(z.is_zero)
    assert np.all(z.to_complex() == 0)
    assert np.all((z * big).is_zero)
    assert LogComplex.from_complex(0.0).is_zero


def test_logcomplex_shift_and_power():
    x = LogComplex.from_complex(-2.0)
    assert x.shift(math.log(3.0), math.pi / 2).to_complex() == pytest.approx(-6j)
    assert (LogComplex.from_complex(4j) ** 0.5).to_complex() == pytest.approx(np.sqrt(4j))


# --- gamma ratio ------------------------------------------------------------------

MPMATH_GAMMA_RATIO = {
    0: 0.88622692545275801365,
    1: 1.3293403881791370205,
    10: 3.279162005060143424,
    49: 7.0534125148769133255,
    50: 7.1239466400256824588,
    51: 7.1937892541435813064,
    1000: 31.634633413816820778,
    1_000_000: 1000.0003749999453125,
}


@pytest.mark.parametrize("n, expected", MPMATH_GAMMA_RATIO.items())
def test_gamma_ratio_half_values(n, expected):
    assert gamma_ratio_half(n) == pytest.approx(expected, rel=1e-12)


def test_gamma_ratio_half_closed_forms():
    assert gamma_ratio_half(0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert gamma_ratio_half(1) == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-15)
    assert gamma_ratio_half(1000) == pytest.approx(math.sqrt(1000), rel=1e-3)


@given(st.integers(0, 170))
def test_gamma_ratio_half_against_lgamma(n):
    ref = math.exp(math.lgamma(n + 1.5) - math.lgamma(n + 1))
    assert gamma_ratio_half(n) == pytest.approx(ref, rel=1e-12)


@given(st.integers(10, 1_000_000))
def test_gamma_ratio_half_squared_bracket(n):
    # Gamma(l+3/2)^2/Gamma(l+1)^2 = l + 3/4 + 1/(32 l) + O(l^-2), approached from below
    sq = gamma_ratio_half(n) ** 2
    slack = 8 * np.spacing(sq)  # the upper margin is only ~1/(32 n^2)
    assert n + 0.75 < sq < n + 0.75 + 1 / (32 * n) + slack


def test_gamma_ratio_half_array_and_range():
    out = gamma_ratio_half(np.array([[0, 1], [10, 1000]]))
    assert out.shape == (2, 2)
    assert out[1, 1] == pytest.approx(MPMATH_GAMMA_RATIO[1000], rel=1e-12)
    with pytest.raises(ValueError):
        gamma_ratio_half(-1)
    with pytest.raises(ValueError):
        gamma_ratio_half(1_000_001)


# --- Laguerre ----------------------------------------------------------------------


def _laguerre_sum(n, alpha, x):
    return sum((-1) ** j * math.comb(n + alpha, n - j) * x ** j / math.factorial(j) for j in range(n + 1))


def test_laguerre_low_orders():
    x = np.linspace(0, 20, 7)
    np.testing.assert_array_equal(laguerre(0, 7, x), np.ones_like(x))
    np.testing.assert_allclose(laguerre(1, 7, x), 8 - x, rtol=0, atol=1e-15)
    assert laguerre(3, 2, 1.5) == pytest.approx(0.0625, rel=1e-14)


@given(st.integers(0, 12), st.integers(0, 30), st.floats(0, 10))
def test_laguerre_against_explicit_sum(n, alpha, x):
    ref = _laguerre_sum(n, alpha, x)
    scale = sum(math.comb(n + alpha, n - j) * x ** j / math.factorial(j) for j in range(n + 1))
    assert abs(float(laguerre(n, alpha, x)) - ref) <= 1e-12 * scale


def test_laguerre_large_alpha_is_stable():
    assert laguerre(50, 1000, 800.0) == pytest.approx(special.eval_genlaguerre(50, 1000, 800.0), rel=1e-10)


@pytest.mark.parametrize("alpha", [0, 3, 10])
def test_laguerre_orthogonality(alpha):
    for n in range(6):
        for k in range(n, 6):
            f = lambda x: x ** alpha * math.exp(-x) * laguerre(n, alpha, x) * laguerre(k, alpha, x)
            scale = math.sqrt(math.gamma(n + alpha + 1) / math.factorial(n) * math.gamma(k + alpha + 1) / math.factorial(k))
            # the weight is below 1e-60 past x = 200
            val, _ = integrate.quad(f, 0, 200, epsabs=1e-10 * scale, epsrel=1e-10, limit=200)
            expected = math.gamma(n + alpha + 1) / math.factorial(n) if n == k else 0.0
            assert abs(val - expected) <= 1e-8 * scale


# --- Bessel J -------------------------------------------------------------------------


def test_bessel_j_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(4, 0.0) == 0.0
    assert bessel_j(-3, 0.0) == 0.0
    series = sum((-1) ** k / (math.factorial(k) * math.factorial(k + 3)) for k in range(40))
    assert series == pytest.approx(0.1289432494744020511, rel=1e-15)
    assert bessel_j(3, 2.0) == pytest.approx(series, rel=1e-12)


@given(st.integers(0, 20), st.floats(0, 30))
def test_bessel_j_power_series(order, x):
    terms = [(-1) ** k * (x / 2) ** (2 * k + order) / (math.factorial(k) * math.factorial(k + order)) for k in range(80)]
    scale = sum(abs(t) for t in terms)
    if scale > 1e8:  # series too cancellation-prone to serve as a reference
        return
    assert abs(float(bessel_j(order, x)) - sum(terms)) <= 1e-13 * scale + 1e-14
