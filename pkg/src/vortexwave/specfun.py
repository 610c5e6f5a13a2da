"""Scaled special functions used by the packet closed forms.

Everything that can under- or overflow is carried in log form. The modified
Bessel function of the second kind is returned as ``e^z K_nu(z)`` so that the
huge arguments ``2 m^2 / sigma^2`` met in practice stay representable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "LogComplex",
    "BesselDomainError",
    "BesselOverflowError",
    "bessel_k_scaled",
    "bessel_k_ratio",
    "log_bessel_k_ratio",
    "log_bessel_k",
    "gamma_ratio_half",
    "laguerre",
    "bessel_j",
    "ASYMPTOTIC_MIN_MODULUS",
]

# Below this |z| the large-argument series is not accurate to ~1e-15 and the
# seeds come from AMOS (scipy.special.kve) instead.
ASYMPTOTIC_MIN_MODULUS = 17.0
MAX_ORDER = 10_000


class BesselDomainError(ValueError):
    """Raised for arguments outside Re z > 0 or for unsupported orders."""


class BesselOverflowError(OverflowError):
    """Raised when the order recurrence leaves the representable range."""


def _wrap(phase):
    # maps to (-pi, pi]
    return np.pi - np.mod(np.pi - phase, 2.0 * np.pi)


@dataclass(frozen=True)
class LogComplex:
    """Complex number(s) stored as ``exp(log_magnitude + i*phase)``.

    ``log_magnitude = -inf`` is the explicit zero. Both fields may be numpy
    arrays of a common shape; arithmetic is elementwise.
    """

    log_magnitude: np.ndarray | float
    phase: np.ndarray | float

    def __post_init__(self):
        object.__setattr__(self, "log_magnitude", np.asarray(self.log_magnitude, dtype=float))
        object.__setattr__(self, "phase", _wrap(np.asarray(self.phase, dtype=float)))

    @classmethod
    def from_complex(cls, value) -> "LogComplex":
        value = np.asarray(value, dtype=complex)
        with np.errstate(divide="ignore"):
            logmag = np.log(np.abs(value))
        return cls(logmag, np.angle(value))

    @classmethod
    def zero(cls, shape=()) -> "LogComplex":
        return cls(np.full(shape, -np.inf), np.zeros(shape))

    @property
    def shape(self):
        return self.log_magnitude.shape

    @property
    def is_zero(self) -> np.ndarray:
        return np.isneginf(self.log_magnitude)

    def __mul__(self, other) -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(self.log_magnitude - other.log_magnitude, self.phase - other.phase)

    def __pow__(self, exponent: float) -> "LogComplex":
        # principal branch: phase in (-pi, pi] times the exponent
        return LogComplex(self.log_magnitude * exponent, self.phase * exponent)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_magnitude, -self.phase)

    def shift(self, log_factor=0.0, phase=0.0) -> "LogComplex":
        """Multiply by ``exp(log_factor + i*phase)`` without leaving log form."""
        return LogComplex(self.log_magnitude + log_factor, self.phase + phase)

    def abs(self) -> np.ndarray:
        return np.exp(self.log_magnitude)

    def to_complex(self) -> np.ndarray:
        return np.exp(self.log_magnitude) * np.exp(1j * self.phase)

    def __getitem__(self, item) -> "LogComplex":
        return LogComplex(self.log_magnitude[item], self.phase[item])


def _check_order(nu) -> tuple[float, int]:
    twice = 2.0 * nu
    if nu < 0 or twice != np.round(twice):
        raise BesselDomainError(f"order must be a non-negative integer or half-integer, got {nu}")
    if nu > MAX_ORDER:
        raise BesselDomainError(f"order {nu} exceeds supported maximum {MAX_ORDER}")
    base = 0.0 if twice % 2 == 0 else 0.5
    return base, int(round(nu - base))


def _check_argument(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~(z.real > 0)):
        raise BesselDomainError("modified Bessel K requires Re z > 0")
    return z


def _asymptotic_scaled_k(nu: float, z: np.ndarray) -> np.ndarray:
    """Large-|z| series for e^z K_nu(z), stopped at its smallest term."""
    mu = 4.0 * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    prev = np.abs(term)
    for k in range(1, 80):
        new_term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        mag = np.abs(new_term)
        active &= mag < prev
        total = np.where(active, total + new_term, total)
        active &= mag > 1e-17 * np.abs(total)
        if not active.any():
            break
        term, prev = new_term, mag
    return np.sqrt(np.pi / (2.0 * z)) * total


def _seed_pair(base: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """e^z K_base(z) and e^z K_{base+1}(z) for base in {0, 1/2}."""
    if base == 0.5:
        k_half = np.sqrt(np.pi / (2.0 * z))
        return k_half, k_half * (1.0 + 1.0 / z)
    big = np.abs(z) >= ASYMPTOTIC_MIN_MODULUS
    k0 = np.empty_like(z)
    k1 = np.empty_like(z)
    if big.any():
        k0[big] = _asymptotic_scaled_k(0.0, z[big])
        k1[big] = _asymptotic_scaled_k(1.0, z[big])
    small = ~big
    if small.any():
        k0[small] = special.kve(0, z[small])
        k1[small] = special.kve(1, z[small])
    return k0, k1


def _ladder(nu: float, z: np.ndarray):
    """Yield (order, e^z K_order as complex log) going upward from the seed order.

    The forward recurrence is run on the ratio K_{k+1}/K_k, which is stable for
    K and never overflows even when K_nu itself would.
    """
    base, steps = _check_order(nu)
    k0, k1 = _seed_pair(base, z)
    log_k = np.log(k0)
    yield base, log_k
    if steps == 0:
        return
    ratio = k1 / k0
    order = base
    for _ in range(steps):
        log_k = log_k + np.log(ratio)
        order += 1.0
        yield order, log_k
        ratio = 1.0 / ratio + 2.0 * order / z


def log_bessel_k(nu: float, z) -> np.ndarray:
    """Complex logarithm of e^z K_nu(z) (imaginary part not wrapped)."""
    z = _check_argument(z)
    with np.errstate(all="ignore"):
        for _, log_k in _ladder(nu, z):
            pass
    if not np.all(np.isfinite(log_k)):
        bad = z[~np.isfinite(log_k)]
        raise BesselOverflowError(f"K_{nu} overflowed the log range at z={bad.ravel()[:3]}")
    return log_k


def bessel_k_scaled(nu: float, z) -> LogComplex:
    """``e^z K_nu(z)`` as a :class:`LogComplex`.

    ``nu`` may be a non-negative integer or half-integer up to 1e4; ``z`` any
    array with positive real part. For real ``z`` the phase is exactly zero.
    """
    z = _check_argument(z)
    log_k = log_bessel_k(nu, z)
    phase = np.where(z.imag == 0, 0.0, log_k.imag)
    return LogComplex(log_k.real, phase)


def log_bessel_k_ratio(nu_hi: float, nu_lo: float, z) -> np.ndarray:
    """log(K_{nu_hi}(z) / K_{nu_lo}(z)), real for real ``z``.

    Orders differing by an integer share one recurrence run, so the ratio is
    a sum of logs of consecutive ratios and never touches K itself.
    """
    real_input = np.isrealobj(z)
    z = _check_argument(z)
    if nu_hi == nu_lo:
        out = np.zeros_like(z)
    elif float(nu_hi - nu_lo).is_integer():
        lo, hi = sorted((nu_lo, nu_hi))
        log_lo = None
        with np.errstate(all="ignore"):
            for order, log_k in _ladder(hi, z):
                if order == lo:
                    log_lo = log_k
        if not np.all(np.isfinite(log_k)):
            raise BesselOverflowError(f"K_{hi} overflowed the log range")
        out = log_k - log_lo if nu_hi > nu_lo else log_lo - log_k
    else:
        out = log_bessel_k(nu_hi, z) - log_bessel_k(nu_lo, z)
    return out.real if real_input else out


def bessel_k_ratio(nu_hi: float, nu_lo: float, z) -> np.ndarray:
    """K_{nu_hi}(z) / K_{nu_lo}(z); the exponential scaling cancels exactly."""
    return np.exp(log_bessel_k_ratio(nu_hi, nu_lo, z))


_HALF_GAMMA_SERIES = (1.0, -1 / 8, 1 / 128, 5 / 1024, -21 / 32768, -399 / 262144, 869 / 4194304)


def _gamma_ratio_half_scalar(n: int) -> float:
    if n < 0:
        raise ValueError("gamma_ratio_half needs a non-negative integer")
    if n > 1_000_000:
        raise ValueError(f"argument {n} exceeds supported range 1e6")
    if n < 50:
        k = np.arange(1, n + 1, dtype=float)
        return 0.5 * np.sqrt(np.pi) * float(np.prod(1.0 + 0.5 / k))
    x = n + 1.0
    return float(np.sqrt(x) * sum(c * x ** -i for i, c in enumerate(_HALF_GAMMA_SERIES)))


def gamma_ratio_half(n):
    """Gamma(n + 3/2) / Gamma(n + 1) for integer ``n >= 0`` (scalar or array)."""
    if np.ndim(n) == 0:
        return _gamma_ratio_half_scalar(int(n))
    return np.array([_gamma_ratio_half_scalar(int(v)) for v in np.ravel(n)]).reshape(np.shape(n))


def laguerre(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^alpha(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = alpha + 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def bessel_j(order: int, x):
    """Bessel function of the first kind J_order(x)."""
    return special.jv(order, x)
