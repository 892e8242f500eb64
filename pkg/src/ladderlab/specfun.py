"""Special functions at complex arguments.

Pochhammer symbols, the log-gamma function, generalized and basic
hypergeometric series and the Bessel function.  Everything accepts complex
input; ``log_gamma`` is additionally vectorized over numpy arrays because it
sits under every ground-state evaluation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "SeriesResult",
    "SpecfunError",
    "PoleError",
    "DivergenceError",
    "pochhammer",
    "q_pochhammer",
    "infinite_q_product",
    "log_gamma",
    "gamma",
    "hypergeometric_rFs",
    "basic_hypergeometric_rphis",
    "bessel_j",
    "ExactComplex",
    "exact_terminating_sum",
]

#: relative size of a term below which it counts as negligible
SERIES_RTOL = 1e-16
#: number of consecutive negligible terms before a series is declared summed
SMALL_TERMS_IN_A_ROW = 3
#: hard cap on the number of series terms
MAX_TERMS = 20000
#: infinite q-products stop once |a q^k| drops below this
Q_PRODUCT_CUTOFF = 1e-18


class SpecfunError(ArithmeticError):
    """Base class for special-function evaluation failures."""


class PoleError(SpecfunError):
    """Argument sits on a pole (non-positive integer for Gamma)."""


class DivergenceError(SpecfunError):
    """Series or product does not converge for the given arguments."""


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    truncation_estimate: float = 0.0

    def __post_init__(self):
        if not self.truncation_estimate >= 0:
            raise ValueError("truncation_estimate must be non-negative")


def pochhammer(a: complex, n: int) -> complex:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1.0 + 0j
    for k in range(n):
        out *= a + k
    return out


def q_pochhammer(a: complex, q: float, n: int | float) -> complex:
    """(a; q)_n for finite n, or the infinite product when ``n`` is ``math.inf``."""
    if n == math.inf:
        return infinite_q_product(a, q).value
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer or math.inf")
    out = 1.0 + 0j
    qk = 1.0
    for _ in range(int(n)):
        out *= 1.0 - a * qk
        qk *= q
    return out


def infinite_q_product(a: complex, q: float) -> SeriesResult:
    """(a; q)_inf with the truncation point and a bound on the neglected tail."""
    if abs(q) >= 1:
        raise DivergenceError(f"(a; q)_inf needs |q| < 1, got q={q}")
    out = 1.0 + 0j
    aq = complex(a)
    k = 0
    while abs(aq) >= Q_PRODUCT_CUTOFF:
        out *= 1.0 - aq
        aq *= q
        k += 1
        if k > MAX_TERMS:
            raise DivergenceError("q-product did not reach the cutoff")
    # remaining factors: |prod(1 - a q^j) - 1| <~ sum |a q^j| = |a q^k| / (1 - |q|)
    tail = abs(out) * abs(aq) / (1.0 - abs(q))
    return SeriesResult(out, k, tail)


# Lanczos approximation, g = 671/128 with 14 terms (Numerical Recipes, 3rd ed.)
_LANCZOS_G = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_LOG_SQRT_2PI = 0.91893853320467274178


def _log_gamma_lanczos(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    ser = np.full_like(z, _LANCZOS_C0)
    for j, c in enumerate(_LANCZOS_COEF, start=1):
        ser = ser + c / (z + j)
    t = z + _LANCZOS_G
    return (z + 0.5) * np.log(t) - t + _LOG_SQRT_2PI + np.log(ser) - np.log(z)


def log_gamma(z):
    """log Gamma(z) on the standard branch (analytic off the negative real axis).

    Scalars return a complex scalar; arrays return a complex array.  For
    Re z < 0.5 the argument is shifted up with log Gamma(z) = log Gamma(z+m)
    - sum log(z+k); this agrees with the reflection-formula value on the
    same branch and avoids evaluating sin(pi z) at large imaginary part.
    """
    scalar = np.ndim(z) == 0
    zz = np.array(z, dtype=complex, ndmin=1)
    on_pole = (zz.imag == 0) & (zz.real <= 0) & (zz.real == np.round(zz.real))
    if np.any(on_pole):
        raise PoleError(f"log_gamma has a pole at {zz[on_pole][0].real:g}")
    shift = np.where(zz.real < 0.5, np.ceil(0.5 - zz.real), 0.0).astype(int)
    correction = np.zeros_like(zz)
    w = zz.copy()
    for _ in range(int(shift.max(initial=0))):
        need = shift > 0
        correction[need] += np.log(w[need])
        w[need] += 1.0
        shift[need] -= 1
    out = _log_gamma_lanczos(w) - correction
    return complex(out[0]) if scalar else out


def gamma(z):
    return np.exp(log_gamma(z))


def _is_nonpositive_integer(a: complex) -> bool:
    a = complex(a)
    return a.imag == 0 and a.real <= 0 and a.real == round(a.real)


def _sum_series(ratio, upper_stop: int | None, converges: bool) -> SeriesResult:
    """Sum t_0 = 1, t_{k+1} = t_k * ratio(k).

    ``upper_stop`` is the last index of a terminating series; in that case the
    sum is exact term by term.  Otherwise stop after ``SMALL_TERMS_IN_A_ROW``
    consecutive terms below ``SERIES_RTOL`` relative to the partial sum.
    """
    total = 1.0 + 0j
    term = 1.0 + 0j
    if upper_stop is not None:
        for k in range(upper_stop):
            term *= ratio(k)
            total += term
        return SeriesResult(total, upper_stop + 1, 0.0)
    if not converges:
        raise DivergenceError("series neither terminates nor converges")
    small = 0
    for k in range(MAX_TERMS):
        prev = term
        term = term * ratio(k)
        total += term
        if abs(term) <= SERIES_RTOL * abs(total):
            small += 1
            if small >= SMALL_TERMS_IN_A_ROW:
                r = abs(term / prev) if prev != 0 else 0.0
                tail = abs(term) * r / (1 - r) if r < 1 else abs(term)
                return SeriesResult(total, k + 2, tail)
        else:
            small = 0
    raise DivergenceError(f"series not converged after {MAX_TERMS} terms")


def hypergeometric_rFs(upper: Sequence[complex], lower: Sequence[complex], z: complex) -> SeriesResult:
    """Generalized hypergeometric series rFs(upper; lower; z)."""
    upper = [complex(a) for a in upper]
    lower = [complex(b) for b in lower]
    z = complex(z)
    if z == 0:
        return SeriesResult(1.0 + 0j, 1, 0.0)
    stops = [int(-a.real) for a in upper if _is_nonpositive_integer(a)]
    stop = min(stops) if stops else None
    for b in lower:
        if _is_nonpositive_integer(b) and (stop is None or -b.real < stop):
            raise PoleError(f"lower parameter {b.real:g} hits a pole before the series ends")
    r, s = len(upper), len(lower)
    converges = r <= s or (r == s + 1 and abs(z) < 1)

    def ratio(k):
        num = z
        for a in upper:
            num *= a + k
        den = k + 1.0
        for b in lower:
            den *= b + k
        return num / den

    return _sum_series(ratio, stop, converges)


def _q_termination(a: complex, q: float) -> int | None:
    """m if a == q^{-m} for a non-negative integer m, else None."""
    a = complex(a)
    if a.imag != 0 or a.real <= 0:
        return None
    m = -math.log(a.real) / math.log(q)
    mr = round(m)
    if mr >= 0 and abs(m - mr) < 1e-9:
        return int(mr)
    return None


def basic_hypergeometric_rphis(
    upper: Sequence[complex], lower: Sequence[complex], q: float, z: complex
) -> SeriesResult:
    """Basic hypergeometric series r phi s (upper; lower | q; z), 0 < q < 1."""
    if not 0 < q < 1:
        raise ValueError("basic hypergeometric series needs 0 < q < 1")
    upper = [complex(a) for a in upper]
    lower = [complex(b) for b in lower]
    z = complex(z)
    if z == 0:
        return SeriesResult(1.0 + 0j, 1, 0.0)
    stops = [m for m in (_q_termination(a, q) for a in upper) if m is not None]
    stop = min(stops) if stops else None
    r, s = len(upper), len(lower)
    converges = r < s + 1 or (r == s + 1 and abs(z) < 1)
    extra = 1 + s - r

    def ratio(k):
        qk = q**k
        num = z
        for a in upper:
            num *= 1.0 - a * qk
        den = 1.0 - qk * q
        for b in lower:
            den *= 1.0 - b * qk
        if den == 0:
            raise PoleError("lower q-parameter produces a vanishing denominator")
        if extra:
            num *= (-qk) ** extra
        return num / den

    return _sum_series(ratio, stop, converges)


def bessel_j(a: float, z: complex) -> complex:
    """J_a(z) = (z/2)^a / Gamma(a+1) * 0F1(; a+1; -z^2/4), principal power."""
    if a <= -1:
        raise ValueError("bessel_j needs a > -1")
    z = complex(z)
    series = hypergeometric_rFs([], [a + 1], -z * z / 4).value
    if z == 0:
        return series if a == 0 else 0j
    return cmath.exp(a * cmath.log(z / 2) - log_gamma(a + 1)) * series


class ExactComplex:
    """Complex number with exact rational real and imaginary parts.

    Floats convert without rounding, so a terminating series summed in this
    arithmetic is exact for the given (binary) inputs; the only rounding is
    the final conversion back to ``complex``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def of(cls, v) -> "ExactComplex":
        if isinstance(v, ExactComplex):
            return v
        if isinstance(v, (int, float, Fraction)):
            return cls(v, 0)
        v = complex(v)
        return cls(v.real, v.imag)

    def __add__(self, o):
        o = ExactComplex.of(o)
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-ExactComplex.of(o))

    def __rsub__(self, o):
        return ExactComplex.of(o) - self

    def __mul__(self, o):
        o = ExactComplex.of(o)
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = ExactComplex.of(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("exact complex division by zero")
        return ExactComplex((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return ExactComplex.of(o) / self

    def __eq__(self, o):
        o = ExactComplex.of(o)
        return self.re == o.re and self.im == o.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def exact_terminating_sum(ratio, n_terms: int, prefactor=1) -> SeriesResult:
    """prefactor * sum of t_0 = 1, t_{k+1} = t_k * ratio(k) for k < n_terms.

    Everything is kept exact; ``ratio`` returns an :class:`ExactComplex` or a
    rational.  The result is rounded to ``complex`` once, at the end.
    """
    total = ExactComplex(1)
    term = ExactComplex(1)
    for k in range(n_terms):
        term = term * ratio(k)
        total = total + term
    return SeriesResult(complex(total * prefactor), n_terms + 1, 0.0)
