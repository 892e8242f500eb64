"""Orthogonal polynomials of the Askey scheme, evaluated two independent ways.

``eval_hypergeometric`` uses the defining (basic) hypergeometric sums;
``eval_recurrence`` runs the three-term recurrence
eta P_k = A_k P_{k+1} + B_k P_k + C_k P_{k-1} upward from P_0 = 1,
P_{-1} = 0.  The recurrence coefficients are physical ladder data and are
owned by :mod:`ladderlab.models`; this module only consumes them.

Argument conventions (``arg`` is always the polynomial variable):

=====================  =============================  ==================
family                 params                         arg
=====================  =============================  ==================
Hermite                ()                             x
Laguerre               (alpha,)                       x
Jacobi                 (alpha, beta)                  x
Gegenbauer             (lam,)                         x
MeixnerPollaczek       (a, phi)                       x
ContinuousHahnSpecial  (a1, a2)                       x
ContinuousDualHahn     (a1, a2, a3)                   x**2
Wilson                 (a1, a2, a3, a4)               x**2
AskeyWilson            (a1, a2, a3, a4, q)            cos x
=====================  =============================  ==================

For the x**2 and cos x families the hypergeometric sum depends on x only
through x**2 or cos x, so it is evaluated directly in ``arg``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .specfun import ExactComplex, exact_terminating_sum, hypergeometric_rFs, pochhammer

__all__ = [
    "FAMILIES",
    "PolynomialFamily",
    "MissingCoefficientError",
    "UnsupportedFamilyError",
    "eval_hypergeometric",
    "eval_recurrence",
    "recurrence_with_derivatives",
    "gegenbauer_jacobi_ratio_check",
    "derivative",
]

FAMILIES = (
    "Hermite",
    "Laguerre",
    "Jacobi",
    "Gegenbauer",
    "MeixnerPollaczek",
    "ContinuousHahnSpecial",
    "ContinuousDualHahn",
    "Wilson",
    "AskeyWilson",
)

_N_PARAMS = {
    "Hermite": 0,
    "Laguerre": 1,
    "Jacobi": 2,
    "Gegenbauer": 1,
    "MeixnerPollaczek": 2,
    "ContinuousHahnSpecial": 2,
    "ContinuousDualHahn": 3,
    "Wilson": 4,
    "AskeyWilson": 5,
}


class MissingCoefficientError(LookupError):
    """No registered model supplies recurrence coefficients for this family."""


class UnsupportedFamilyError(ValueError):
    pass


@dataclass(frozen=True)
class PolynomialFamily:
    family_id: str
    params: tuple = ()
    #: enforce the orthogonality constraints; bindings that continue a family
    #: outside its classical range (Soliton, Morse) switch this off
    strict: bool = True

    def __post_init__(self):
        if self.family_id not in _N_PARAMS:
            raise ValueError(f"unknown polynomial family {self.family_id!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.params) != _N_PARAMS[self.family_id]:
            raise ValueError(f"{self.family_id} takes {_N_PARAMS[self.family_id]} parameters")
        if self.strict:
            self._check()

    def _check(self):
        fid, p = self.family_id, self.params
        if fid == "Jacobi" and not (p[0] > -1 and p[1] > -1):
            raise ValueError("Jacobi needs alpha > -1 and beta > -1")
        if fid == "Laguerre" and not p[0] > -1:
            raise ValueError("Laguerre needs alpha > -1")
        if fid == "Gegenbauer" and not p[0] > -0.5:
            raise ValueError("Gegenbauer needs lambda > -1/2")
        if fid == "AskeyWilson" and not 0 < p[4] < 1:
            raise ValueError("Askey-Wilson needs 0 < q < 1")


# --------------------------------------------------------------------------
# hypergeometric route
#
# The defining sums are terminating, but at degree ~20 their terms exceed the
# result by ten orders of magnitude, so they are summed in exact rational
# arithmetic.  Conjugate parameter pairs such as (a+ix, a-ix) are merged into
# the real factor (a+k)^2 + eta, and (a z, a/z) into 1 - 2 a q^k eta + a^2
# q^{2k}, so the polynomial argument enters exactly as given.


def _F(v) -> Fraction:
    return Fraction(float(v))


def _poch(a, n):
    out = Fraction(1) if not isinstance(a, ExactComplex) else ExactComplex(1)
    for k in range(n):
        out = out * (a + k)
    return out


def _exact_value(pre, ratio, n_terms) -> complex:
    return exact_terminating_sum(ratio, n_terms, prefactor=pre).value


def _hermite(n: int, x: complex) -> complex:
    X = ExactComplex.of(x)
    if X == 0:
        if n % 2:
            return 0j
        m = n // 2
        return complex((-1) ** m * math.factorial(n) // math.factorial(m))
    w = -1 / (X * X)  # 2F0(-n/2, -(n-1)/2; -; -1/x^2)
    h1, h2 = Fraction(-n, 2), Fraction(-(n - 1), 2)
    pre = ExactComplex(1)
    for _ in range(n):
        pre = pre * (2 * X)
    return _exact_value(pre, lambda k: w * ((h1 + k) * (h2 + k) / (k + 1)), n // 2)


def _laguerre(n, alpha, x):
    a1, X = _F(alpha) + 1, ExactComplex.of(x)
    pre = _poch(a1, n) / math.factorial(n)
    return _exact_value(pre, lambda k: X * (Fraction(-n + k) / ((a1 + k) * (k + 1))), n)


def _jacobi(n, alpha, beta, x):
    a, b = _F(alpha), _F(beta)
    y = (1 - ExactComplex.of(x)) / 2
    pre = _poch(a + 1, n) / math.factorial(n)
    return _exact_value(pre, lambda k: y * ((-n + k) * (n + a + b + 1 + k) / ((a + 1 + k) * (k + 1))), n)


def _gegenbauer(n, lam, x):
    la = _F(lam)
    scale = _poch(2 * la, n) / _poch(la + Fraction(1, 2), n)
    return complex(float(scale)) * _jacobi(n, float(la - Fraction(1, 2)), float(la - Fraction(1, 2)), x)


def _meixner_pollaczek(n, a, phi, x):
    A = _F(a)
    if phi == math.pi / 2:
        phase, z = ExactComplex(0, 1), ExactComplex(2)
    else:
        phase, z = ExactComplex.of(cmath.exp(1j * phi)), ExactComplex.of(1 - cmath.exp(-2j * phi))
    pre = ExactComplex(1)
    for _ in range(n):
        pre = pre * phase
    pre = pre * (_poch(2 * A, n) / math.factorial(n))
    ax = A + ExactComplex(0, 1) * ExactComplex.of(x)
    return _exact_value(pre, lambda k: z * (ax + k) * (Fraction(-n + k) / ((2 * A + k) * (k + 1))), n)


def _continuous_hahn_special(n, a1, a2, x):
    # p_n(x; a1, a2, a1, a2)
    A1, A2 = _F(a1), _F(a2)
    b1, b2, top = 2 * A1, A1 + A2, 2 * A1 + 2 * A2 - 1
    pre = ExactComplex(1)
    for _ in range(n):
        pre = pre * ExactComplex(0, 1)
    pre = pre * (_poch(b1, n) * _poch(b2, n) / math.factorial(n))
    ax = A1 + ExactComplex(0, 1) * ExactComplex.of(x)
    return _exact_value(
        pre, lambda k: (ax + k) * ((-n + k) * (n + top + k) / ((b1 + k) * (b2 + k) * (k + 1))), n
    )


def _continuous_dual_hahn(n, a1, a2, a3, eta):
    A1, A2, A3 = _F(a1), _F(a2), _F(a3)
    E = ExactComplex.of(eta)
    pre = _poch(A1 + A2, n) * _poch(A1 + A3, n)
    return _exact_value(
        pre, lambda k: (E + (A1 + k) ** 2) * (Fraction(-n + k) / ((A1 + A2 + k) * (A1 + A3 + k) * (k + 1))), n
    )


def _wilson(n, a1, a2, a3, a4, eta):
    A = [_F(v) for v in (a1, a2, a3, a4)]
    E = ExactComplex.of(eta)
    top = sum(A) - 1
    pre = _poch(A[0] + A[1], n) * _poch(A[0] + A[2], n) * _poch(A[0] + A[3], n)

    def ratio(k):
        num = (-n + k) * (n + top + k)
        den = (A[0] + A[1] + k) * (A[0] + A[2] + k) * (A[0] + A[3] + k) * (k + 1)
        return (E + (A[0] + k) ** 2) * (num / den)

    return _exact_value(pre, ratio, n)


def _askey_wilson(n, a, q, eta):
    # put the largest |a_j| first: the prefactor a1^{-n} is then best conditioned
    a = [_F(v) for v in sorted(a, key=abs, reverse=True)]
    if a[0] == 0:
        raise ValueError("Askey-Wilson hypergeometric form needs some a_j != 0")
    Q = _F(q)
    E = ExactComplex.of(eta)
    a1 = a[0]
    b4 = a[0] * a[1] * a[2] * a[3]
    pre = a1 ** (-n)
    for aj in a[1:]:
        for k in range(n):
            pre *= 1 - a1 * aj * Q**k

    def ratio(k):
        qk = Q**k
        num = (1 - Q ** (k - n)) * (1 - b4 * Q ** (n - 1 + k)) * Q
        den = (1 - a[0] * a[1] * qk) * (1 - a[0] * a[2] * qk) * (1 - a[0] * a[3] * qk) * (1 - qk * Q)
        return (1 - 2 * a1 * qk * E + a1 * a1 * qk * qk) * (num / den)

    return _exact_value(pre, ratio, n)


def eval_hypergeometric(fam: PolynomialFamily, n: int, arg: complex) -> complex:
    """P_n(arg) from the defining hypergeometric sum (scalar)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    fid, p = fam.family_id, fam.params
    arg = complex(arg)
    if fid == "Hermite":
        return _hermite(n, arg)
    if fid == "Laguerre":
        return _laguerre(n, p[0], arg)
    if fid == "Jacobi":
        return _jacobi(n, p[0], p[1], arg)
    if fid == "Gegenbauer":
        return _gegenbauer(n, p[0], arg)
    if fid == "MeixnerPollaczek":
        return _meixner_pollaczek(n, p[0], p[1], arg)
    if fid == "ContinuousHahnSpecial":
        return _continuous_hahn_special(n, p[0], p[1], arg)
    if fid == "ContinuousDualHahn":
        return _continuous_dual_hahn(n, *p, arg)
    if fid == "Wilson":
        return _wilson(n, *p, arg)
    if fid == "AskeyWilson":
        return _askey_wilson(n, p[:4], p[4], arg)
    raise UnsupportedFamilyError(fid)


# --------------------------------------------------------------------------
# recurrence route


def _coefficients(fam: PolynomialFamily, nmax: int):
    from .models import family_recurrence  # models owns the ladder data

    try:
        return family_recurrence(fam, nmax)
    except KeyError as exc:
        raise MissingCoefficientError(
            f"no registered model provides recurrence coefficients for {fam.family_id}"
        ) from exc


def recurrence_with_derivatives(A, B, C, n: int, eta, order: int = 0):
    """Run the recurrence to degree ``n`` at the points ``eta``.

    ``A``, ``B``, ``C`` are sequences indexed by k (at least n entries).
    Returns a list [P, P', P''][:order+1] of complex arrays, obtained by
    differentiating the recurrence itself:
    P'_{k+1} = ((eta - B_k) P'_k + P_k - C_k P'_{k-1}) / A_k.
    """
    eta = np.asarray(eta, dtype=complex)
    prev = [np.zeros_like(eta) for _ in range(order + 1)]
    cur = [np.ones_like(eta)] + [np.zeros_like(eta) for _ in range(order)]
    for k in range(n):
        nxt = []
        for d in range(order + 1):
            v = (eta - B[k]) * cur[d] - C[k] * prev[d]
            if d >= 1:
                v = v + d * cur[d - 1]
            nxt.append(v / A[k])
        prev, cur = cur, nxt
    return cur


def eval_recurrence(fam: PolynomialFamily, n: int, arg):
    """P_n(arg) by upward recurrence; vectorized over ``arg``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    A, B, C = _coefficients(fam, n)
    out = recurrence_with_derivatives(A, B, C, n, arg)[0]
    return complex(out) if np.ndim(arg) == 0 else out


# --------------------------------------------------------------------------
# checks and derivatives


def gegenbauer_jacobi_ratio_check(beta: float, n: int, arg: float) -> float:
    """|P_n^(beta,beta)/(beta+1)_n - C_n^(beta+1/2)/(2beta+1)_n| at ``arg``.

    Both sides are evaluated from their own hypergeometric sums; the
    Gegenbauer side does not go through the Jacobi routine.
    """
    if not beta > -0.5:
        raise ValueError("need beta > -1/2")
    jac = _jacobi(n, beta, beta, arg) / pochhammer(beta + 1, n)
    lam = beta + 0.5
    # C_n^(lam)(x) = (2 lam)_n / n! 2F1(-n, n + 2 lam; lam + 1/2; (1 - x)/2)
    geg = pochhammer(2 * lam, n) / math.factorial(n) * hypergeometric_rFs([-n, n + 2 * lam], [lam + 0.5], (1 - arg) / 2).value
    return abs(jac - geg / pochhammer(2 * beta + 1, n))


def _falling(k: int, d: int) -> float:
    out = 1.0
    for j in range(d):
        out *= k - j
    return out


def derivative(fam: PolynomialFamily, n: int, arg: float, order: int = 1) -> complex:
    """d^order P_n / d arg^order from the explicit series, term by term."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    fid, p = fam.family_id, fam.params
    if n == 0:
        return 0j
    x = complex(arg)
    if fid == "Hermite":
        # H_n(x) = sum_k (-1)^k n! / (k! (n-2k)!) (2x)^{n-2k}
        total = 0j
        for k in range(n // 2 + 1):
            m = n - 2 * k
            if m < order:
                continue
            c = (-1) ** k * math.factorial(n) / (math.factorial(k) * math.factorial(m)) * 2.0**m
            total += c * _falling(m, order) * x ** (m - order)
        return total
    if fid == "Laguerre":
        a = p[0]
        pre = pochhammer(a + 1, n) / math.factorial(n)
        total, term = 0j, 1.0 + 0j  # term = (-n)_k / ((a+1)_k k!)
        for k in range(n + 1):
            if k >= order:
                total += term * _falling(k, order) * x ** (k - order)
            term *= (-n + k) / ((a + 1 + k) * (k + 1))
        return pre * total
    if fid in ("Jacobi", "Gegenbauer"):
        if fid == "Jacobi":
            a, b, scale = p[0], p[1], 1.0
        else:
            lam = p[0]
            a = b = lam - 0.5
            scale = pochhammer(2 * lam, n) / pochhammer(lam + 0.5, n)
        pre = scale * pochhammer(a + 1, n) / math.factorial(n)
        y = (1 - x) / 2
        total, term = 0j, 1.0 + 0j
        for k in range(n + 1):
            if k >= order:
                # d/dx y^k = -k/2 y^{k-1}
                total += term * _falling(k, order) * (-0.5) ** order * y ** (k - order)
            term *= (-n + k) * (n + a + b + 1 + k) / ((a + 1 + k) * (k + 1))
        return pre * total
    raise UnsupportedFamilyError(f"series derivative not provided for {fid}")
