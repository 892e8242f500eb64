"""Shape invariance of the difference-equation models.

Everything is checked on the polynomial level, after the similarity
transformation by the ground state.  With s the model's imaginary shift
(1 for the Wilson-type models, log q for Askey-Wilson) the transformed
forward and backward shift operators act as

    F P(x) = i phi(x)^{-1} (P(x - i s/2) - P(x + i s/2))
    B P(x) = -i (V(x) phi(x - i s/2) P(x - i s/2)
                 - V*(x) phi(x + i s/2) P(x + i s/2))

where B uses the potential at the original parameters and P is a function
of x (usually a polynomial in eta(x)).  They obey F P_n(lambda) =
f_n P_{n-1}(lambda + delta) and B P_n(lambda + delta) = b_n P_{n+1}(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import ModelSpec
from .specfun import log_gamma

__all__ = [
    "ShapeData",
    "shape_data",
    "forward_shift",
    "backward_shift",
    "forward_shift_check",
    "backward_shift_check",
    "energy_factorization_check",
    "factorized_hamiltonian_check",
    "ground_shift_identity_check",
    "compensator_constants",
    "compensator_check",
    "compensator_ladder_check",
    "prepotential_derivative",
    "prepotential_check",
]

DISCRETE = ("MeixnerPollaczek", "ContinuousHahn", "ContinuousDualHahn", "Wilson", "AskeyWilson")
COMPENSATED = ("MeixnerPollaczek", "ContinuousDualHahn")


@dataclass
class ShapeData:
    """Parameters before and after the shape-invariant shift.

    ``delta`` is the additive parameter shift; Askey-Wilson shifts its
    parameters multiplicatively (a_j -> a_j q^{1/2}), recorded as
    ``delta_prime`` = 1/2, the exponent of q.
    """

    lam: dict
    delta: dict
    delta_prime: float | None
    varphi: Callable
    f: Callable
    b: Callable

    def factorization_error(self, spec: ModelSpec, n: int) -> float:
        e = spec.energy(n)
        return abs(self.f(n) * self.b(n - 1) / 2 - e) / max(1.0, abs(e))


def _require_discrete(spec: ModelSpec, allowed=DISCRETE):
    if spec.name not in allowed:
        raise ValueError(f"{spec.name} is not one of {allowed}")


def shape_data(spec: ModelSpec) -> ShapeData:
    _require_discrete(spec)
    sh = spec.shifted()
    lam = spec.params
    if spec.name == "AskeyWilson":
        delta = {"a": tuple(v2 - v1 for v1, v2 in zip(spec.a, sh.a)), "q": 0.0}
        dprime = 0.5
    else:
        delta = {}
        for k, v in lam.items():
            w = sh.params[k]
            delta[k] = tuple(b - a for a, b in zip(v, w)) if isinstance(v, tuple) else w - v
        dprime = None
    return ShapeData(lam, delta, dprime, spec.shape_varphi, spec.shape_f, spec.shape_b)


# --------------------------------------------------------------------------
# operators acting on functions of x


def _half(spec: ModelSpec) -> complex:
    return 0.5j * spec.shift


def forward_shift(spec: ModelSpec, func: Callable) -> Callable:
    """The transformed forward shift operator F(lambda) applied to ``func``."""
    h = _half(spec)

    def out(x):
        x = np.asarray(x, dtype=complex)
        return 1j * (func(x - h) - func(x + h)) / spec.shape_varphi(x)

    return out


def backward_shift(spec: ModelSpec, func: Callable) -> Callable:
    """The transformed backward shift operator B(lambda) applied to ``func``."""
    h = _half(spec)
    vp = spec.shape_varphi

    def out(x):
        x = np.asarray(x, dtype=complex)
        plus = spec.potential(x) * vp(x - h) * func(x - h)
        minus = spec.potential_conj(x) * vp(x + h) * func(x + h)
        return -1j * (plus - minus)

    return out


def _poly_func(spec: ModelSpec, n: int) -> Callable:
    return lambda x: spec.polynomial(n, spec.eta(x))


def _rel(lhs, rhs) -> float:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))


def forward_shift_check(spec: ModelSpec, n: int, grid) -> float:
    """Relative grid residual of F P_n(lambda) - f_n P_{n-1}(lambda + delta)."""
    _require_discrete(spec)
    if n < 1:
        raise ValueError("n must be at least 1")
    lhs = forward_shift(spec, _poly_func(spec, n))(grid)
    rhs = spec.shape_f(n) * _poly_func(spec.shifted(), n - 1)(np.asarray(grid, dtype=complex))
    return _rel(lhs, rhs)


def backward_shift_check(spec: ModelSpec, n: int, grid) -> float:
    """Relative grid residual of B P_n(lambda + delta) - b_n P_{n+1}(lambda)."""
    _require_discrete(spec)
    lhs = backward_shift(spec, _poly_func(spec.shifted(), n))(grid)
    rhs = spec.shape_b(n) * _poly_func(spec, n + 1)(np.asarray(grid, dtype=complex))
    return _rel(lhs, rhs)


def energy_factorization_check(spec: ModelSpec, n_max: int = 20) -> float:
    """max over 1 <= n <= n_max of |f_n b_{n-1}/2 - E_n| / max(1, E_n)."""
    data = shape_data(spec)
    top = int(min(n_max, spec.level_count - 1))
    return max((data.factorization_error(spec, n) for n in range(1, top + 1)), default=0.0)


def factorized_hamiltonian_check(spec: ModelSpec, n: int, grid) -> float:
    """B(F P_n)/2 against E_n P_n, i.e. the transformed Hamiltonian is B F / 2."""
    _require_discrete(spec)
    P = _poly_func(spec, n)
    lhs = 0.5 * backward_shift(spec, forward_shift(spec, P))(grid)
    rhs = spec.energy(n) * P(np.asarray(grid, dtype=complex))
    if n == 0:
        return float(np.max(np.abs(lhs)))
    return _rel(lhs, rhs)


# --------------------------------------------------------------------------
# ground states at shifted parameters


def _ground_square_log(spec: ModelSpec, z):
    """log of phi_0(z)^2 continued analytically off the real line."""
    z = np.asarray(z, dtype=complex)
    name = spec.name
    if name == "MeixnerPollaczek":
        return log_gamma(spec.a + 1j * z) + log_gamma(spec.a - 1j * z)
    if name == "ContinuousHahn":
        return sum(log_gamma(a + 1j * z) + log_gamma(a - 1j * z) for a in spec.a)
    if name in ("ContinuousDualHahn", "Wilson"):
        top = sum(log_gamma(a + 1j * z) + log_gamma(a - 1j * z) for a in spec.a)
        return top - log_gamma(2j * z) - log_gamma(-2j * z)
    raise NotImplementedError(f"no analytic ground-state continuation for {name}")


def ground_shift_identity_check(spec: ModelSpec, grid) -> float:
    """phi_0(x - i/2; lambda + delta)^2 against V(x) phi(x - i/2)^2 phi_0(x)^2.

    Both sides are compared as squares, which avoids choosing a branch of the
    square root; the ratio is formed through log-gamma so large and small
    magnitudes stay representable.
    """
    _require_discrete(spec, DISCRETE[:-1])
    x = np.asarray(grid, dtype=complex)
    h = _half(spec)
    lhs = _ground_square_log(spec.shifted(), x - h)
    rhs = np.log(spec.potential(x) * spec.shape_varphi(x - h) ** 2) + _ground_square_log(spec, x)
    return float(np.max(np.abs(np.expm1(lhs - rhs))))


# --------------------------------------------------------------------------
# the compensator X


def _compensator_mp(spec, func):
    def out(x):
        x = np.asarray(x, dtype=complex)
        return func(x - 0.5j) + func(x + 0.5j)

    return out


def _compensator_dagger_mp(spec, func):
    def out(x):
        x = np.asarray(x, dtype=complex)
        return spec.potential(x) * func(x - 0.5j) + spec.potential_conj(x) * func(x + 0.5j)

    return out


def _cdh_coefficient(spec, x):
    """c(x) = x + i V(x - i/2) + i kappa / (8 (1 + x^2)), with kappa = prod(2 a_j - 1)."""
    kappa = np.prod([2 * a - 1 for a in spec.a])
    return x + 1j * spec.potential(x - 0.5j) + 1j * kappa / (8 * (1 + x * x))


def _cdh_coefficient_conj(spec, x):
    kappa = np.prod([2 * a - 1 for a in spec.a])
    return x - 1j * spec.potential_conj(x + 0.5j) - 1j * kappa / (8 * (1 + x * x))


def _compensator_cdh(spec, func):
    # X = -i S+ T+ + c* S+ + i S- T- + c S-, transformed by the ground states
    V, Vs = spec.potential, spec.potential_conj
    vp = spec.shape_varphi

    def out(x):
        x = np.asarray(x, dtype=complex)
        terms = (
            -1j * V(x - 0.5j) * func(x - 1.5j)
            + _cdh_coefficient_conj(spec, x) * func(x - 0.5j)
            + 1j * Vs(x + 0.5j) * func(x + 1.5j)
            + _cdh_coefficient(spec, x) * func(x + 0.5j)
        )
        return terms / vp(x)

    return out


def _compensator_dagger_cdh(spec, func):
    # X^dagger = i T+ S+^dagger + S+^dagger c - i T- S-^dagger + S-^dagger c*
    V, Vs = spec.potential, spec.potential_conj
    vp = spec.shape_varphi

    def out(x):
        x = np.asarray(x, dtype=complex)
        return (
            1j * V(x) * V(x - 1j) * vp(x - 1.5j) * func(x - 1.5j)
            + V(x) * vp(x - 0.5j) * _cdh_coefficient(spec, x - 0.5j) * func(x - 0.5j)
            - 1j * Vs(x) * Vs(x + 1j) * vp(x + 1.5j) * func(x + 1.5j)
            + Vs(x) * vp(x + 0.5j) * _cdh_coefficient_conj(spec, x + 0.5j) * func(x + 0.5j)
        )

    return out


def compensator_constants(spec: ModelSpec, n: int):
    """(kappa_n, mu_n) with X P_n(lambda) = kappa_n P_n(lambda + delta) and
    X^dagger P_n(lambda + delta) = mu_n P_n(lambda)."""
    _require_discrete(spec, COMPENSATED)
    if spec.name == "MeixnerPollaczek":
        return 2.0, n + 2 * spec.a
    a = spec.a
    return 1.0, (n + a[0] + a[1]) * (n + a[0] + a[2]) * (n + a[1] + a[2])


def compensator_check(spec: ModelSpec, n: int, grid):
    """Relative residuals of the two transformed compensator identities."""
    _require_discrete(spec, COMPENSATED)
    kappa, mu = compensator_constants(spec, n)
    if spec.name == "MeixnerPollaczek":
        X, Xd = _compensator_mp, _compensator_dagger_mp
    else:
        X, Xd = _compensator_cdh, _compensator_dagger_cdh
    xs = np.asarray(grid, dtype=complex)
    sh = spec.shifted()
    r1 = _rel(X(spec, _poly_func(spec, n))(xs), kappa * _poly_func(sh, n)(xs))
    r2 = _rel(Xd(spec, _poly_func(sh, n))(xs), mu * _poly_func(spec, n)(xs))
    return r1, r2


def compensator_ladder_check(spec: ModelSpec, n_max: int = 12) -> float:
    """The ladder coefficients rebuilt from shift and compensator constants.

    The lowering operator is X^dagger A and the raising operator A^dagger X up
    to a constant c (c = 2 for the primed Meixner-Pollaczek ladders, 1 for the
    continuous dual Hahn ones), which gives C_n = mu_{n-1} f_n / c and
    A_n = kappa_n b_n / c.
    """
    _require_discrete(spec, COMPENSATED)
    worst = 0.0
    for n in range(n_max + 1):
        if spec.name == "MeixnerPollaczek":
            c = 2.0
            fac = spec.ladder_norm_factor(n)
        else:
            c = 1.0
            fac = 1.0
        mu_prev = compensator_constants(spec, n - 1)[1] if n else 0.0
        kappa = compensator_constants(spec, n)[0]
        down = mu_prev * spec.shape_f(n) / c if n else 0.0
        up = kappa * spec.shape_b(n) / c
        want_down = spec.ladder_C(n) * fac
        want_up = spec.ladder_A(n) * fac
        for got, want in ((down, want_down), (up, want_up)):
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst


# --------------------------------------------------------------------------
# prepotentials of ordinary models


def prepotential_derivative(spec: ModelSpec, x):
    """(W', W'') from W' = (a eta + b) / eta' with a, b built from the R's."""
    if spec.kind != "ordinary":
        raise ValueError("prepotentials are defined here for ordinary models only")
    r0_0, r1 = spec.R0[0], spec.R1[0]
    rm_0 = spec.Rm1[0]
    rm_1 = spec.Rm1[1] if len(spec.Rm1) > 1 else 0.0
    a = -np.sqrt(r0_0 + r1 * r1 / 4)
    b = 2 * rm_0 / (2 * a + r1) + rm_1 / 4
    x = np.asarray(x, dtype=float)
    eta, e1, e2 = spec.eta(x), spec.eta_prime(x), spec.eta_second(x)
    w1 = (a * eta + b) / e1
    w2 = a - (a * eta + b) * e2 / (e1 * e1)
    return w1, w2


def prepotential_check(spec: ModelSpec, grid) -> float:
    """max |V - (W'^2 + W'')/2| / max(1, |V|) on the grid."""
    x = np.asarray(grid, dtype=float)
    w1, w2 = prepotential_derivative(spec, x)
    V = np.real(spec.potential(x))
    return float(np.max(np.abs(V - 0.5 * (w1 * w1 + w2)) / np.maximum(1.0, np.abs(V))))
