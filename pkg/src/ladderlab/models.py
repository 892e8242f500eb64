"""Registry of the eleven exactly solvable systems.

Each model is an immutable object carrying everything the verification
layers need: domain, spectrum, sinusoidal coordinate, the polynomials
R_0, R_1, R_{-1} in the Hamiltonian that close the double commutator,
the three-term recurrence (ladder) coefficients, potentials, the ground
state as a logarithm, the classical Hamiltonian and, for the difference
equation models, the shape-invariance data.

Conventions
-----------
* Shifts: ``e^{+-p} f(x) = f(x -+ i)`` with ``p = -i d/dx``; for the
  q-model ``q^{+-D} f(z) = f(q^{+-1} z)`` with ``z = e^{ix}``.  In terms of
  x, ``q^{D}`` is the shift ``x -> x - i*log(q)``.
* Polynomials in H are stored as ascending coefficient tuples.
* ``ladder_A/B/C`` are the coefficients of ``eta phi_n = A_n phi_{n+1} +
  B_n phi_n + C_n phi_{n-1}``; they are also the actions of the
  a-normalized creation/annihilation operators.  The a'-normalized operators
  carry the extra factor ``E_{n+1} - E_{n-1}`` (``ladder_norm_factor``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

from .orthopoly import PolynomialFamily, eval_hypergeometric, recurrence_with_derivatives
from .specfun import log_gamma

__all__ = [
    "MODEL_NAMES",
    "ConstraintError",
    "LevelRangeError",
    "FrequencyError",
    "ModelSpec",
    "get_model",
    "canonical_name",
    "energy",
    "eigenfunction",
    "ladder_coefficients",
    "heisenberg_frequencies",
    "family_recurrence",
    "floor_prime",
    "DEFAULT_PARAMS",
]


class ConstraintError(ValueError):
    """Model parameters violate the model's constraint predicate."""


class LevelRangeError(IndexError):
    """Level index outside 0 <= n < level_count."""


class FrequencyError(ValueError):
    """Negative discriminant in alpha_pm: the energy is not admissible."""


def floor_prime(g: float) -> int:
    """Greatest integer strictly below g."""
    f = math.floor(g)
    return f - 1 if f == g else f


def _poly(coefs, h):
    out = 0.0
    for c in reversed(coefs):
        out = out * h + c
    return out


def _esym(a, k):
    """Elementary symmetric polynomial e_k(a)."""
    return sum(math.prod(c) for c in combinations(a, k))


# --------------------------------------------------------------------------
# recurrence coefficient formulas shared with orthopoly


def jacobi_abc(alpha: float, beta: float, n: int):
    s = alpha + beta
    if n == 0:
        return 2.0 / (s + 2), (beta - alpha) / (s + 2), 0.0
    # with negative parameters (finite families) a denominator can vanish at
    # the top level; the corresponding coefficient is then undefined
    A = _div(2 * (n + 1) * (n + s + 1), (2 * n + s + 1) * (2 * n + s + 2))
    B = 0.0 if alpha == beta else _div(beta**2 - alpha**2, (2 * n + s) * (2 * n + s + 2))
    C = _div(2 * (n + alpha) * (n + beta), (2 * n + s) * (2 * n + s + 1))
    return A, B, C


def _product(factors):
    out = 1.0
    for f in factors:
        out = out * f
    return out


def _div(num, den):
    return num / den if den != 0 else math.nan


def laguerre_abc(alpha: float, n: int):
    return -(n + 1.0), 2.0 * n + alpha + 1, -(n + alpha)


def hermite_abc(n: int):
    return 0.5, 0.0, float(n)


def meixner_pollaczek_abc(a: float, n: int):
    return (n + 1) / 2.0, 0.0, (n + 2 * a - 1) / 2.0


def continuous_hahn_abc(a1: float, a2: float, n: int):
    s = a1 + a2
    A = (n + 1) * (n + 2 * s - 1) / ((n + s) * 2 * (2 * n + 2 * s - 1)) if n else 1.0 / (2 * s)
    C = (n + s - 1) * (n + 2 * a1 - 1) * (n + 2 * a2 - 1) / (2 * (2 * n + 2 * s - 1)) if n else 0.0
    return A, 0.0, C


def continuous_dual_hahn_abc(a, n: int):
    b1, b2 = sum(a), _esym(a, 2)
    C = -n * math.prod(n + x + y - 1 for x, y in combinations(a, 2))
    return -1.0, 2.0 * n * n + 2 * (b1 - 0.5) * n + b2, C


def _ratio(num, den):
    # num/den where both vanish together at n = 0 for special parameters
    return 1.0 if num == 0 and den == 0 else num / den


def wilson_abc(a, n: int):
    b1 = sum(a)
    r = _ratio(n + b1 - 1, 2 * n + b1 - 1)
    A = -r / (2 * n + b1)
    pairs = math.prod(n + x + y - 1 for x, y in combinations(a, 2))
    C = -n * pairs / ((2 * n + b1 - 2) * (2 * n + b1 - 1)) if n else 0.0
    # standard normalized coefficients give the diagonal term
    AK = r * math.prod(n + a[0] + ak for ak in a[1:]) / (2 * n + b1)
    CK = n * math.prod(n + x + y - 1 for x, y in combinations(a[1:], 2)) / ((2 * n + b1 - 2) * (2 * n + b1 - 1)) if n else 0.0
    B = AK + CK - a[0] ** 2
    return A, B, C


def askey_wilson_abc(a, q: float, n: int):
    b4 = math.prod(a)
    r = _ratio(1 - b4 * q ** (n - 1), 1 - b4 * q ** (2 * n - 1))
    A = r / (2 * (1 - b4 * q ** (2 * n)))
    pairs = math.prod(1 - x * y * q ** (n - 1) for x, y in combinations(a, 2))
    C = (1 - q**n) * pairs / (2 * (1 - b4 * q ** (2 * n - 2)) * (1 - b4 * q ** (2 * n - 1))) if n else 0.0
    a1 = a[0]
    AK = r * math.prod(1 - a1 * ak * q**n for ak in a[1:]) / (a1 * (1 - b4 * q ** (2 * n)))
    CK = (
        a1 * (1 - q**n) * math.prod(1 - x * y * q ** (n - 1) for x, y in combinations(a[1:], 2))
        / ((1 - b4 * q ** (2 * n - 2)) * (1 - b4 * q ** (2 * n - 1)))
        if n
        else 0.0
    )
    B = (a1 + 1 / a1 - AK - CK) / 2
    return A, B, C


def family_recurrence(fam: PolynomialFamily, nmax: int):
    """Recurrence coefficient lists A, B, C for k = 0..nmax-1 (KeyError if absent)."""
    fid, p = fam.family_id, fam.params
    if fid == "Hermite":
        f = hermite_abc
    elif fid == "Laguerre":
        f = lambda k: laguerre_abc(p[0], k)  # noqa: E731
    elif fid == "Jacobi":
        f = lambda k: jacobi_abc(p[0], p[1], k)  # noqa: E731
    elif fid == "MeixnerPollaczek" and abs(p[1] - math.pi / 2) < 1e-15:
        f = lambda k: meixner_pollaczek_abc(p[0], k)  # noqa: E731
    elif fid == "ContinuousHahnSpecial":
        f = lambda k: continuous_hahn_abc(p[0], p[1], k)  # noqa: E731
    elif fid == "ContinuousDualHahn":
        f = lambda k: continuous_dual_hahn_abc(p, k)  # noqa: E731
    elif fid == "Wilson":
        f = lambda k: wilson_abc(p, k)  # noqa: E731
    elif fid == "AskeyWilson":
        if 0 in p[:4]:
            raise KeyError("AskeyWilson recurrence diagonal needs a_1 != 0")
        a = tuple(sorted(p[:4], key=abs, reverse=True))
        f = lambda k: askey_wilson_abc(a, p[4], k)  # noqa: E731
    else:
        raise KeyError(fid)
    rows = [f(k) for k in range(nmax)]
    return [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]


# --------------------------------------------------------------------------
# the model base class


@dataclass(frozen=True)
class ModelSpec:
    """Common interface; concrete models override the formula hooks."""

    name = "abstract"
    kind = "ordinary"

    # ---- parameters -------------------------------------------------------
    @property
    def params(self) -> dict:
        return {k: getattr(self, k) for k, f in self.__dataclass_fields__.items() if f.init}

    def validate(self):
        pass

    def __post_init__(self):
        self.validate()

    # ---- domain and levels ------------------------------------------------
    domain: tuple = field(default=(-math.inf, math.inf), init=False, repr=False)

    @property
    def level_count(self) -> float:
        return math.inf

    def window(self) -> tuple:
        """Finite interval used for grids and plots (the domain if finite)."""
        return self.domain

    def check_level(self, n: int):
        if n < 0 or n >= self.level_count:
            raise LevelRangeError(f"level {n} outside 0..{self.level_count - 1} for {self.name}")

    # ---- spectrum and algebra ---------------------------------------------
    def energy_formula(self, n):
        raise NotImplementedError

    def energy(self, n: int) -> float:
        self.check_level(n)
        return float(self.energy_formula(n))

    R0: tuple = field(default=(), init=False, repr=False)
    R1: tuple = field(default=(), init=False, repr=False)
    Rm1: tuple = field(default=(), init=False, repr=False)

    def r0(self, h):
        return _poly(self.R0, h)

    def r1(self, h):
        return _poly(self.R1, h)

    def rm1(self, h):
        return _poly(self.Rm1, h)

    def alpha_plus(self, E):
        return self.heisenberg_frequencies(E)[0]

    def alpha_minus(self, E):
        return self.heisenberg_frequencies(E)[1]

    def heisenberg_frequencies(self, E: float):
        r1, r0 = self.r1(E), self.r0(E)
        disc = r1 * r1 / 4 + r0
        if disc < -1e-12 * max(1.0, abs(r1 * r1 / 4), abs(r0)):
            raise FrequencyError(f"negative discriminant {disc:.3g} at E={E} for {self.name}")
        root = math.sqrt(max(disc, 0.0))
        return r1 / 2 + root, r1 / 2 - root

    # ---- recurrence / ladders ----------------------------------------------
    def abc(self, n: int):
        raise NotImplementedError

    def ladder_A(self, n):
        return self.abc(n)[0]

    def ladder_B(self, n):
        return self.abc(n)[1]

    def ladder_C(self, n):
        return 0.0 if n == 0 else self.abc(n)[2]

    def ladder_coefficients(self, n: int):
        self.check_level(n)
        A, B, C = self.abc(n)
        return A, B, (0.0 if n == 0 else C)

    def ladder_norm_factor(self, n: int) -> float:
        """Conversion a' = factor * a on phi_n: E_{n+1} - E_{n-1}."""
        return float(self.energy_formula(n + 1) - self.energy_formula(n - 1))

    def recurrence_lists(self, nmax: int):
        rows = [self.abc(k) for k in range(nmax)]
        return [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]

    # ---- coordinates and potentials ----------------------------------------
    def eta(self, x):
        raise NotImplementedError

    def eta_prime(self, x):
        raise NotImplementedError

    def eta_second(self, x):
        raise NotImplementedError

    def potential(self, x):
        raise NotImplementedError

    def classical_potential(self, x):
        return self.potential(x)

    def ground_log(self, x):
        raise NotImplementedError

    # ---- polynomials and eigenfunctions -----------------------------------
    def polynomial(self, n: int, eta, order: int = 0):
        """P_n(eta) (and derivatives in eta) by the model's recurrence."""
        A, B, C = self.recurrence_lists(n)
        out = recurrence_with_derivatives(A, B, C, n, eta, order)
        return out[0] if order == 0 else out

    def poly_binding(self, n: int):
        """(family, argument map, prefactor map) for the hypergeometric route."""
        raise NotImplementedError

    def polynomial_hypergeometric(self, n: int, eta: complex) -> complex:
        fam, argmap, factor = self.poly_binding(n)
        return factor(eta) * eval_hypergeometric(fam, n, argmap(eta))

    def eigenfunction(self, n: int, x):
        self.check_level(n)
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any((x <= lo) | (x >= hi)):
            raise ValueError(f"x outside the open domain {self.domain} of {self.name}")
        return np.exp(self.ground_log(x)) * self.polynomial(n, self.eta(x))

    # ---- classical mechanics ---------------------------------------------
    classical_R0: tuple = field(default=(), init=False, repr=False)
    classical_Rm1: tuple = field(default=(), init=False, repr=False)

    def classical_hamiltonian(self, x, p):
        return 0.5 * p * p + np.real(self.classical_potential(x))

    def classical_dH_dp(self, x, p):
        return p

    def classical_dH_dx(self, x, p):
        h = 1e-20
        return np.imag(self.classical_potential(np.asarray(x, dtype=float) + 1j * h)) / h

    def classical_gradient(self, x, p):
        """(dH/dx, dH/dp) of the classical Hamiltonian."""
        return self.classical_dH_dx(x, p), self.classical_dH_dp(x, p)

    def classical_bound(self, H0: float) -> bool:
        return _poly(self.classical_R0, H0) > 0

    # ---- serialization ----------------------------------------------------
    def describe(self, n_max: int = 10) -> dict:
        levels = int(min(n_max + 1, self.level_count))
        out = {"name": self.name, "kind": self.kind}
        for k, v in self.params.items():
            out[k] = list(v) if isinstance(v, tuple) else v
        out["level_count"] = None if math.isinf(self.level_count) else int(self.level_count)
        out["domain"] = [float(self.domain[0]), float(self.domain[1])]
        out["spectrum"] = [self.energy(n) for n in range(levels)]
        return out

    def to_json(self, n_max: int = 10) -> str:
        return json.dumps(_round17(self.describe(n_max)), allow_nan=True)

    def key(self) -> tuple:
        return (self.name,) + tuple(self.params.items())


def _round17(obj):
    if isinstance(obj, float):
        return float(f"{obj:.17g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round17(v) for v in obj]
    return obj


# --------------------------------------------------------------------------
# ordinary quantum mechanics


@dataclass(frozen=True)
class _Ordinary(ModelSpec):
    kind = "ordinary"

    def dlog_ground(self, x):
        """(W', W'') with W = log phi_0."""
        raise NotImplementedError


@dataclass(frozen=True)
class Harmonic(_Ordinary):
    name = "Harmonic"

    def __post_init__(self):
        object.__setattr__(self, "R0", (1.0,))
        object.__setattr__(self, "R1", (0.0,))
        object.__setattr__(self, "Rm1", (0.0,))
        object.__setattr__(self, "classical_R0", (1.0,))
        object.__setattr__(self, "classical_Rm1", (0.0,))

    def energy_formula(self, n):
        return 1.0 * n

    def abc(self, n):
        return hermite_abc(n)

    def eta(self, x):
        return x

    def eta_prime(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def eta_second(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def ground_log(self, x):
        return -0.5 * np.asarray(x) ** 2

    def dlog_ground(self, x):
        x = np.asarray(x)
        return -x, -np.ones_like(x)

    def classical_potential(self, x):
        return 0.5 * np.asarray(x) ** 2

    def potential(self, x):
        return 0.5 * (np.asarray(x) ** 2 - 1)

    def window(self):
        return (-5.0, 5.0)

    def poly_binding(self, n):
        return PolynomialFamily("Hermite"), (lambda e: e), (lambda e: 1.0)


@dataclass(frozen=True)
class SymPoschlTeller(_Ordinary):
    """The 1/sin^2 x potential on (0, pi)."""

    name = "SymPoschlTeller"
    g: float = 1.0

    def validate(self):
        if not self.g > 0:
            raise ConstraintError("g > 0 violated")

    def __post_init__(self):
        self.validate()
        g = self.g
        object.__setattr__(self, "domain", (0.0, math.pi))
        object.__setattr__(self, "R0", (g * g - 0.25, 2.0))
        object.__setattr__(self, "R1", (1.0,))
        object.__setattr__(self, "Rm1", (0.0,))
        object.__setattr__(self, "classical_R0", (g * g, 2.0))
        object.__setattr__(self, "classical_Rm1", (0.0,))

    @property
    def beta(self):
        return self.g - 0.5

    def energy_formula(self, n):
        return n * (n / 2 + self.g)

    def abc(self, n):
        return jacobi_abc(self.beta, self.beta, n)

    def eta(self, x):
        return np.cos(x)

    def eta_prime(self, x):
        return -np.sin(x)

    def eta_second(self, x):
        return -np.cos(x)

    def ground_log(self, x):
        return self.g * np.log(np.sin(x))

    def dlog_ground(self, x):
        s = np.sin(x)
        return self.g * np.cos(x) / s, -self.g / s**2

    def classical_potential(self, x):
        return 0.5 * self.g**2 / np.tan(x) ** 2

    def potential(self, x):
        g = self.g
        return 0.5 * g * (g - 1) / np.sin(x) ** 2 - 0.5 * g * g

    def poly_binding(self, n):
        return PolynomialFamily("Jacobi", (self.beta, self.beta)), (lambda e: e), (lambda e: 1.0)


@dataclass(frozen=True)
class PoschlTeller(_Ordinary):
    """g(g-1)/sin^2 x + h(h-1)/cos^2 x on (0, pi/2)."""

    name = "PoschlTeller"
    g: float = 1.0
    h: float = 2.0

    def validate(self):
        if not self.g > 0:
            raise ConstraintError("g > 0 violated")
        if not self.h > 0:
            raise ConstraintError("h > 0 violated")

    def __post_init__(self):
        self.validate()
        g, h = self.g, self.h
        object.__setattr__(self, "domain", (0.0, math.pi / 2))
        object.__setattr__(self, "R0", (4 * (g + h) ** 2 - 4, 8.0))
        object.__setattr__(self, "R1", (4.0,))
        object.__setattr__(self, "Rm1", (4 * ((g - 0.5) ** 2 - (h - 0.5) ** 2),))
        object.__setattr__(self, "classical_R0", (4 * (g + h) ** 2, 8.0))
        object.__setattr__(self, "classical_Rm1", (4 * (g * g - h * h),))

    def energy_formula(self, n):
        return 2 * n * (n + self.g + self.h)

    def abc(self, n):
        return jacobi_abc(self.g - 0.5, self.h - 0.5, n)

    def eta(self, x):
        return np.cos(2 * np.asarray(x))

    def eta_prime(self, x):
        return -2 * np.sin(2 * np.asarray(x))

    def eta_second(self, x):
        return -4 * np.cos(2 * np.asarray(x))

    def ground_log(self, x):
        return self.g * np.log(np.sin(x)) + self.h * np.log(np.cos(x))

    def dlog_ground(self, x):
        s, c = np.sin(x), np.cos(x)
        return self.g * c / s - self.h * s / c, -self.g / s**2 - self.h / c**2

    def classical_potential(self, x):
        g, h = self.g, self.h
        return 0.5 * (g * g / np.sin(x) ** 2 + h * h / np.cos(x) ** 2) - 0.5 * (g + h) ** 2

    def potential(self, x):
        g, h = self.g, self.h
        return 0.5 * (g * (g - 1) / np.sin(x) ** 2 + h * (h - 1) / np.cos(x) ** 2) - 0.5 * (g + h) ** 2

    def poly_binding(self, n):
        fam = PolynomialFamily("Jacobi", (self.g - 0.5, self.h - 0.5))
        return fam, (lambda e: e), (lambda e: 1.0)


@dataclass(frozen=True)
class Soliton(_Ordinary):
    """-g(g+1)/(2 cosh^2 x), finitely many bound states."""

    name = "Soliton"
    g: float = 2.5

    def validate(self):
        if not self.g > 0:
            raise ConstraintError("g > 0 violated")

    def __post_init__(self):
        self.validate()
        g = self.g
        object.__setattr__(self, "R0", (g * g - 0.25, -2.0))
        object.__setattr__(self, "R1", (-1.0,))
        object.__setattr__(self, "Rm1", (0.0,))
        object.__setattr__(self, "classical_R0", (g * g, -2.0))
        object.__setattr__(self, "classical_Rm1", (0.0,))

    @property
    def level_count(self):
        return 1 + floor_prime(self.g)

    @property
    def beta(self):
        return -self.g - 0.5

    def energy_formula(self, n):
        return n * (self.g - n / 2)

    def abc(self, n):
        A, B, C = jacobi_abc(self.beta, self.beta, n)
        return A, B, -C

    def eta(self, x):
        return np.sinh(x)

    def eta_prime(self, x):
        return np.cosh(x)

    def eta_second(self, x):
        return np.sinh(x)

    def ground_log(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        # log cosh x without overflow
        return -self.g * (x + np.log1p(np.exp(-2 * x)) - math.log(2))

    def dlog_ground(self, x):
        return -self.g * np.tanh(x), -self.g / np.cosh(x) ** 2

    def classical_potential(self, x):
        return 0.5 * self.g**2 * np.tanh(x) ** 2

    def potential(self, x):
        g = self.g
        return -0.5 * g * (g + 1) / np.cosh(x) ** 2 + 0.5 * g * g

    def window(self):
        return (-5.0, 5.0)

    def poly_binding(self, n):
        fam = PolynomialFamily("Jacobi", (self.beta, self.beta), strict=False)
        return fam, (lambda e: 1j * e), (lambda e: 1j ** (-n))


@dataclass(frozen=True)
class Morse(_Ordinary):
    name = "Morse"
    g: float = 2.5
    mu: float = 1.0

    def validate(self):
        if not self.g > 0:
            raise ConstraintError("g > 0 violated")
        if not self.mu > 0:
            raise ConstraintError("mu > 0 violated")

    def __post_init__(self):
        self.validate()
        g, mu = self.g, self.mu
        object.__setattr__(self, "R0", (g * g - 0.25, -2.0))
        object.__setattr__(self, "R1", (-1.0,))
        object.__setattr__(self, "Rm1", (-mu * (g + 0.5),))
        object.__setattr__(self, "classical_R0", (g * g, -2.0))
        object.__setattr__(self, "classical_Rm1", (-mu * g,))

    @property
    def level_count(self):
        return 1 + floor_prime(self.g)

    def energy_formula(self, n):
        return n * (self.g - n / 2)

    def abc(self, n):
        g, mu = self.g, self.mu
        A = _div((n + 1) * (2 * g - n), (2 * g - 2 * n - 1) * 2 * (g - n))
        B = _div(mu * (g + 0.5), (g - n - 0.5) * (g - n + 0.5))
        C = _div(2 * mu * mu, (g - n) * (2 * g - 2 * n + 1))
        return A, B, C

    def eta(self, x):
        return np.exp(-np.asarray(x))

    def eta_prime(self, x):
        return -np.exp(-np.asarray(x))

    def eta_second(self, x):
        return np.exp(-np.asarray(x))

    def ground_log(self, x):
        x = np.asarray(x)
        return -self.mu * np.exp(x) + self.g * x

    def dlog_ground(self, x):
        e = np.exp(np.asarray(x))
        return -self.mu * e + self.g, -self.mu * e

    def classical_potential(self, x):
        return 0.5 * (self.mu * np.exp(x) - self.g) ** 2

    def potential(self, x):
        e = np.exp(x)
        g, mu = self.g, self.mu
        return 0.5 * (mu * mu * e * e - mu * (2 * g + 1) * e + g * g)

    def window(self):
        c = math.log(self.g / self.mu)
        return (c - 6.0, c + 2.5)

    def poly_binding(self, n):
        fam = PolynomialFamily("Laguerre", (2 * self.g - 2 * n,), strict=False)
        return fam, (lambda e: 2 * self.mu / e), (lambda e: e**n)


@dataclass(frozen=True)
class RadialOscillator(_Ordinary):
    """x^2 + g(g-1)/x^2 on the half line."""

    name = "RadialOscillator"
    g: float = 1.0

    def validate(self):
        if not self.g > 0:
            raise ConstraintError("g > 0 violated")

    def __post_init__(self):
        self.validate()
        g = self.g
        object.__setattr__(self, "domain", (0.0, math.inf))
        object.__setattr__(self, "R0", (4.0,))
        object.__setattr__(self, "R1", (0.0,))
        object.__setattr__(self, "Rm1", (-4 * (g + 0.5), -4.0))
        object.__setattr__(self, "classical_R0", (4.0,))
        object.__setattr__(self, "classical_Rm1", (-4 * g, -4.0))

    @property
    def beta(self):
        return self.g - 0.5

    def energy_formula(self, n):
        return 2.0 * n

    def abc(self, n):
        return laguerre_abc(self.beta, n)

    def eta(self, x):
        return np.asarray(x) ** 2

    def eta_prime(self, x):
        return 2 * np.asarray(x)

    def eta_second(self, x):
        return 2 * np.ones_like(np.asarray(x, dtype=float))

    def ground_log(self, x):
        x = np.asarray(x)
        return -0.5 * x * x + self.g * np.log(x)

    def dlog_ground(self, x):
        x = np.asarray(x)
        return -x + self.g / x, -1 - self.g / x**2

    def classical_potential(self, x):
        x = np.asarray(x)
        return 0.5 * (x * x + self.g**2 / (x * x)) - self.g

    def potential(self, x):
        x = np.asarray(x)
        g = self.g
        return 0.5 * (x * x + g * (g - 1) / (x * x)) - g - 0.5

    def window(self):
        return (0.0, 5.0)

    def poly_binding(self, n):
        return PolynomialFamily("Laguerre", (self.beta,)), (lambda e: e), (lambda e: 1.0)


# --------------------------------------------------------------------------
# difference-equation ('discrete') quantum mechanics


_STENCIL_OFFSETS = np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
_STENCIL_WEIGHTS = np.array([-1.0, 9.0, -45.0, 45.0, -9.0, 1.0]) / 60.0
_STENCIL_OFFSETS_0 = np.concatenate([[0.0], _STENCIL_OFFSETS])


@dataclass(frozen=True)
class _Discrete(ModelSpec):
    kind = "discrete_unit_shift"
    #: imaginary shift of x produced by e^{p}
    shift = 1.0

    def potential_conj(self, x):
        """V*(x) as an analytic function: conj(V(conj(x)))."""
        return np.conj(self.potential(np.conj(np.asarray(x, dtype=complex))))

    def classical_potential_conj(self, x):
        return np.conj(self.classical_potential(np.conj(np.asarray(x, dtype=complex))))

    def similarity_hamiltonian(self, n: int, x):
        """H~ P_n at real x, which should equal E_n P_n(eta(x))."""
        x = np.asarray(x, dtype=float)
        s = self.shift
        V, Vs = self.potential(x), self.potential_conj(x)
        Pm = self.polynomial(n, self.eta(x - 1j * s))
        Pp = self.polynomial(n, self.eta(x + 1j * s))
        P0 = self.polynomial(n, self.eta(x))
        return 0.5 * (V * Pm + Vs * Pp - (V + Vs) * P0)

    def eta_commutator(self, P, x):
        """[H~, eta] applied to a polynomial callable P(eta) at real x."""
        x = np.asarray(x, dtype=float)
        s = self.shift
        e0 = self.eta(x)
        em, ep = self.eta(x - 1j * s), self.eta(x + 1j * s)
        V, Vs = self.potential(x), self.potential_conj(x)
        return 0.5 * (V * (em - e0) * P(em) + Vs * (ep - e0) * P(ep))

    # classical Hamiltonian sqrt(V_c V_c*) cosh(gamma p) - Re V_c
    gamma = 1.0

    def _modulus(self, x):
        v = self.classical_potential(x)
        vs = self.classical_potential_conj(x)
        return np.sqrt(v * vs)

    def classical_hamiltonian(self, x, p):
        x = np.asarray(x, dtype=float)
        m = np.real(self._modulus(x))
        return m * np.cosh(self.gamma * p) - np.real(self.classical_potential(x))

    def classical_dH_dp(self, x, p):
        m = np.real(self._modulus(np.asarray(x, dtype=float)))
        return self.gamma * m * np.sinh(self.gamma * p)

    def classical_dH_dx(self, x, p):
        # complex-step differentiation is useless here: V_c depends on x
        # through i*x, which moves the step into the real part.  A sixth-order
        # central stencil keeps the relative error near 1e-13.
        x = np.asarray(x, dtype=float)
        h = 1e-3 * np.maximum(1.0, np.abs(x))
        xs = x[..., None] + h[..., None] * _STENCIL_OFFSETS
        m = np.real(self._modulus(xs))
        re = np.real(self.classical_potential(xs))
        dm = (m @ _STENCIL_WEIGHTS) / h
        dre = (re @ _STENCIL_WEIGHTS) / h
        return dm * np.cosh(self.gamma * p) - dre

    def classical_gradient(self, x, p):
        # one vectorized evaluation at x and the six stencil points
        x = np.asarray(x, dtype=float)
        h = 1e-3 * np.maximum(1.0, np.abs(x))
        xs = x[..., None] + h[..., None] * _STENCIL_OFFSETS_0
        # on the real axis sqrt(V_c V_c*) is simply |V_c|
        v = self.classical_potential(xs)
        m = np.abs(v)
        re = np.real(v)
        dm = (m[..., 1:] @ _STENCIL_WEIGHTS) / h
        dre = (re[..., 1:] @ _STENCIL_WEIGHTS) / h
        g = self.gamma
        return dm * np.cosh(g * p) - dre, g * m[..., 0] * np.sinh(g * p)

    # shape invariance hooks
    def shifted(self):
        """The model at parameters lambda + delta."""
        raise NotImplementedError

    def shape_varphi(self, x):
        raise NotImplementedError

    def shape_f(self, n):
        raise NotImplementedError

    def shape_b(self, n):
        raise NotImplementedError


@dataclass(frozen=True)
class MeixnerPollaczek(_Discrete):
    name = "MeixnerPollaczek"
    a: float = 1.0

    def validate(self):
        if not self.a > 0:
            raise ConstraintError("a > 0 violated")

    def __post_init__(self):
        self.validate()
        object.__setattr__(self, "R0", (1.0,))
        object.__setattr__(self, "R1", (0.0,))
        object.__setattr__(self, "Rm1", (0.0,))
        object.__setattr__(self, "classical_R0", (1.0,))
        object.__setattr__(self, "classical_Rm1", (0.0,))

    def energy_formula(self, n):
        return 1.0 * n

    def abc(self, n):
        return meixner_pollaczek_abc(self.a, n)

    def eta(self, x):
        return x

    def potential(self, x):
        return self.a + 1j * np.asarray(x)

    def ground_log(self, x):
        return np.real(log_gamma(self.a + 1j * np.asarray(x, dtype=float)))

    def window(self):
        return (-6.0, 6.0)

    def poly_binding(self, n):
        return PolynomialFamily("MeixnerPollaczek", (self.a, math.pi / 2)), (lambda e: e), (lambda e: 1.0)

    def shifted(self):
        return MeixnerPollaczek(a=self.a + 0.5)

    def shape_varphi(self, x):
        return np.ones_like(np.asarray(x), dtype=complex)

    def shape_f(self, n):
        return 2.0

    def shape_b(self, n):
        return n + 1.0


@dataclass(frozen=True)
class ContinuousHahn(_Discrete):
    name = "ContinuousHahn"
    a: tuple = (0.5, 0.5)

    def validate(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if len(self.a) != 2:
            raise ConstraintError("ContinuousHahn takes two parameters a1, a2")
        if not all(v > 0 for v in self.a):
            raise ConstraintError("a_j > 0 violated")

    def __post_init__(self):
        self.validate()
        s = sum(self.a)
        object.__setattr__(self, "R0", ((s - 0.5) ** 2 - 0.25, 2.0))
        object.__setattr__(self, "R1", (1.0,))
        object.__setattr__(self, "Rm1", (0.0,))
        object.__setattr__(self, "classical_R0", (s * s, 2.0))
        object.__setattr__(self, "classical_Rm1", (0.0,))

    def energy_formula(self, n):
        return n * (n + 2 * sum(self.a) - 1) / 2

    def abc(self, n):
        return continuous_hahn_abc(self.a[0], self.a[1], n)

    def eta(self, x):
        return x

    def potential(self, x):
        x = np.asarray(x)
        return (self.a[0] + 1j * x) * (self.a[1] + 1j * x)

    def ground_log(self, x):
        x = np.asarray(x, dtype=float)
        return sum(np.real(log_gamma(aj + 1j * x)) for aj in self.a)

    def window(self):
        return (-6.0, 6.0)

    def poly_binding(self, n):
        return PolynomialFamily("ContinuousHahnSpecial", self.a), (lambda e: e), (lambda e: 1.0)

    def shifted(self):
        return ContinuousHahn(a=tuple(v + 0.5 for v in self.a))

    def shape_varphi(self, x):
        return np.ones_like(np.asarray(x), dtype=complex)

    def shape_f(self, n):
        return n + 2 * sum(self.a) - 1.0

    def shape_b(self, n):
        return n + 1.0


@dataclass(frozen=True)
class ContinuousDualHahn(_Discrete):
    name = "ContinuousDualHahn"
    a: tuple = (1.0, 1.0, 1.0)

    def validate(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if len(self.a) != 3:
            raise ConstraintError("ContinuousDualHahn takes three parameters a1, a2, a3")
        if not all(v > 0 for v in self.a):
            raise ConstraintError("a_j > 0 violated")

    def __post_init__(self):
        self.validate()
        b1, b2 = sum(self.a), _esym(self.a, 2)
        object.__setattr__(self, "domain", (0.0, math.inf))
        object.__setattr__(self, "R0", (0.25,))
        object.__setattr__(self, "R1", (0.0,))
        object.__setattr__(self, "Rm1", (-b2 / 4, -(b1 - 0.5), -2.0))
        object.__setattr__(self, "classical_R0", (0.25,))
        object.__setattr__(self, "classical_Rm1", (-b2 / 4, -b1, -2.0))

    def energy_formula(self, n):
        return n / 2

    def abc(self, n):
        return continuous_dual_hahn_abc(self.a, n)

    def eta(self, x):
        return np.asarray(x) ** 2

    def potential(self, x):
        x = np.asarray(x)
        num = _product(aj + 1j * x for aj in self.a)
        return num / (2j * x * (2j * x + 1))

    def classical_potential(self, x):
        x = np.asarray(x)
        num = _product(aj + 1j * x for aj in self.a)
        return num / (2j * x) ** 2

    def ground_log(self, x):
        x = np.asarray(x, dtype=float)
        return sum(np.real(log_gamma(aj + 1j * x)) for aj in self.a) - np.real(log_gamma(2j * x))

    def window(self):
        return (0.0, 6.0)

    def poly_binding(self, n):
        return PolynomialFamily("ContinuousDualHahn", self.a), (lambda e: e), (lambda e: 1.0)

    def shifted(self):
        return ContinuousDualHahn(a=tuple(v + 0.5 for v in self.a))

    def shape_varphi(self, x):
        return 2 * np.asarray(x, dtype=complex)

    def shape_f(self, n):
        return -1.0 * n

    def shape_b(self, n):
        return -1.0


@dataclass(frozen=True)
class Wilson(_Discrete):
    name = "Wilson"
    a: tuple = (1.0, 1.0, 1.0, 1.0)

    def validate(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if len(self.a) != 4:
            raise ConstraintError("Wilson takes four parameters a1..a4")
        if not all(v > 0 for v in self.a):
            raise ConstraintError("a_j > 0 violated")

    def __post_init__(self):
        self.validate()
        a = self.a
        b1, b2, b3 = sum(a), _esym(a, 2), _esym(a, 3)
        c1, c2, c3 = b1 * (b1 - 2) / 8, b2 - b1 / 2, (b1 - 2) * b3 / 4
        object.__setattr__(self, "domain", (0.0, math.inf))
        object.__setattr__(self, "R0", (2 * c1, 2.0))
        object.__setattr__(self, "R1", (1.0,))
        object.__setattr__(self, "Rm1", (-c3, -c2, -2.0))
        object.__setattr__(self, "classical_R0", (b1 * b1 / 4, 2.0))
        object.__setattr__(self, "classical_Rm1", (-b1 * b3 / 4, -b2, -2.0))

    def energy_formula(self, n):
        return n * (n + sum(self.a) - 1) / 2

    def abc(self, n):
        return wilson_abc(self.a, n)

    def eta(self, x):
        return np.asarray(x) ** 2

    def potential(self, x):
        x = np.asarray(x)
        num = _product(aj + 1j * x for aj in self.a)
        return num / (2j * x * (2j * x + 1))

    def classical_potential(self, x):
        x = np.asarray(x)
        num = _product(aj + 1j * x for aj in self.a)
        return num / (2j * x) ** 2

    def ground_log(self, x):
        x = np.asarray(x, dtype=float)
        return sum(np.real(log_gamma(aj + 1j * x)) for aj in self.a) - np.real(log_gamma(2j * x))

    def window(self):
        return (0.0, 6.0)

    def poly_binding(self, n):
        return PolynomialFamily("Wilson", self.a), (lambda e: e), (lambda e: 1.0)

    def shifted(self):
        return Wilson(a=tuple(v + 0.5 for v in self.a))

    def shape_varphi(self, x):
        return 2 * np.asarray(x, dtype=complex)

    def shape_f(self, n):
        return -n * (n + sum(self.a) - 1.0)

    def shape_b(self, n):
        return -1.0


@dataclass(frozen=True)
class AskeyWilson(_Discrete):
    name = "AskeyWilson"
    kind = "discrete_q_shift"
    a: tuple = (0.5, 0.5, 0.5, 0.5)
    q: float = 0.5

    def validate(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if len(self.a) != 4:
            raise ConstraintError("AskeyWilson takes four parameters a1..a4")
        if not 0 < self.q < 1:
            raise ConstraintError("0 < q < 1 violated")
        if not all(-1 < v < 1 for v in self.a):
            raise ConstraintError("-1 < a_j < 1 violated")
        if not math.prod(self.a) < self.q:
            raise ConstraintError("a1 a2 a3 a4 < q violated")

    def __post_init__(self):
        self.validate()
        a, q = self.a, self.q
        b1, b3, b4 = sum(a), _esym(a, 3), math.prod(a)
        k = q * (1 / q - 1) ** 2
        s = (1 + b4 / q) / 2  # H' = H + s
        object.__setattr__(self, "domain", (0.0, math.pi))
        object.__setattr__(self, "shift", math.log(q))
        object.__setattr__(self, "gamma", math.log(q))
        object.__setattr__(self, "R0", (k * (s * s - (1 + 1 / q) ** 2 * b4 / 4), k * 2 * s, k))
        object.__setattr__(self, "R1", (k * s, k))
        object.__setattr__(self, "Rm1", (-k * (1 - b4 / q**2) * (b1 - b3) / 8, -k * (b1 + b3 / q) / 4))
        g2 = math.log(q) ** 2
        c1, c2, c3, c4 = 1 + b4, (1 - b4) ** 2 / 4, (b1 + b3) / 4, (1 - b4) * (b1 - b3) / 8
        object.__setattr__(self, "classical_R0", (g2 * c2, g2 * c1, g2))
        object.__setattr__(self, "classical_Rm1", (-g2 * c4, -g2 * c3))

    @property
    def b4(self):
        return math.prod(self.a)

    def energy_formula(self, n):
        q = self.q
        return (q ** (-n) - 1) * (1 - self.b4 * q ** (n - 1)) / 2

    def abc(self, n):
        a = tuple(sorted(self.a, key=abs, reverse=True))
        if a[0] == 0:
            # all a_j vanish: Chebyshev-like, B = 0
            A = 0.5
            return A, 0.0, ((1 - self.q**n) / 2 if n else 0.0)
        return askey_wilson_abc(a, self.q, n)

    def eta(self, x):
        return np.cos(x)

    def _z(self, x):
        return np.exp(1j * np.asarray(x))

    def potential(self, x):
        z = self._z(x)
        num = _product(1 - aj * z for aj in self.a)
        return num / ((1 - z * z) * (1 - self.q * z * z))

    def classical_potential(self, x):
        z = self._z(x)
        num = _product(1 - aj * z for aj in self.a)
        return num / (1 - z * z) ** 2

    def ground_log(self, x):
        z = self._z(np.asarray(x, dtype=float))
        out = np.zeros(np.shape(z))
        qk = 1.0
        while qk > 1e-18:
            out += np.log(np.abs(1 - z * z * qk))
            for aj in self.a:
                out -= np.log(np.abs(1 - aj * z * qk))
            qk *= self.q
        return out

    def poly_binding(self, n):
        fam = PolynomialFamily("AskeyWilson", self.a + (self.q,))
        return fam, (lambda e: e), (lambda e: 1.0)

    def shifted(self):
        r = math.sqrt(self.q)
        return AskeyWilson(a=tuple(v * r for v in self.a), q=self.q)

    def shape_varphi(self, x):
        return -2 * np.sin(np.asarray(x, dtype=complex))

    def shape_f(self, n):
        q = self.q
        return -(q ** (n / 2)) * (q ** (-n) - 1) * (1 - self.b4 * q ** (n - 1))

    def shape_b(self, n):
        return -(self.q ** (-(n + 1) / 2))


# --------------------------------------------------------------------------
# registry


_CLASSES = {
    cls.name: cls
    for cls in (
        Harmonic,
        SymPoschlTeller,
        PoschlTeller,
        Soliton,
        Morse,
        RadialOscillator,
        MeixnerPollaczek,
        ContinuousHahn,
        ContinuousDualHahn,
        Wilson,
        AskeyWilson,
    )
}
MODEL_NAMES = tuple(_CLASSES)

DEFAULT_PARAMS = {
    "Harmonic": {},
    "SymPoschlTeller": {"g": 1.0},
    "PoschlTeller": {"g": 1.0, "h": 2.0},
    "Soliton": {"g": 2.5},
    "Morse": {"g": 2.5, "mu": 1.0},
    "RadialOscillator": {"g": 1.0},
    "MeixnerPollaczek": {"a": 1.0},
    "ContinuousHahn": {"a": (0.5, 0.5)},
    "ContinuousDualHahn": {"a": (1.0, 1.0, 1.0)},
    "Wilson": {"a": (1.0, 1.0, 1.0, 1.0)},
    "AskeyWilson": {"a": (0.5, 0.5, 0.5, 0.5), "q": 0.5},
}

_ALIASES = {
    "sympt": "SymPoschlTeller",
    "sutherland": "SymPoschlTeller",
    "pt": "PoschlTeller",
    "radial": "RadialOscillator",
    "mp": "MeixnerPollaczek",
    "chahn": "ContinuousHahn",
    "cdhahn": "ContinuousDualHahn",
    "aw": "AskeyWilson",
}


def canonical_name(name: str) -> str:
    key = name.replace("-", "").replace("_", "").replace(" ", "").lower()
    for canon in _CLASSES:
        if canon.lower() == key:
            return canon
    if key in _ALIASES:
        return _ALIASES[key]
    raise KeyError(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")


def get_model(name: str, params: dict | None = None, **kwargs) -> ModelSpec:
    """Build a validated model; parameters not given fall back to defaults."""
    canon = canonical_name(name)
    merged = dict(DEFAULT_PARAMS[canon])
    merged.update(params or {})
    merged.update(kwargs)
    cls = _CLASSES[canon]
    allowed = {k for k, f in cls.__dataclass_fields__.items() if f.init}
    unknown = set(merged) - allowed
    if unknown:
        raise ConstraintError(f"{canon} does not take parameter(s) {sorted(unknown)}")
    return cls(**merged)


# functional forms of the per-model operations


def energy(spec: ModelSpec, n: int) -> float:
    return spec.energy(n)


def eigenfunction(spec: ModelSpec, n: int, x):
    return spec.eigenfunction(n, x)


def ladder_coefficients(spec: ModelSpec, n: int):
    return spec.ladder_coefficients(n)


def heisenberg_frequencies(spec: ModelSpec, E: float):
    return spec.heisenberg_frequencies(E)
