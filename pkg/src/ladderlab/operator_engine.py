"""Pointwise application of Hamiltonians and ladder operators.

Ordinary models are handled with analytic derivatives: with
phi_n = exp(W) P_n(eta(x)),

    phi'  = e^W (W' P + eta' P_eta)
    phi'' = e^W ((W'' + W'^2) P + (2 W' eta' + eta'') P_eta + eta'^2 P_etaeta)

where the eta-derivatives of P come from differentiating the three-term
recurrence.  Difference-equation models are handled at the polynomial level
through the similarity-transformed Hamiltonian
H~ = phi_0^{-1} H phi_0, which only needs P_n at complex shifted points.

The ladder operators are applied in their generic form

    a'^(+-) phi_n = +-( [H, eta] + (E_n - E_{n-+1}) eta
                        + R_{-1}(E_n) / (E_{n+-1} - E_n) ) phi_n

and a^(+-) = a'^(+-) / (E_{n+1} - E_{n-1}).
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec
from .quadrature import QuadratureError, tanh_sinh

__all__ = [
    "GridEvaluation",
    "LadderActionReport",
    "VerificationRow",
    "interior_grid",
    "eigen_data",
    "apply_hamiltonian_ordinary",
    "apply_similarity_hamiltonian_discrete",
    "eigen_residual",
    "apply_ladder",
    "three_term_residual",
    "orthogonality",
    "norm_squared",
    "truncated_norm_squared",
    "hermiticity_check",
    "su11_commutator_check",
    "anticommutator_check",
    "rows_to_csv",
    "params_hash",
]

GRID_MARGIN = 0.02
LADDER_KINDS = ("minus", "plus", "minus_prime", "plus_prime")


@dataclass
class GridEvaluation:
    points: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if np.any(np.diff(self.points) <= 0):
            raise ValueError("grid points must be strictly increasing")


@dataclass
class LadderActionReport:
    n: int
    expected_coefficient: float
    fitted_coefficient: complex
    max_rel_residual: float

    @property
    def coefficient_error(self) -> float:
        e = self.expected_coefficient
        return abs(self.fitted_coefficient - e) / max(abs(e), 1e-300) if e != 0 else abs(self.fitted_coefficient)


@dataclass
class VerificationRow:
    model: str
    params_hash: str
    n: int
    check_name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def params_hash(spec: ModelSpec) -> str:
    text = repr(sorted(spec.params.items()))
    return hashlib.sha1(text.encode()).hexdigest()[:12]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "params_hash", "n", "check_name", "residual", "tolerance", "pass"])
    for r in rows:
        w.writerow([r.model, r.params_hash, r.n, r.check_name, f"{r.residual:.17g}", f"{r.tolerance:.17g}", r.passed])
    return buf.getvalue()


# --------------------------------------------------------------------------
# grids


def interior_grid(spec: ModelSpec, npts: int = 50, margin: float = GRID_MARGIN) -> np.ndarray:
    """Evenly spaced points in the model's working window, keeping ``margin``
    (as a fraction of the window length) away from finite domain endpoints."""
    a, b = spec.window()
    lo, hi = spec.domain
    span = b - a
    if a == lo:
        a = a + margin * span
    if b == hi:
        b = b - margin * span
    return np.linspace(a, b, npts)


# --------------------------------------------------------------------------
# eigenfunctions with derivatives (ordinary models)


def eigen_data(spec: ModelSpec, n: int, x):
    """(phi_n, phi_n', phi_n'') at real points, analytically."""
    x = np.asarray(x, dtype=float)
    eta, e1, e2 = spec.eta(x), spec.eta_prime(x), spec.eta_second(x)
    P, P1, P2 = spec.polynomial(n, eta, order=2)
    w1, w2 = spec.dlog_ground(x)
    g = np.exp(spec.ground_log(x))
    phi = g * P
    d1 = g * (w1 * P + e1 * P1)
    d2 = g * ((w2 + w1 * w1) * P + (2 * w1 * e1 + e2) * P1 + e1 * e1 * P2)
    return phi, d1, d2


def _require(spec, kind_ok, what):
    if not kind_ok:
        raise TypeError(f"{what} does not apply to {spec.kind} model {spec.name}")


def apply_hamiltonian_ordinary(spec: ModelSpec, n: int, grid) -> GridEvaluation:
    """-1/2 phi_n'' + V phi_n at the grid points."""
    _require(spec, spec.kind == "ordinary", "apply_hamiltonian_ordinary")
    spec.check_level(n)
    grid = np.asarray(grid, dtype=float)
    phi, _, d2 = eigen_data(spec, n, grid)
    values = -0.5 * d2 + spec.potential(grid) * phi
    return GridEvaluation(grid, values, {"model": spec.name, "n": n, "operator": "H"})


def apply_similarity_hamiltonian_discrete(spec: ModelSpec, n: int, grid) -> GridEvaluation:
    """H~ P_n = 1/2 [V P_n(eta(x - i s)) + V* P_n(eta(x + i s)) - (V + V*) P_n]."""
    _require(spec, spec.kind != "ordinary", "apply_similarity_hamiltonian_discrete")
    spec.check_level(n)
    grid = np.asarray(grid, dtype=float)
    values = spec.similarity_hamiltonian(n, grid)
    return GridEvaluation(grid, values, {"model": spec.name, "n": n, "operator": "H~"})


def eigen_residual(spec: ModelSpec, n: int, grid) -> float:
    """max |H phi_n - E_n phi_n| relative to the size of the terms of H phi_n."""
    grid = np.asarray(grid, dtype=float)
    E = spec.energy(n)
    if spec.kind == "ordinary":
        phi, _, d2 = eigen_data(spec, n, grid)
        Vphi = spec.potential(grid) * phi
        res = -0.5 * d2 + Vphi - E * phi
        scale = np.max(np.abs(0.5 * d2) + np.abs(Vphi))
    else:
        HP = spec.similarity_hamiltonian(n, grid)
        P = spec.polynomial(n, spec.eta(grid))
        res = HP - E * P
        s = spec.shift
        V, Vs = spec.potential(grid), spec.potential_conj(grid)
        Pm = spec.polynomial(n, spec.eta(grid - 1j * s))
        Pp = spec.polynomial(n, spec.eta(grid + 1j * s))
        scale = np.max(0.5 * (np.abs(V * Pm) + np.abs(Vs * Pp) + np.abs((V + Vs) * P)))
    return float(np.max(np.abs(res)) / max(scale, 1e-300))


# --------------------------------------------------------------------------
# ladder operators


def _commutator_eta(spec: ModelSpec, n: int, grid):
    """[H, eta] phi_n (ordinary) or [H~, eta] P_n (discrete), plus the state."""
    if spec.kind == "ordinary":
        phi, d1, _ = eigen_data(spec, n, grid)
        comm = -spec.eta_prime(grid) * d1 - 0.5 * spec.eta_second(grid) * phi
        return comm, phi
    P = lambda e: spec.polynomial(n, e)  # noqa: E731
    return spec.eta_commutator(P, grid), P(spec.eta(grid))


def _state(spec: ModelSpec, n: int, grid):
    if spec.kind == "ordinary":
        return np.exp(spec.ground_log(grid)) * spec.polynomial(n, spec.eta(grid))
    return spec.polynomial(n, spec.eta(grid))


def ladder_action_values(spec: ModelSpec, which: str, n: int, grid):
    """Values of a^(+-) phi_n (or a'^(+-)); polynomial level for discrete models."""
    if which not in LADDER_KINDS:
        raise ValueError(f"which must be one of {LADDER_KINDS}")
    grid = np.asarray(grid, dtype=float)
    sign = 1 if which.startswith("plus") else -1
    Ef = spec.energy_formula
    En, Eup, Edn = Ef(n), Ef(n + 1), Ef(n - 1)
    comm, state = _commutator_eta(spec, n, grid)
    eta = spec.eta(grid)
    E_other = Edn if sign > 0 else Eup  # E_{n -+ 1}
    E_target = Eup if sign > 0 else Edn  # E_{n +- 1}
    rm1 = spec.rm1(En)
    extra = rm1 / (E_target - En) if rm1 != 0 else 0.0
    values = sign * (comm + (En - E_other) * eta * state + extra * state)
    if not which.endswith("prime"):
        values = values / (Eup - Edn)
    return values


def apply_ladder(spec: ModelSpec, which: str, n: int, grid) -> LadderActionReport:
    """Apply a ladder operator to phi_n and fit the result against phi_{n+-1}."""
    spec.check_level(n)
    grid = np.asarray(grid, dtype=float)
    values = ladder_action_values(spec, which, n, grid)
    factor = spec.ladder_norm_factor(n) if which.endswith("prime") else 1.0
    plus = which.startswith("plus")
    expected = (spec.ladder_A(n) if plus else spec.ladder_C(n)) * factor
    m = n + 1 if plus else n - 1
    if m < 0:
        # a^(-) phi_0 = 0: absolute residual
        return LadderActionReport(n, 0.0, 0.0, float(np.max(np.abs(values))))
    spec.check_level(m)
    target = _state(spec, m, grid)
    c = np.vdot(target, values) / np.vdot(target, target)
    resid = np.max(np.abs(values - c * target)) / max(np.max(np.abs(values)), 1e-300)
    return LadderActionReport(n, float(expected), complex(c), float(resid))


def three_term_residual(spec: ModelSpec, n: int, grid) -> float:
    """Recurrence residual with every P evaluated from its hypergeometric sum."""
    if not 1 <= n < spec.level_count - 1:
        raise ValueError("three_term_residual needs 1 <= n < level_count - 1")
    grid = np.asarray(grid, dtype=float)
    eta = spec.eta(grid)
    if spec.kind == "ordinary":
        pre = np.exp(spec.ground_log(grid))
    else:
        pre = np.ones_like(grid)

    def phi(k):
        return pre * np.array([spec.polynomial_hypergeometric(k, complex(e)) for e in eta])

    A, B, C = spec.ladder_coefficients(n)
    lhs = eta * phi(n)
    res = lhs - A * phi(n + 1) - B * phi(n) - C * phi(n - 1)
    return float(np.max(np.abs(res)) / np.max(np.abs(lhs)))


# --------------------------------------------------------------------------
# norms and orthogonality


_NORM_CACHE: dict = {}
_NORM_LOCK = threading.Lock()


def _integrand(spec: ModelSpec, m: int, n: int):
    def f(x):
        with np.errstate(all="ignore"):
            g = np.exp(spec.ground_log(x))
            P = spec.polynomial(max(m, n), spec.eta(x)) if m == n else None
            if P is not None:
                return g * g * np.abs(P) ** 2
            return g * g * np.conj(spec.polynomial(m, spec.eta(x))) * spec.polynomial(n, spec.eta(x))

    return f


def orthogonality(spec: ModelSpec, m: int, n: int, rtol: float = 1e-10) -> complex:
    """Integral of conj(phi_m) phi_n over the domain (tanh-sinh)."""
    spec.check_level(m)
    spec.check_level(n)
    lo, hi = spec.domain
    res = tanh_sinh(_integrand(spec, m, n), lo, hi, rtol=rtol)
    return res.value if m != n else res.value.real


def norm_squared(spec: ModelSpec, n: int) -> float:
    """N_n^2 = <phi_n, phi_n>, cached per (model, parameters, n)."""
    key = (spec.key(), n)
    val = _NORM_CACHE.get(key)
    if val is None:
        val = float(np.real(orthogonality(spec, n, n)))
        with _NORM_LOCK:
            _NORM_CACHE.setdefault(key, val)
    return val


def truncated_norm_squared(spec: ModelSpec, n: int, lo: float, hi: float) -> float:
    """Integral of |phi_n|^2 over (lo, hi), with no level-range check.

    Used to show that formally constructed levels beyond the top one of a
    finite model are not normalizable.
    """
    f = _integrand(spec, n, n)
    return float(tanh_sinh(f, lo, hi, rtol=1e-10).value.real)


def hermiticity_check(spec: ModelSpec, n_max: int = 10) -> float:
    """max_n |A^_n - C^_{n+1}| / |A^_n| with A^_n = A_n N_{n+1}/N_n and
    C^_{n+1} = C_{n+1} N_n / N_{n+1}."""
    top = int(min(n_max, spec.level_count - 2))
    worst = 0.0
    for n in range(top + 1):
        Nn, Nn1 = math.sqrt(norm_squared(spec, n)), math.sqrt(norm_squared(spec, n + 1))
        Ahat = spec.ladder_A(n) * Nn1 / Nn
        Chat = spec.ladder_C(n + 1) * Nn / Nn1
        worst = max(worst, abs(Ahat - Chat) / abs(Ahat))
    return worst


# --------------------------------------------------------------------------
# algebraic identities as matrices on the eigenbasis


def _ladder_matrices(spec: ModelSpec, N: int, prime: bool):
    am = np.zeros((N, N))
    ap = np.zeros((N, N))
    for n in range(N):
        f = spec.ladder_norm_factor(n) if prime else 1.0
        if n + 1 < N:
            ap[n + 1, n] = spec.ladder_A(n) * f
        if n >= 1:
            am[n - 1, n] = spec.ladder_C(n) * f
    return am, ap


def su11_commutator_check(spec: ModelSpec, N_levels: int) -> float:
    """Residual of [H, a^(+-)] = +-c a^(+-) and [a^(-), a^(+)] = 2 (H + const).

    Meixner-Pollaczek uses a' with c = 1 and [a'-, a'+] = 2(H + a); the radial
    oscillator uses a with c = 2 and [a-, a+] = H + g + 1/2.
    """
    N = N_levels
    if spec.name == "MeixnerPollaczek":
        prime, c = True, 1.0
        target_shift, target_scale = spec.a, 2.0
    elif spec.name == "RadialOscillator":
        prime, c = False, 2.0
        target_shift, target_scale = spec.g + 0.5, 1.0
    else:
        raise TypeError(f"su(1,1) relations are checked only for MeixnerPollaczek and RadialOscillator, not {spec.name}")
    if N < 3:
        return 0.0  # no interior rows
    H = np.diag([spec.energy(n) for n in range(N)])
    am, ap = _ladder_matrices(spec, N, prime)
    k = N - 1  # the last row/column feels the truncation
    r1 = (H @ ap - ap @ H - c * ap)[:k, :k]
    r2 = (H @ am - am @ H + c * am)[:k, :k]
    r3 = (am @ ap - ap @ am - target_scale * (H + target_shift * np.eye(N)))[:k, :k]
    return float(max(np.max(np.abs(r)) for r in (r1, r2, r3)))


def anticommutator_check(spec: ModelSpec, N_levels: int) -> float:
    """a'- a'+ + a'+ a'- = 4H + 2g on eigenvectors (1/sin^2 x and soliton)."""
    if spec.name not in ("SymPoschlTeller", "Soliton"):
        raise TypeError("anticommutator identity is stated for SymPoschlTeller and Soliton")
    N = int(min(N_levels, spec.level_count))
    if N < 2:
        return 0.0
    H = np.diag([spec.energy(n) for n in range(N)])
    am, ap = _ladder_matrices(spec, N, prime=True)
    k = N - 1
    if spec.name == "Soliton":
        # the top level has no partner above it: a'+ phi_top leaves the space
        k = N - 1
    r = (am @ ap + ap @ am - 4 * H - 2 * spec.g * np.eye(N))[:k, :k]
    return float(np.max(np.abs(r)) / max(1.0, np.max(np.abs(4 * H[:k, :k]))))
