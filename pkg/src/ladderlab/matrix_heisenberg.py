"""Operator algebra on truncated eigenbasis matrices.

In the (normalized) eigenbasis H is diagonal, so every function of H is
applied spectrally and the only non-trivial matrix is the tridiagonal
representation of the sinusoidal coordinate eta.  Truncation effects are
kept out of the checks by restricting residuals to an interior block.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .models import ModelSpec
from .operator_engine import norm_squared

__all__ = [
    "InconsistencyError",
    "PositivityError",
    "TridiagonalOperator",
    "SpectrumTable",
    "build_eta_matrix",
    "check_closure",
    "heisenberg_pauli_spectrum",
    "heisenberg_evolution_check",
    "build_normalized_ladders",
    "normalized_ladder_residual",
    "number_operator_values",
    "number_operator_check",
    "spectrum_csv",
]


class InconsistencyError(ArithmeticError):
    """The two spectrum conditions disagree during the iteration."""


class PositivityError(ValueError):
    """A_{n-1} C_n is not positive, so f(H) would be imaginary."""


@dataclass
class TridiagonalOperator:
    dim: int
    sub: np.ndarray  # sub[k]  = <k+1| eta |k>  (A^_k)
    diag: np.ndarray  # diag[k] = <k| eta |k>    (B_k)
    sup: np.ndarray  # sup[k]  = <k| eta |k+1>  (C^_{k+1})

    def __post_init__(self):
        self.sub = np.asarray(self.sub, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.sup = np.asarray(self.sup, dtype=float)
        if self.dim < 3:
            raise ValueError("dim must be at least 3")
        if not (self.diag.size == self.dim and self.sub.size == self.sup.size == self.dim - 1):
            raise ValueError("inconsistent band lengths")

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def lower(self) -> np.ndarray:
        """Raising part: the matrix of a^(+)."""
        return np.diag(self.sub, -1)

    def upper(self) -> np.ndarray:
        """Lowering part: the matrix of a^(-)."""
        return np.diag(self.sup, 1)

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.sub - self.sup) / np.maximum(np.abs(self.sub), 1e-300)))


@dataclass
class SpectrumTable:
    energies: np.ndarray
    source: str  # "closed_form" or "heisenberg_pauli_iteration"

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if self.source not in ("closed_form", "heisenberg_pauli_iteration"):
            raise ValueError(f"unknown source {self.source!r}")
        if self.energies.size and self.energies[0] != 0:
            raise ValueError("energies[0] must be 0")
        if np.any(np.diff(self.energies) <= 0):
            raise ValueError("energies must be strictly increasing")


def _energies(spec: ModelSpec, dim: int) -> np.ndarray:
    return np.array([spec.energy(n) for n in range(dim)])


def _check_dim(spec: ModelSpec, dim: int):
    if dim > spec.level_count:
        raise ValueError(f"dim={dim} exceeds the {spec.level_count} levels of {spec.name}")


def build_eta_matrix(spec: ModelSpec, dim: int, norms: str = "recurrence") -> TridiagonalOperator:
    """eta in the normalized eigenbasis.

    With ``norms="recurrence"`` the off-diagonal entries are sign(A_n) sqrt(A_n C_{n+1}),
    which is what hermiticity implies; ``norms="quadrature"`` uses numerically
    integrated norms, A^_n = A_n N_{n+1}/N_n and C^_{n+1} = C_{n+1} N_n/N_{n+1}.
    The diagonal is the recurrence coefficient B_n; the closure check then
    confirms B_n = -R_{-1}(E_n)/R_0(E_n).
    """
    _check_dim(spec, dim)
    diag = np.array([spec.ladder_B(n) for n in range(dim)])
    A = np.array([spec.ladder_A(n) for n in range(dim - 1)])
    C = np.array([spec.ladder_C(n + 1) for n in range(dim - 1)])
    if norms == "recurrence":
        prod = A * C
        if np.any(prod <= 0):
            raise PositivityError(f"A_n C_(n+1) not positive for {spec.name}")
        sub = np.sign(A) * np.sqrt(prod)
        sup = sub.copy()
    elif norms == "quadrature":
        N = np.sqrt([norm_squared(spec, n) for n in range(dim)])
        sub = A * N[1:] / N[:-1]
        sup = C * N[:-1] / N[1:]
    else:
        raise ValueError("norms must be 'recurrence' or 'quadrature'")
    return TridiagonalOperator(dim, sub, diag, sup)


def _scaled_residual(res: np.ndarray, scale: np.ndarray, k: int) -> float:
    r = np.abs(res[:k, :k]) / np.maximum(scale[:k, :k], 1.0)
    return float(np.max(r)) if r.size else 0.0


def check_closure(spec: ModelSpec, dim: int) -> float:
    """Residual of [H,[H,eta]] - eta R0(H) - [H,eta] R1(H) - R_{-1}(H).

    Restricted to rows/columns 0..dim-3.  Each entry is divided by the largest
    magnitude among the terms contributing to it (floored at 1), which turns
    the check into a relative one for rapidly growing spectra.
    """
    if dim < 5:
        raise ValueError("dim must be at least 5")
    T = build_eta_matrix(spec, dim).dense()
    E = _energies(spec, dim)
    dE = E[:, None] - E[None, :]
    R0 = np.array([spec.r0(e) for e in E])[None, :]
    R1 = np.array([spec.r1(e) for e in E])[None, :]
    Rm = np.diag([spec.rm1(e) for e in E])
    lhs = dE**2 * T
    t0, t1 = T * R0, dE * T * R1
    res = lhs - t0 - t1 - Rm
    scale = np.maximum.reduce([np.abs(lhs), np.abs(t0), np.abs(t1), np.abs(Rm)])
    return _scaled_residual(res, scale, dim - 2)


def heisenberg_pauli_spectrum(spec: ModelSpec, n_max: int) -> SpectrumTable:
    """E_0 = 0, E_{k+1} = E_k + alpha_+(E_k), checked against alpha_- at every step.

    The iteration stops at the top level of a finite spectrum.
    """
    top = min(n_max, spec.level_count - 1)
    E = [0.0]
    for _ in range(top):
        ap, _ = spec.heisenberg_frequencies(E[-1])
        nxt = E[-1] + ap
        _, am = spec.heisenberg_frequencies(nxt)
        if abs(E[-1] - nxt - am) > 1e-9 * max(1.0, abs(nxt)):
            raise InconsistencyError(f"alpha_- condition fails at E={nxt} for {spec.name}")
        E.append(nxt)
    return SpectrumTable(np.array(E), "heisenberg_pauli_iteration")


def closed_form_spectrum(spec: ModelSpec, n_max: int) -> SpectrumTable:
    top = min(n_max, spec.level_count - 1)
    return SpectrumTable(_energies(spec, top + 1), "closed_form")


def heisenberg_evolution_check(spec: ModelSpec, dim: int, t: float) -> float:
    """Compare e^{itH} eta e^{-itH} with
    a+ e^{i alpha_+(H) t} + a- e^{i alpha_-(H) t} - R_{-1}(H)/R_0(H)
    on the interior rows/columns 0..dim-3."""
    if dim < 5:
        raise ValueError("dim must be at least 5")
    op = build_eta_matrix(spec, dim)
    T = op.dense()
    E = _energies(spec, dim)
    lhs = np.exp(1j * t * (E[:, None] - E[None, :])) * T
    alphas = np.array([spec.heisenberg_frequencies(e) for e in E])
    ep = np.exp(1j * t * alphas[:, 0])[None, :]
    em = np.exp(1j * t * alphas[:, 1])[None, :]
    rhs = op.lower() * ep + op.upper() * em + np.diag([_constant_part(spec, n, e) for n, e in enumerate(E)])
    return _scaled_residual(lhs - rhs, np.abs(T), dim - 2)


def _constant_part(spec: ModelSpec, n: int, e: float) -> float:
    """-R_{-1}(E_n)/R_0(E_n); where R_0 vanishes (so does R_{-1}) the limit is B_n."""
    r0 = spec.r0(e)
    if abs(r0) <= 1e-14 * max(1.0, abs(e)):
        return spec.ladder_B(n)
    return -spec.rm1(e) / r0


def build_normalized_ladders(spec: ModelSpec, dim: int):
    """(a''-, a''+) with a''- = a- f(H), a''+ = f(H) a+ and f(E_n)^2 = E_n/(A_{n-1} C_n)."""
    _check_dim(spec, dim)
    E = _energies(spec, dim)
    f = np.zeros(dim)
    for n in range(1, dim):
        p = spec.ladder_A(n - 1) * spec.ladder_C(n)
        if not p > 0:
            raise PositivityError(f"A_{n - 1} C_{n} = {p} is not positive for {spec.name}")
        f[n] = math.sqrt(E[n] / p)
    op = build_eta_matrix(spec, dim)
    F = np.diag(f)
    return op.upper() @ F, F @ op.lower()


def normalized_ladder_residual(spec: ModelSpec, dim: int) -> float:
    """max |H - a''+ a''-| over the interior block, relative to max(1, E)."""
    am, ap = build_normalized_ladders(spec, dim)
    E = _energies(spec, dim)
    res = np.diag(E) - ap @ am
    k = dim - 1
    return float(np.max(np.abs(res[:k, :k])) / max(1.0, np.max(np.abs(E[:k]))))


def number_operator_values(spec: ModelSpec, E):
    """Spectral number operator evaluated at energies E.

    Returns n for linear and quadratic spectra and q^n for Askey-Wilson.
    """
    E = np.asarray(E, dtype=float)
    if spec.name == "AskeyWilson":
        a, b = 0.5, spec.b4 / spec.q
        X = E / a + b + 1
        # rationalized root of b y^2 - X y + 1 = 0, stable for small b
        return 2.0 / (X + np.sqrt(X * X - 4 * b))
    e1, e2 = spec.energy_formula(1), spec.energy_formula(2)
    a = (e2 - 2 * e1) / 2
    b = e1 - a
    if abs(a) <= 1e-14 * abs(b):
        return E / b
    return (np.sqrt(4 * a * E + b * b) - b) / (2 * a)


def number_operator_check(spec: ModelSpec, n_max: int = 12) -> float:
    top = min(n_max, spec.level_count - 1)
    n = np.arange(top + 1)
    vals = number_operator_values(spec, _energies(spec, top + 1))
    target = spec.q ** n if spec.name == "AskeyWilson" else n
    return float(np.max(np.abs(vals - target) / np.maximum(np.abs(target), 1.0)))


def spectrum_csv(spec: ModelSpec, n_max: int) -> str:
    it = heisenberg_pauli_spectrum(spec, n_max).energies
    cf = closed_form_spectrum(spec, n_max).energies
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "E_closed", "E_iterated", "abs_diff"])
    for n, (c, i) in enumerate(zip(cf, it)):
        w.writerow([n, f"{c:.17g}", f"{i:.17g}", f"{abs(c - i):.17g}"])
    return buf.getvalue()
