"""Classical Hamiltonian flow of every model and its closed-form sinusoid.

For each model the sinusoidal coordinate obeys
{H, {H, eta}} = -eta R0(H) - R_{-1}(H) with the classical R's, so along a
trajectory of energy H0

    eta(t) = -{H,eta}_0 sin(w t)/w + (eta_0 + R_{-1}/R0) cos(w t) - R_{-1}/R0,

with w = sqrt(R0(H0)) and {H, eta} = -(dH/dp) eta'(x).
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .models import ModelSpec, _poly

__all__ = [
    "DomainExitError",
    "ClosedFormError",
    "UnboundMotionWarning",
    "Trajectory",
    "DEFAULT_INITIAL_DATA",
    "integrate",
    "closed_form_eta",
    "compare",
    "period",
    "measured_period",
    "bound_invariant",
    "trajectory_csv",
]


class DomainExitError(ArithmeticError):
    pass


class ClosedFormError(ValueError):
    pass


class UnboundMotionWarning(UserWarning):
    pass


#: initial data (x0, p0) used by the acceptance suite and the CLI defaults
DEFAULT_INITIAL_DATA = {
    "Harmonic": (1.0, 0.0),
    "SymPoschlTeller": (math.pi / 3, 0.4),
    "PoschlTeller": (0.6, 0.3),
    "Soliton": (0.3, 0.1),
    "Morse": (0.0, -0.1),
    "RadialOscillator": (1.2, 0.3),
    "MeixnerPollaczek": (0.5, 0.2),
    "ContinuousHahn": (0.5, 0.2),
    "ContinuousDualHahn": (0.8, 0.1),
    "Wilson": (0.8, 0.1),
    "AskeyWilson": (1.0, 0.3),
}


@dataclass
class Trajectory:
    times: np.ndarray
    x_values: np.ndarray
    p_values: np.ndarray
    energy: float
    energy_drift: float

    @property
    def n_samples(self) -> int:
        return int(self.times.size)


def _energy(spec: ModelSpec, x, p) -> float:
    return float(spec.classical_hamiltonian(x, p))


def _frequency_data(spec: ModelSpec, H0: float):
    r0 = _poly(spec.classical_R0, H0)
    rm1 = _poly(spec.classical_Rm1, H0)
    return r0, rm1


def _warn_if_unbound(spec: ModelSpec, H0: float):
    if math.isfinite(spec.level_count) and not spec.classical_bound(H0):
        warnings.warn(
            f"{spec.name}: H0={H0:.6g} is not below the dissociation threshold; motion is unbound",
            UnboundMotionWarning,
            stacklevel=3,
        )


def integrate(spec: ModelSpec, x0: float, p0: float, t_end: float, steps: int) -> Trajectory:
    """Fixed-step classical RK4 for dx/dt = dH/dp, dp/dt = -dH/dx."""
    lo, hi = spec.domain
    if not lo < x0 < hi:
        raise DomainExitError(f"x0={x0} outside the domain {spec.domain}")
    H0 = _energy(spec, x0, p0)
    _warn_if_unbound(spec, H0)
    h = t_end / steps
    grad = spec.classical_gradient

    def rhs(x, p):
        hx, hp = grad(x, p)
        return float(hp), -float(hx)

    xs = np.empty(steps + 1)
    ps = np.empty(steps + 1)
    x, p = float(x0), float(p0)
    xs[0], ps[0] = x, p
    for k in range(steps):
        k1x, k1p = rhs(x, p)
        k2x, k2p = rhs(x + 0.5 * h * k1x, p + 0.5 * h * k1p)
        k3x, k3p = rhs(x + 0.5 * h * k2x, p + 0.5 * h * k2p)
        k4x, k4p = rhs(x + h * k3x, p + h * k3p)
        x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if not lo < x < hi:
            raise DomainExitError(f"{spec.name}: trajectory left the domain at t={(k + 1) * h:.6g} (x={x})")
        xs[k + 1], ps[k + 1] = x, p
    times = np.linspace(0.0, t_end, steps + 1)
    energies = spec.classical_hamiltonian(xs, ps)
    drift = float(np.max(np.abs(energies - H0)))
    return Trajectory(times, xs, ps, H0, drift)


def _bracket_H_eta(spec: ModelSpec, x0: float, p0: float) -> float:
    """{H, eta} at the initial point: -(dH/dp) eta'(x)."""
    return -float(spec.classical_dH_dp(x0, p0)) * float(_eta_prime(spec, x0))


def _eta_prime(spec: ModelSpec, x):
    h = 1e-20
    return np.imag(spec.eta(np.asarray(x, dtype=float) + 1j * h)) / h


def closed_form_eta(spec: ModelSpec, x0: float, p0: float, t, allow_unbound: bool = False):
    """Closed-form eta(x(t)) for the classical motion starting at (x0, p0).

    With R0(H0) <= 0 the motion is not oscillatory; this raises unless
    ``allow_unbound`` is set, in which case the same formula is evaluated with
    an imaginary frequency (sin(i s)/i = sinh s).
    """
    H0 = _energy(spec, x0, p0)
    r0, rm1 = _frequency_data(spec, H0)
    if r0 <= 0 and not allow_unbound:
        raise ClosedFormError(f"R0(H0)={r0:.6g} <= 0: initial data is not oscillatory")
    t = np.asarray(t, dtype=float)
    eta0 = float(spec.eta(x0))
    v0 = -_bracket_H_eta(spec, x0, p0)  # d eta/dt at t = 0
    if r0 == 0:
        # free motion under constant force: eta'' = -R_{-1}
        return eta0 + v0 * t - 0.5 * rm1 * t * t
    w = cmath.sqrt(r0)
    shift = rm1 / r0
    val = v0 * np.sin(w * t) / w + (eta0 + shift) * np.cos(w * t) - shift
    return np.real(val)


def period(spec: ModelSpec, x0: float, p0: float) -> float:
    r0, _ = _frequency_data(spec, _energy(spec, x0, p0))
    if r0 <= 0:
        raise ClosedFormError("no period for non-oscillatory motion")
    return 2 * math.pi / math.sqrt(r0)


def compare(spec: ModelSpec, x0: float, p0: float, t_end: float, steps: int = 100_000, traj: Trajectory | None = None) -> float:
    """max |eta(x_RK4(t)) - eta_closed(t)| over the trajectory samples."""
    if traj is None:
        traj = integrate(spec, x0, p0, t_end, steps)
    closed = closed_form_eta(spec, x0, p0, traj.times, allow_unbound=True)
    return float(np.max(np.abs(np.real(spec.eta(traj.x_values)) - closed)))


def measured_period(spec: ModelSpec, traj: Trajectory, x0: float, p0: float) -> float:
    """Mean spacing of upward crossings of eta through its oscillation centre."""
    H0 = traj.energy
    r0, rm1 = _frequency_data(spec, H0)
    centre = -rm1 / r0
    y = np.real(spec.eta(traj.x_values)) - centre
    idx = np.nonzero((y[:-1] < 0) & (y[1:] >= 0))[0]
    if idx.size < 2:
        raise ValueError("fewer than two crossings; integrate longer")
    t = traj.times
    cross = t[idx] - y[idx] * (t[idx + 1] - t[idx]) / (y[idx + 1] - y[idx])
    return float(np.mean(np.diff(cross)))


def bound_invariant(spec: ModelSpec, traj: Trajectory) -> bool:
    """The positivity or boundedness property of eta along the trajectory.

    Trigonometric coordinates (cos x, cos 2x) satisfy |eta| < 1, squared
    coordinates satisfy eta > 0 and exponential ones exp(-x) > 0.  Every
    model also keeps x inside its open domain.
    """
    x = traj.x_values
    lo, hi = spec.domain
    inside = bool(np.all((x > lo) & (x < hi)))
    eta = np.real(spec.eta(x))
    name = spec.name
    if name in ("SymPoschlTeller", "PoschlTeller", "AskeyWilson"):
        return inside and bool(np.all(np.abs(eta) < 1))
    if name in ("RadialOscillator", "ContinuousDualHahn", "Wilson", "Morse"):
        return inside and bool(np.all(eta > 0))
    return inside and bool(np.all(np.isfinite(eta)))


def trajectory_csv(spec: ModelSpec, traj: Trajectory, x0: float, p0: float, every: int = 1) -> str:
    closed = closed_form_eta(spec, x0, p0, traj.times, allow_unbound=True)
    eta = np.real(spec.eta(traj.x_values))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "p", "eta", "eta_closed_form", "abs_diff"])
    for k in range(0, traj.n_samples, every):
        w.writerow([f"{v:.17g}" for v in (traj.times[k], traj.x_values[k], traj.p_values[k], eta[k], closed[k], abs(eta[k] - closed[k]))])
    return buf.getvalue()
