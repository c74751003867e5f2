"""Classical flow of h(x, xi) = xi^2 - <x>^alpha and its growth laws.

The Hamiltonian normalization matches the quantum symbol (xdot = 2 xi), so
the alpha = 2 closed form x(t) = (x0+xi0)/2 e^{2t} + (x0-xi0)/2 e^{-2t}
holds verbatim; the escape exponent kappa = 2/(2-alpha) is convention-free.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NoEscapeError
from .potentials import sigma_alpha

#: |x| or |xi| beyond which a run is truncated and flagged.
OVERFLOW_LIMIT = 1e120


@dataclass(frozen=True)
class PhasePoint:
    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if x.shape != xi.shape:
            raise ConfigurationError("x and xi must have matching shapes")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xi))):
            raise ConfigurationError("phase point entries must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    xs: np.ndarray       # shape (nt, dims)
    xis: np.ndarray
    energy0: float
    alpha: float
    regularized: bool
    truncated: bool = False

    def energies(self) -> np.ndarray:
        return _energy(self.xs, self.xis, self.alpha, self.regularized)

    def energy_drift(self) -> float:
        h = self.energies()
        return float(np.max(np.abs(h - self.energy0)) / (1.0 + abs(self.energy0)))

    def radius(self) -> np.ndarray:
        return np.sqrt(np.sum(self.xs**2, axis=1))

    def final(self) -> PhasePoint:
        return PhasePoint(self.xs[-1], self.xis[-1])


def _energy(xs, xis, alpha, regularized):
    r2 = np.sum(np.asarray(xs) ** 2, axis=-1)
    ke = np.sum(np.asarray(xis) ** 2, axis=-1)
    if regularized:
        return ke - (1.0 + r2) ** (alpha / 2.0)
    return ke - np.sqrt(r2) ** alpha


def _force(x, alpha, regularized):
    # xidot = -grad U with U = -<x>^alpha: alpha <x>^(alpha-2) x
    r2 = np.sum(x * x)
    if regularized:
        return alpha * (1.0 + r2) ** (alpha / 2.0 - 1.0) * x
    r = np.sqrt(r2)
    if r == 0.0:
        raise ConfigurationError("|x|^alpha force is singular at the origin")
    return alpha * r ** (alpha - 2.0) * x


def flow(start: PhasePoint, alpha: float, t_final: float, dt: float,
         regularized: bool = True, record_every: int = 1) -> Trajectory:
    """Leapfrog (kick-drift-kick) integration of xdot = 2 xi, xidot = -grad U.

    Runs that overflow the e^{2t}-type growth are truncated and flagged.
    """
    if not dt > 0:
        raise ConfigurationError("dt must be positive")
    if not (0.0 < alpha <= 2.0):
        raise ConfigurationError(f"alpha must lie in (0, 2], got {alpha}")
    n = int(round(t_final / dt))
    x = start.x.copy()
    xi = start.xi.copy()
    times = [0.0]
    xs = [x.copy()]
    xis = [xi.copy()]
    truncated = False
    for k in range(n):
        xi = xi + 0.5 * dt * _force(x, alpha, regularized)
        x = x + dt * 2.0 * xi
        xi = xi + 0.5 * dt * _force(x, alpha, regularized)
        if np.max(np.abs(x)) > OVERFLOW_LIMIT or np.max(np.abs(xi)) > OVERFLOW_LIMIT:
            truncated = True
            break
        if (k + 1) % record_every == 0 or k == n - 1:
            times.append((k + 1) * dt)
            xs.append(x.copy())
            xis.append(xi.copy())
    energy0 = float(_energy(start.x, start.xi, alpha, regularized))
    return Trajectory(
        times=np.array(times),
        xs=np.array(xs),
        xis=np.array(xis),
        energy0=energy0,
        alpha=alpha,
        regularized=regularized,
        truncated=truncated,
    )


def quadratic_closed_form(start: PhasePoint, t) -> PhasePoint:
    """Exact -x^2 flow in one dimension:
    x(t) = (x0+xi0)/2 e^{2t} + (x0-xi0)/2 e^{-2t}, xi = xdot/2."""
    if start.x.size != 1:
        raise ConfigurationError("closed form is one-dimensional")
    x0 = float(start.x[0])
    xi0 = float(start.xi[0])
    ep = np.exp(2.0 * np.asarray(t, dtype=float))
    em = 1.0 / ep
    x = 0.5 * (x0 + xi0) * ep + 0.5 * (x0 - xi0) * em
    xi = 0.5 * (x0 + xi0) * ep - 0.5 * (x0 - xi0) * em
    return PhasePoint(np.atleast_1d(x), np.atleast_1d(xi))


def escape_exponent(traj: Trajectory, fit_window) -> dict:
    """Least-squares slope of log|x(t)| against log t over the window.

    The trajectory must be escaping (|x| increasing) across the window.
    """
    t_lo, t_hi = fit_window
    mask = (traj.times >= t_lo) & (traj.times <= t_hi) & (traj.times > 0)
    if np.sum(mask) < 4:
        raise ConfigurationError("fit window contains fewer than 4 samples")
    r = traj.radius()[mask]
    t = traj.times[mask]
    if not np.all(np.diff(r) > 0):
        raise NoEscapeError("trajectory is not escaping over the fit window")
    slope = float(np.polyfit(np.log(t), np.log(r), 1)[0])
    return {"kappa_estimate": slope, "n_samples": int(np.sum(mask))}


def log_growth_rate(traj: Trajectory, fit_window) -> float:
    """Slope of ln|x(t)| against t (the alpha = 2 exponential rate)."""
    t_lo, t_hi = fit_window
    mask = (traj.times >= t_lo) & (traj.times <= t_hi)
    if np.sum(mask) < 4:
        raise ConfigurationError("fit window contains fewer than 4 samples")
    return float(np.polyfit(traj.times[mask], np.log(traj.radius()[mask]), 1)[0])


def p_alpha_rate(traj: Trajectory, fit_window) -> float:
    """Mean d/dt p_alpha(x(t)) over the window (classical shadow of the
    asymptotic velocity; approaches sigma_alpha along escaping trajectories)."""
    from .potentials import p_alpha

    t_lo, t_hi = fit_window
    mask = (traj.times >= t_lo) & (traj.times <= t_hi)
    p = p_alpha(traj.radius()[mask], traj.alpha)
    t = traj.times[mask]
    return float(np.polyfit(t, p, 1)[0])


def zero_energy_start(alpha: float, x0: float = 1.0) -> PhasePoint:
    """Escaping start with h = 0 exactly: xi0 = <x0>^(alpha/2)."""
    xi0 = (1.0 + x0**2) ** (alpha / 4.0)
    return PhasePoint(np.array([x0]), np.array([xi0]))


def trajectory_to_csv(traj: Trajectory, path):
    """Columns t, x..., xi..., energy."""
    dims = traj.xs.shape[1]
    h = traj.energies()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{k}" for k in range(dims)]
                        + [f"xi{k}" for k in range(dims)] + ["energy"])
        for i, t in enumerate(traj.times):
            row = [t, *traj.xs[i], *traj.xis[i], h[i]]
            writer.writerow([format(float(v), ".17g") for v in row])


def sigma_for(traj: Trajectory) -> float:
    return sigma_alpha(traj.alpha)
