"""Strang split-step spectral propagator for H = -Laplacian + V_total(x),
with V_total = -<x>^alpha + V or a quadratic saddle plus perturbation, and a
small dense matrix-exponential oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import (
    ConfigurationError,
    NumericalStateError,
    OracleScaleError,
    PhaseWindingError,
)
from .grids import (
    POSITION,
    Grid,
    Observable,
    WaveFunction,
    assert_contained,
    expectation,
    l2_norm,
    to_position,
)
from .potentials import QuadraticSpec, RepulsiveSpec, p_alpha, p_alpha_inverse, sigma_alpha

ORACLE_MAX_POINTS = 128


@dataclass(frozen=True)
class EvolutionConfig:
    """Sampled potential/kinetic data plus guard thresholds for split-step runs."""

    grid: Grid
    dt: float
    potential: np.ndarray
    kinetic: np.ndarray = field(default=None)
    edge_fraction: float = 0.1
    edge_mass_tol: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if np.iscomplexobj(self.potential) or (
            self.kinetic is not None and np.iscomplexobj(self.kinetic)
        ):
            raise ConfigurationError("potential and kinetic samples must be real")
        pot = np.asarray(self.potential, dtype=float)
        if pot.shape != self.grid.shape:
            raise ConfigurationError("potential samples do not match the grid")
        if not np.all(np.isfinite(pot)):
            raise ConfigurationError("potential samples must be finite and real")
        object.__setattr__(self, "potential", pot)
        kin = self.kinetic if self.kinetic is not None else self.grid.kinetic_samples()
        kin = np.asarray(kin, dtype=float)
        if kin.shape != self.grid.shape:
            raise ConfigurationError("kinetic samples do not match the grid")
        object.__setattr__(self, "kinetic", kin)
        winding = self.dt * float(np.max(np.abs(pot)))
        if winding > np.pi:
            raise PhaseWindingError(
                f"dt*max|V| = {winding:.3f} exceeds pi; shrink dt or the box"
            )


def evolution_config(grid: Grid, dt: float,
                     repulsive: Optional[RepulsiveSpec] = None,
                     quadratic: Optional[QuadraticSpec] = None,
                     perturbation=None,
                     **guards) -> EvolutionConfig:
    """Compose -<x>^alpha (or quadratic U) plus perturbation samples."""
    pot = np.zeros(grid.shape)
    if repulsive is not None:
        pot = pot + repulsive.potential_samples(grid)
    if quadratic is not None:
        pot = pot + quadratic.potential_samples(grid)
    if perturbation is not None:
        extra = perturbation(*grid.meshgrid()) if callable(perturbation) else perturbation
        if np.iscomplexobj(extra):
            raise ConfigurationError("perturbation samples must be real")
        pot = pot + np.broadcast_to(np.asarray(extra, dtype=float), grid.shape)
    return EvolutionConfig(grid=grid, dt=dt, potential=pot, **guards)


def strang_step(psi: WaveFunction, cfg: EvolutionConfig, dt: Optional[float] = None) -> WaveFunction:
    """One Strang step exp(-i dt V/2) F^-1 exp(-i dt xi^2) F exp(-i dt V/2)."""
    psi = to_position(psi)
    h = cfg.dt if dt is None else dt
    half_v = np.exp(-0.5j * h * cfg.potential)
    kin = np.exp(-1j * h * cfg.kinetic)
    vals = half_v * psi.values
    vals = np.fft.ifftn(kin * np.fft.fftn(vals))
    vals = half_v * vals
    out = WaveFunction(psi.grid, vals, POSITION)
    assert_contained(out, cfg.edge_fraction, cfg.edge_mass_tol, context="strang_step")
    return out


def propagate(psi0: WaveFunction, t: float, cfg: EvolutionConfig):
    """Repeated Strang steps with a final fractional step.

    Backward evolution (t < 0) runs the conjugate state forward, which is the
    exact time-reversal for real potentials.  Returns (psi_t, telemetry).
    """
    psi0 = to_position(psi0)
    if not l2_norm(psi0) > 0.0:
        raise NumericalStateError("propagate requires a state with positive norm")
    if t == 0.0:
        return psi0, {"steps": 0, "max_edge_mass": 0.0}
    if t < 0:
        conj = WaveFunction(psi0.grid, np.conj(psi0.values), POSITION)
        out, tele = propagate(conj, -t, cfg)
        return WaveFunction(out.grid, np.conj(out.values), POSITION), tele

    n_full, rem = divmod(t, cfg.dt)
    n_full = int(round(n_full))
    if rem < 1e-12 * cfg.dt or abs(rem - cfg.dt) < 1e-12 * cfg.dt:
        if abs(rem - cfg.dt) < 1e-12 * cfg.dt:
            n_full += 1
        rem = 0.0

    grid = cfg.grid
    half_v = np.exp(-0.5j * cfg.dt * cfg.potential)
    full_v = half_v * half_v
    kin = np.exp(-1j * cfg.dt * cfg.kinetic)
    vals = psi0.values
    max_edge = 0.0
    if n_full:
        vals = half_v * vals
        for k in range(n_full - 1):
            vals = np.fft.ifftn(kin * np.fft.fftn(vals))
            vals = full_v * vals
            max_edge = max(max_edge, _guarded_edge(grid, cfg, vals))
        vals = np.fft.ifftn(kin * np.fft.fftn(vals))
        vals = half_v * vals
        max_edge = max(max_edge, _guarded_edge(grid, cfg, vals))
    if rem:
        psi = WaveFunction(grid, vals, POSITION)
        psi = strang_step(psi, cfg, dt=rem)
        vals = psi.values
    out = WaveFunction(grid, vals, POSITION)
    max_edge = max(max_edge, _guarded_edge(grid, cfg, vals))
    return out, {"steps": n_full + (1 if rem else 0), "max_edge_mass": max_edge}


_EDGE_MASKS = {}


def _edge_mask(grid: Grid, fraction: float) -> np.ndarray:
    key = (grid.dims, grid.points_per_dim, grid.half_width, fraction)
    if key not in _EDGE_MASKS:
        cut = (1.0 - fraction) * grid.half_width
        mask = np.zeros(grid.shape, dtype=bool)
        for k in range(grid.dims):
            mask |= np.abs(grid.axis_nodes(k)) >= cut
        _EDGE_MASKS[key] = mask
    return _EDGE_MASKS[key]


def _guarded_edge(grid: Grid, cfg: EvolutionConfig, vals: np.ndarray) -> float:
    rho = np.abs(vals) ** 2
    frac = float(rho[_edge_mask(grid, cfg.edge_fraction)].sum() / rho.sum())
    if frac >= cfg.edge_mass_tol:
        from .errors import DomainEscapeError

        raise DomainEscapeError(
            f"boundary mass fraction {frac:.3e} during split-step run; enlarge the box"
        )
    return frac


def hamiltonian_matrix(cfg: EvolutionConfig) -> np.ndarray:
    """Dense H = F^-1 diag(xi^2) F + diag(V) on a small 1-D grid."""
    grid = cfg.grid
    if grid.dims != 1 or grid.points_per_dim > ORACLE_MAX_POINTS:
        raise OracleScaleError("dense oracle limited to 1-D grids with <= 128 points")
    n = grid.points_per_dim
    eye = np.eye(n, dtype=complex)
    kin = np.fft.ifft(cfg.kinetic[:, None] * np.fft.fft(eye, axis=0), axis=0)
    return kin + np.diag(cfg.potential.astype(complex))


def dense_oracle(psi0: WaveFunction, t: float, cfg: EvolutionConfig) -> WaveFunction:
    """exp(-i t H) psi0 through the eigendecomposition of the dense H."""
    psi0 = to_position(psi0)
    ham = hamiltonian_matrix(cfg)
    herm_defect = np.max(np.abs(ham - ham.conj().T))
    if herm_defect > 1e-10:
        raise ConfigurationError(f"assembled Hamiltonian not Hermitian ({herm_defect:.2e})")
    w, u = scipy.linalg.eigh((ham + ham.conj().T) / 2.0)
    vals = u @ (np.exp(-1j * t * w) * (u.conj().T @ psi0.values))
    return WaveFunction(psi0.grid, vals, POSITION)


def convergence_order(psi0: WaveFunction, t: float, cfg: EvolutionConfig,
                      dt_sequence, reference: str = "oracle"):
    """Least-squares slope of log(error) vs log(dt) for the Strang scheme.

    reference 'oracle' uses the dense matrix exponential; 'richardson' uses a
    run at the finest dt / 4.  Points at the roundoff floor are dropped and
    flagged.  Returns dict(slope, errors, dts, floor_flagged).
    """
    dts = sorted(float(d) for d in dt_sequence)
    if len(dts) < 4:
        raise ConfigurationError("need at least 4 dt values in geometric progression")
    if reference == "oracle":
        ref = dense_oracle(psi0, t, cfg)
    else:
        fine = EvolutionConfig(cfg.grid, dts[0] / 4.0, cfg.potential, cfg.kinetic,
                               cfg.edge_fraction, cfg.edge_mass_tol)
        ref, _ = propagate(psi0, t, fine)
    ref_norm = np.sqrt(np.sum(np.abs(ref.values) ** 2) * ref.measure)
    errs = []
    for d in dts:
        run_cfg = EvolutionConfig(cfg.grid, d, cfg.potential, cfg.kinetic,
                                  cfg.edge_fraction, cfg.edge_mass_tol)
        out, _ = propagate(psi0, t, run_cfg)
        err = np.sqrt(np.sum(np.abs(out.values - ref.values) ** 2) * out.measure)
        errs.append(float(err / ref_norm))
    errs = np.array(errs)
    floor = 1e-11
    keep = errs > floor
    flagged = bool(np.any(~keep))
    if np.sum(keep) < 2:
        return {"slope": float("nan"), "errors": errs, "dts": np.array(dts),
                "floor_flagged": True}
    slope = float(np.polyfit(np.log(np.array(dts)[keep]), np.log(errs[keep]), 1)[0])
    return {"slope": slope, "errors": errs, "dts": np.array(dts), "floor_flagged": flagged}


def energy_expectation(psi: WaveFunction, cfg: EvolutionConfig) -> float:
    """<xi^2> + <V_total> for conservation diagnostics."""
    kin = expectation(psi, Observable(kind="fourier_multiplier", samples=cfg.kinetic))
    pot = expectation(psi, Observable(kind="multiplication", samples=cfg.potential))
    return kin + pot


def classical_envelope(alpha: float, t: float, initial_radius: float = 0.0) -> float:
    """Largest classical radius reached by time t: p_alpha grows like
    sigma_alpha * t along escaping trajectories, so invert p_alpha."""
    p_end = float(p_alpha(initial_radius, alpha)) + sigma_alpha(alpha) * t
    return float(p_alpha_inverse(p_end, alpha))


def suggest_grid(alpha: float, t_max: float, initial_radius: float,
                 momentum_pad: float = 4.0, safety: float = 1.5):
    """Box half-width and point count for a split-step run up to t_max.

    The box follows the classical envelope times a safety factor; the point
    count keeps the classical momentum sqrt(<L>^alpha) plus the packet's own
    bandwidth below 80% of Nyquist.
    """
    radius = classical_envelope(alpha, t_max, initial_radius)
    half_width = safety * max(radius, initial_radius + 1.0)
    xi_needed = np.sqrt((1.0 + half_width**2) ** (alpha / 2.0)) + momentum_pad
    n = int(2 ** np.ceil(np.log2(2.0 * half_width * xi_needed * 1.25 / np.pi)))
    return float(half_width), max(n, 8)
