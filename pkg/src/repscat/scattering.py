"""Scattering laboratory: Cook integrands, finite-time wave operators, the
local-velocity operator, and asymptotic-velocity traces.

Large-time alpha = 2 observables never propagate on an enlarged grid: the
chirp/dilation factorization reduces any position-density functional at time
t to a fixed-lattice sum with coordinates scaled by g_k(2t).  Functions of
g*u varying below the lattice resolution (the 1/g-scale structure near u=0)
are handled by per-cell averaging, never by point sampling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigurationError, DomainEscapeError
from .grids import (
    POSITION,
    Grid,
    WaveFunction,
    apply_momentum_operator,
    inner,
    l2_norm,
    to_position,
)
from .mehler import chirped_spectrum
from .potentials import (
    QuadraticSpec,
    bracket_x,
    p_alpha,
    p_alpha_inverse,
    sigma_alpha,
)
from .splitstep import EvolutionConfig, evolution_config, propagate

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _cell_average(fn: Callable, scale: float, nodes: np.ndarray, spacing: float) -> np.ndarray:
    """Average of fn(scale * v) over each cell [node - h/2, node + h/2].

    Point sampling is wrong whenever fn(scale * v) varies on the 1/scale
    scale inside a cell (the origin cell at large dilation scales); Gauss
    averaging restores the correct cell mass.
    """
    v = nodes[:, None] + (spacing / 2.0) * _GAUSS_NODES[None, :]
    return (fn(scale * v) * _GAUSS_WEIGHTS[None, :]).sum(axis=1) / 2.0


@dataclass(frozen=True)
class DensitySnapshot:
    """Weighted point masses representing |psi(t, x)|^2 with x = scale * node.

    For the factorization route the nodes are dual-lattice points and scale
    is g(2t); for direct grid densities the nodes are spatial points with
    scale 1.  Weights sum to 1.
    """

    t: float
    nodes: np.ndarray
    weights: np.ndarray
    scale: float
    spacing: float

    def mean_of(self, fn: Callable, cell_averaged: bool = True) -> float:
        if cell_averaged:
            vals = _cell_average(fn, self.scale, self.nodes, self.spacing)
        else:
            vals = fn(self.scale * self.nodes)
        return float(np.sum(vals * self.weights))

    def mass_in_radius_band(self, r_lo: float, r_hi: float) -> float:
        """Exact mass with |x| in [r_lo, r_hi], resolving sub-cell overlap."""
        lo_u, hi_u = r_lo / abs(self.scale), r_hi / abs(self.scale)
        cell_lo = self.nodes - self.spacing / 2.0
        cell_hi = self.nodes + self.spacing / 2.0
        # overlap of each cell with [-hi_u, -lo_u] union [lo_u, hi_u]
        right = np.clip(np.minimum(cell_hi, hi_u) - np.maximum(cell_lo, lo_u), 0.0, None)
        left = np.clip(np.minimum(cell_hi, -lo_u) - np.maximum(cell_lo, -hi_u), 0.0, None)
        frac = (right + left) / self.spacing
        return float(np.sum(self.weights * frac))

    def velocity_mass_below(self, theta: float, alpha: float) -> float:
        """P[ p_alpha(x)/t <= theta ]."""
        r = float(p_alpha_inverse(theta * self.t, alpha))
        return self.mass_in_radius_band(0.0, r)

    def velocity_mass_window(self, theta2: float, theta3: float, alpha: float) -> float:
        r2 = float(p_alpha_inverse(theta2 * self.t, alpha))
        r3 = float(p_alpha_inverse(theta3 * self.t, alpha))
        return self.mass_in_radius_band(r2, r3)

    def velocity_histogram(self, alpha: float, edges: np.ndarray) -> np.ndarray:
        """Masses of p_alpha(x)/t in the given bins (sub-cell exact)."""
        masses = np.empty(len(edges) - 1)
        for i in range(len(edges) - 1):
            masses[i] = self.velocity_mass_window(edges[i], edges[i + 1], alpha)
        return masses


def _snapshot_from_factorization(psi0: WaveFunction, t: float,
                                 spec: QuadraticSpec) -> DensitySnapshot:
    if psi0.grid.dims != 1:
        raise ConfigurationError("factorization snapshots are per-axis; use marginals")
    phi, g = chirped_spectrum(psi0, t, spec)
    rho = phi.density() * phi.grid.freq_spacing
    order = np.argsort(phi.grid.freq_nodes)
    return DensitySnapshot(
        t=t,
        nodes=phi.grid.freq_nodes[order],
        weights=rho[order] / rho.sum(),
        scale=float(abs(g[0])),
        spacing=phi.grid.freq_spacing,
    )


def _snapshot_from_grid(psi: WaveFunction, t: float) -> DensitySnapshot:
    pos = to_position(psi)
    if pos.grid.dims != 1:
        raise ConfigurationError("grid snapshots are one-dimensional")
    rho = pos.density() * pos.measure
    return DensitySnapshot(
        t=t,
        nodes=pos.grid.nodes.copy(),
        weights=rho / rho.sum(),
        scale=1.0,
        spacing=pos.grid.spacing,
    )


# ---------------------------------------------------------------------------
# Local velocity.
# ---------------------------------------------------------------------------

def local_velocity_apply(psi: WaveFunction, alpha: float) -> WaveFunction:
    """Apply the local velocity sigma_alpha/2 (f(x).D + D.f(x)), with
    f = x/<x>^(1+alpha/2) and D = -i grad applied spectrally."""
    pos = to_position(psi)
    grid = pos.grid
    s = sigma_alpha(alpha)
    r2 = grid.radius_sq()
    out = np.zeros(grid.shape, dtype=complex)
    for axis in range(grid.dims):
        f = grid.axis_nodes(axis) * (1.0 + r2) ** (-(1.0 + alpha / 2.0) / 2.0)
        f = np.broadcast_to(f, grid.shape)
        d_psi = apply_momentum_operator(pos, axis)
        f_psi = WaveFunction(grid, f * pos.values, POSITION)
        out = out + 0.5 * s * (f * d_psi.values + apply_momentum_operator(f_psi, axis).values)
    return WaveFunction(grid, out, POSITION)


def local_velocity_expectation(psi: WaveFunction, alpha: float) -> float:
    num = inner(to_position(psi), local_velocity_apply(psi, alpha))
    nsq = l2_norm(psi) ** 2
    if abs(num.imag) > 1e-8 * abs(num.real) + 1e-12:
        from .errors import SelfAdjointnessError

        raise SelfAdjointnessError(f"local velocity expectation residue {num.imag:.3e}")
    return float(num.real) / nsq


# ---------------------------------------------------------------------------
# Cook's method.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CookRecord:
    times: np.ndarray
    integrand: np.ndarray
    tail_kind: str                # 'power' or 'exponential'
    tail_exponent: float          # power p in t^p, or rate lambda in e^(-lambda t)
    tail_exponent_full: float     # power-law fit over the whole schedule
    tail_window: tuple
    integral_estimate: float
    tail_integral: Callable = field(repr=False)
    truncated: bool = False

    def tail_integral_between(self, t_lo: float, t_hi: float) -> float:
        return self.tail_integral(t_lo, t_hi)


def _fit_tails(times, vals, tail_start):
    mask = times >= tail_start
    t = times[mask]
    v = vals[mask]
    pos = v > 0
    if np.sum(pos) < 3:
        return "power", -np.inf, (float(t[0]) if t.size else 0.0, float(times[-1])), None
    t, v = t[pos], v[pos]
    p_slope, p_off = np.polyfit(np.log(t), np.log(v), 1)
    e_slope, e_off = np.polyfit(t, np.log(v), 1)
    p_res = np.sum((np.log(v) - (p_slope * np.log(t) + p_off)) ** 2)
    e_res = np.sum((np.log(v) - (e_slope * t + e_off)) ** 2)
    if e_res < p_res:
        return "exponential", float(-e_slope), (float(t[0]), float(t[-1])), (e_slope, e_off)
    return "power", float(p_slope), (float(t[0]), float(t[-1])), (p_slope, p_off)


def cook_scan(phi: WaveFunction, hamiltonian, perturbation: Callable,
              time_schedule: Sequence[float],
              tail_start: Optional[float] = None) -> CookRecord:
    """Sample t -> ||V exp(-i t H0) phi|| and fit/integrate its tail.

    hamiltonian: a QuadraticSpec (factorized route, any t reachable) or an
    EvolutionConfig (split-step route, sequential in t).  perturbation is a
    scalar function of the coordinates.

    The integral estimate is composite Simpson over the schedule plus the
    fitted-tail extrapolation to infinity (NaN when the tail does not decay
    integrably).  Guard violations truncate the record with a flag.
    """
    times = np.asarray(sorted(float(t) for t in time_schedule))
    if times.size < 4 or times[0] <= 0:
        raise ConfigurationError("schedule needs >= 4 positive times")
    vals = []
    truncated = False
    if isinstance(hamiltonian, QuadraticSpec):
        for t in times:
            try:
                vals.append(_factorized_coupling_norm(phi, t, hamiltonian, perturbation))
            except DomainEscapeError:
                truncated = True
                break
    elif isinstance(hamiltonian, EvolutionConfig):
        psi = to_position(phi)
        prev = 0.0
        for t in times:
            try:
                psi, _ = propagate(psi, t - prev, hamiltonian)
            except DomainEscapeError:
                truncated = True
                break
            prev = t
            w = perturbation(*psi.grid.meshgrid())
            vals.append(l2_norm(WaveFunction(psi.grid, w * psi.values, POSITION)))
    else:
        raise ConfigurationError("hamiltonian must be a QuadraticSpec or EvolutionConfig")
    vals = np.asarray(vals)
    times = times[: len(vals)]
    if tail_start is None:
        tail_start = float(np.sqrt(times[0] * times[-1]))  # geometric midpoint
    kind, expo, window, fit = _fit_tails(times, vals, tail_start)
    full_slope = _fit_tails(times, vals, times[0])[1]

    def tail_integral(t_lo, t_hi):
        if fit is None:
            return 0.0
        a, b = fit
        if kind == "power":
            p = a
            c = np.exp(b)
            if t_hi == np.inf:
                if p >= -1.0:
                    return np.inf
                return c * t_lo ** (p + 1.0) / (-p - 1.0)
            if abs(p + 1.0) < 1e-12:
                return c * np.log(t_hi / t_lo)
            return c * (t_hi ** (p + 1.0) - t_lo ** (p + 1.0)) / (p + 1.0)
        lam = -a
        c = np.exp(b)
        if lam <= 0:
            return np.inf
        hi_part = 0.0 if t_hi == np.inf else c * np.exp(-lam * t_hi) / lam
        return c * np.exp(-lam * t_lo) / lam - hi_part

    body = float(simpson(vals, x=times)) if len(times) > 2 else 0.0
    tail = tail_integral(float(times[-1]), np.inf)
    integral = body + tail if np.isfinite(tail) else np.nan
    return CookRecord(
        times=times,
        integrand=vals,
        tail_kind=kind,
        tail_exponent=expo,
        tail_exponent_full=full_slope,
        tail_window=window,
        integral_estimate=integral,
        tail_integral=tail_integral,
        truncated=truncated,
    )


def _factorized_coupling_norm(phi: WaveFunction, t: float, spec: QuadraticSpec,
                              perturbation: Callable) -> float:
    """||V exp(-i t H0) phi|| via the unitary-dilation identity: the norm is
    a fixed-lattice sum of cell-averaged |V(g.u)|^2 against |F(M_t phi)|^2."""
    hat, g = chirped_spectrum(phi, t, spec)
    grid = hat.grid
    rho = hat.density() * hat.measure
    if grid.dims == 1:
        v2 = _cell_average(lambda y: perturbation(y) ** 2, float(g[0]),
                           grid.freq_nodes, grid.freq_spacing)
        return float(np.sqrt(np.sum(v2 * rho)))
    coords = tuple(gk * grid.axis_freqs(k) for k, gk in enumerate(g))
    v2 = perturbation(*coords) ** 2
    return float(np.sqrt(np.sum(v2 * rho)))


def cook_record_to_csv(record: CookRecord, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "integrand"])
        for t, v in zip(record.times, record.integrand):
            writer.writerow([format(t, ".17g"), format(v, ".17g")])


# ---------------------------------------------------------------------------
# Wave operators.
# ---------------------------------------------------------------------------

def wave_operator(phi: WaveFunction, T: float, h_cfg, h0_cfg, **kwargs) -> WaveFunction:
    """Omega_T phi = exp(i T H) exp(-i T H0) phi.

    h0_cfg QuadraticSpec + h_cfg (QuadraticSpec, V callable): interaction
    picture — the free factorization turns exp(i T H) exp(-i T H0) into an
    ordered product of exact unitary conjugated-potential phases on the fixed
    lattice, so T is not limited by the e^{2wt} spreading.

    h0_cfg / h_cfg both EvolutionConfig: literal finite-time composition by
    split-step (guards limit the reachable T).
    """
    if T == 0.0:
        return to_position(phi)
    if isinstance(h0_cfg, QuadraticSpec):
        spec, perturbation = h_cfg
        if not isinstance(spec, QuadraticSpec):
            raise ConfigurationError("h_cfg must be (QuadraticSpec, perturbation)")
        return _wave_operator_factorized(phi, T, spec, perturbation, **kwargs)
    if isinstance(h0_cfg, EvolutionConfig) and isinstance(h_cfg, EvolutionConfig):
        free, _ = propagate(to_position(phi), T, h0_cfg)
        out, _ = propagate(free, -T, h_cfg)
        return out
    raise ConfigurationError("unsupported propagator configuration pair")


def _interaction_phase_slice(u: np.ndarray, grid: Grid, spec: QuadraticSpec,
                             s: float, delta: float, perturbation: Callable) -> np.ndarray:
    """exp(i delta W_s) u with W_s = exp(i s H0) V exp(-i s H0)
    = M_s^* F^* V(g(2s) .) F M_s — exactly unitary on the lattice."""
    from .mehler import _chirp_phase, trajectory_factors

    fac = trajectory_factors(s, spec)
    chirp = _chirp_phase(grid, spec, fac, s)
    if grid.dims == 1:
        vbar = _cell_average(perturbation, float(fac.g[0]), grid.freq_nodes,
                             grid.freq_spacing)
    else:
        coords = tuple(fac.g[k] * grid.axis_freqs(k) for k in range(grid.dims))
        vbar = perturbation(*coords)
    out = chirp * u
    out = np.fft.ifftn(np.exp(1j * delta * vbar) * np.fft.fftn(out))
    return np.conj(chirp) * out


def _chirp_resolution_floor(grid: Grid, spec: QuadraticSpec, bandwidth: float) -> float:
    """Smallest s at which M_s is resolved: the chirp's instantaneous
    frequency max|x| h(2s)/g(2s) plus the state bandwidth must stay below
    80% of Nyquist."""
    ximax = float(np.max(np.abs(grid.freq_nodes)))
    budget = 0.8 * ximax - bandwidth
    L = grid.half_width
    if budget <= L:  # coth > 1 always; need budget/L > 1
        raise ConfigurationError("grid cannot resolve the interaction chirp; increase points")
    s_floor = 0.0
    for k in range(spec.dims):
        sector = spec.sector(k)
        if sector == "hyperbolic":
            w = spec.omega(k)
            s_floor = max(s_floor, float(np.arctanh(w * L / budget) / (2.0 * w)))
        elif sector in ("stark", "free"):
            s_floor = max(s_floor, L / (2.0 * budget))
        else:
            w = spec.omega(k)
            s_floor = max(s_floor, L / (2.0 * budget))  # tan ~ linear near 0
    return s_floor


def _state_bandwidth(phi: WaveFunction, tail: float = 1e-10) -> float:
    hat = np.fft.fftn(to_position(phi).values)
    rho = np.abs(hat) ** 2
    rho = rho / rho.sum()
    grid = phi.grid
    ximax = 0.0
    for k in range(grid.dims):
        axis_rho = rho
        for j in range(grid.dims - 1, -1, -1):
            if j != k:
                axis_rho = axis_rho.sum(axis=j)
        mask = axis_rho > tail
        if np.any(mask):
            ximax = max(ximax, float(np.max(np.abs(grid.freq_nodes[mask]))))
    return ximax


def _wave_operator_factorized(phi: WaveFunction, T: float, spec: QuadraticSpec,
                              perturbation: Callable, slice_width: float = 0.025,
                              s0: Optional[float] = None,
                              splitstep_dt: float = 1e-3) -> WaveFunction:
    if spec.n_plus > 0:
        raise ConfigurationError(
            "interaction-picture wave operators cross kernel singular times on "
            "confining axes; use split-step configs for n_plus > 0"
        )
    phi = to_position(phi)
    grid = phi.grid
    bw = _state_bandwidth(phi)
    floor = _chirp_resolution_floor(grid, spec, bw)
    if s0 is None:
        s0 = max(2.0 * floor, 0.05)
    if s0 < floor:
        raise ConfigurationError(f"s0={s0} below chirp resolution floor {floor:.3g}")
    if T <= s0:
        return _wave_operator_direct(phi, T, spec, perturbation, splitstep_dt)
    n = max(1, int(round((T - s0) / slice_width)))
    delta = (T - s0) / n
    u = phi.values.copy()
    for k in range(n, 0, -1):
        s = s0 + (k - 0.5) * delta
        u = _interaction_phase_slice(u, grid, spec, s, delta, perturbation)
    psi = WaveFunction(grid, u, POSITION)
    return _wave_operator_direct(psi, s0, spec, perturbation, splitstep_dt)


def _wave_operator_direct(phi: WaveFunction, T: float, spec: QuadraticSpec,
                          perturbation: Callable, dt: float) -> WaveFunction:
    """exp(i T H) exp(-i T H0) phi by split-step on both halves (small T).

    Matching discretizations make the V = 0 case an exact identity, and the
    shared Strang error cancels to first order in the perturbation.  The
    edge guard is relaxed here: wave-operator states legitimately carry a
    small spread scattered component.
    """
    cfg0 = evolution_config(phi.grid, dt, quadratic=spec, edge_mass_tol=1e-2)
    cfg = evolution_config(phi.grid, dt, quadratic=spec, perturbation=perturbation,
                           edge_mass_tol=1e-2)
    free, _ = propagate(phi, T, cfg0)
    out, _ = propagate(free, -T, cfg)
    return out


def cauchy_differences(phi: WaveFunction, Ts: Sequence[float], h_cfg, h0_cfg,
                       **kwargs):
    """||Omega_T2 phi - Omega_T1 phi|| for consecutive T pairs, with the
    wave-operator states themselves."""
    omegas = {T: wave_operator(phi, T, h_cfg, h0_cfg, **kwargs) for T in Ts}
    diffs = []
    for t1, t2 in zip(Ts, Ts[1:]):
        d = omegas[t2].values - omegas[t1].values
        diffs.append(float(np.sqrt(np.sum(np.abs(d) ** 2) * omegas[t2].measure)))
    return diffs, omegas


# ---------------------------------------------------------------------------
# Velocity traces.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VelocityTrace:
    """Time series of <p_alpha(x)>/t with density snapshots per time."""

    alpha: float
    times: np.ndarray
    means: np.ndarray                       # <p_alpha(x)/t>
    snapshots: tuple                        # DensitySnapshot per time (radial route)
    per_direction: dict                     # axis -> ln<x_j>/t series (alpha=2 routes)
    histogram_edges: np.ndarray
    histograms: tuple                       # masses per time

    def successive_differences(self) -> np.ndarray:
        return np.diff(self.means)

    def richardson_limit(self, i: int = -2, j: int = -1) -> float:
        """Two-point extrapolation in 1/t: with m(t) = sigma + c/t, the
        combination (t2 m2 - t1 m1)/(t2 - t1) removes the 1/t term."""
        t1, t2 = self.times[i], self.times[j]
        m1, m2 = self.means[i], self.means[j]
        return float((t2 * m2 - t1 * m1) / (t2 - t1))


def _histogram_edges(alpha: float, margin: float = 2.0, bins: int = 120) -> np.ndarray:
    top = margin * sigma_alpha(alpha) + 1.0
    return np.linspace(0.0, top, bins + 1)


def velocity_trace(psi0: WaveFunction, hamiltonian, alpha: float,
                   time_schedule: Sequence[float],
                   per_direction: bool = False) -> VelocityTrace:
    """Track <p_alpha(x)>/t and its distribution along the evolution.

    QuadraticSpec hamiltonians use the factorization identity (any t, no
    grid growth); EvolutionConfig hamiltonians propagate sequentially.
    For multi-axis quadratic specs the radial mean uses the product density
    over the scaled dual lattice, and per-direction ln<x_j>/t traces come
    from the axis marginals.
    """
    times = np.asarray(sorted(float(t) for t in time_schedule))
    if times.size == 0 or times[0] <= 0:
        raise ConfigurationError("schedule must contain positive times")
    edges = _histogram_edges(alpha)
    means = []
    snaps = []
    hists = []
    per_dir: dict = {}

    if isinstance(hamiltonian, QuadraticSpec):
        grid = psi0.grid
        for t in times:
            hat, g = chirped_spectrum(psi0, t, hamiltonian)
            rho = hat.density() * hat.measure
            rho = rho / rho.sum()
            if grid.dims == 1:
                snap = DensitySnapshot(
                    t=t,
                    nodes=np.sort(grid.freq_nodes),
                    weights=rho[np.argsort(grid.freq_nodes)],
                    scale=float(abs(g[0])),
                    spacing=grid.freq_spacing,
                )
                means.append(snap.mean_of(lambda y: p_alpha(y, alpha)) / t)
                snaps.append(snap)
                hists.append(snap.velocity_histogram(alpha, edges * 1.0))
            else:
                means.append(_radial_mean_nd(hat, g, alpha) / t)
            if per_direction:
                for ax in range(grid.dims):
                    marg = _axis_marginal(hat, g, ax)
                    val = marg.mean_of(lambda y: np.log(bracket_x(y))) / t
                    per_dir.setdefault(ax, []).append(val)
    elif isinstance(hamiltonian, EvolutionConfig):
        psi = to_position(psi0)
        prev = 0.0
        for t in times:
            psi, _ = propagate(psi, t - prev, hamiltonian)
            prev = t
            snap = _snapshot_from_grid(psi, t)
            means.append(snap.mean_of(lambda y: p_alpha(y, alpha), cell_averaged=False) / t)
            snaps.append(snap)
            hists.append(snap.velocity_histogram(alpha, edges))
    else:
        raise ConfigurationError("hamiltonian must be a QuadraticSpec or EvolutionConfig")

    for ax in per_dir:
        per_dir[ax] = np.asarray(per_dir[ax])
    return VelocityTrace(
        alpha=alpha,
        times=times,
        means=np.asarray(means),
        snapshots=tuple(snaps),
        per_direction=per_dir,
        histogram_edges=edges,
        histograms=tuple(np.asarray(h) for h in hists),
    )


def _axis_marginal(hat: WaveFunction, g: np.ndarray, axis: int) -> DensitySnapshot:
    grid = hat.grid
    rho = hat.density() * hat.measure
    axes = tuple(k for k in range(grid.dims) if k != axis)
    marg = rho.sum(axis=axes) if axes else rho
    marg = marg / marg.sum()
    order = np.argsort(grid.freq_nodes)
    return DensitySnapshot(
        t=0.0,
        nodes=grid.freq_nodes[order],
        weights=marg[order],
        scale=float(abs(g[axis])),
        spacing=grid.freq_spacing,
    )


def _radial_mean_nd(hat: WaveFunction, g: np.ndarray, alpha: float) -> float:
    """<p_alpha(|x|)> for the scaled n-D density, with a Gauss-refined origin
    cell (the only cell where p_alpha(g.u) varies below lattice resolution)."""
    grid = hat.grid
    rho = hat.density() * hat.measure
    rho = rho / rho.sum()
    r2 = np.zeros(grid.shape)
    for k in range(grid.dims):
        r2 = r2 + (g[k] * grid.axis_freqs(k)) ** 2
    vals = p_alpha(np.sqrt(r2), alpha)
    total = float(np.sum(vals * rho))
    # refine the origin cell by a tensor Gauss rule
    idx = tuple([0] * grid.dims)
    w0 = float(rho[idx])
    if w0 > 0:
        h = grid.freq_spacing
        pts = (h / 2.0) * _GAUSS_NODES
        mesh = np.meshgrid(*([pts] * grid.dims), indexing="ij")
        wmesh = np.ones_like(mesh[0])
        for k in range(grid.dims):
            wshape = [1] * grid.dims
            wshape[k] = len(_GAUSS_WEIGHTS)
            wmesh = wmesh * (_GAUSS_WEIGHTS.reshape(wshape) / 2.0)
        rr = np.zeros_like(mesh[0])
        for k in range(grid.dims):
            rr = rr + (g[k] * mesh[k]) ** 2
        refined = float(np.sum(p_alpha(np.sqrt(rr), alpha) * wmesh))
        total += w0 * (refined - float(vals[idx]))
    return total


def minimal_maximal_velocity_mass(trace: VelocityTrace, theta_low: float,
                                  theta_window) -> dict:
    """Mass of p_alpha(x)/t below theta_low and inside [theta2, theta3],
    per snapshot time; both must decay in t for continuum states."""
    if not trace.snapshots:
        raise ConfigurationError("trace carries no density snapshots")
    t2, t3 = theta_window
    below = []
    window = []
    for snap in trace.snapshots:
        below.append(snap.velocity_mass_below(theta_low, trace.alpha))
        window.append(snap.velocity_mass_window(t2, t3, trace.alpha))
    return {
        "times": trace.times[: len(below)],
        "mass_below": np.asarray(below),
        "mass_in_window": np.asarray(window),
        "below_decaying": bool(np.all(np.diff(below) <= 1e-12 + 0.05 * np.abs(below[:-1]))),
        "window_decaying": bool(np.all(np.diff(window) <= 1e-12 + 0.05 * np.abs(window[:-1]))),
    }


def velocity_trace_to_csv(trace: VelocityTrace, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        cols = ["t", "mean"] + [f"ln_x{ax}_over_t" for ax in sorted(trace.per_direction)]
        writer.writerow(cols)
        for i, t in enumerate(trace.times):
            row = [t, trace.means[i]]
            for ax in sorted(trace.per_direction):
                row.append(trace.per_direction[ax][i])
            writer.writerow([format(float(v), ".17g") for v in row])


def histograms_to_csv(trace: VelocityTrace, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "bin_lo", "bin_hi", "mass"])
        for t, masses in zip(trace.times, trace.histograms):
            for lo, hi, m in zip(trace.histogram_edges[:-1], trace.histogram_edges[1:], masses):
                writer.writerow([format(float(v), ".17g") for v in (t, lo, hi, m)])
