"""Exact propagator for H0 = -Laplacian + U(x), U quadratic, via the
generalized Mehler kernel and its chirp/dilation/Fourier factorization.

The factored form

    exp(-i t H0) = M_t D_t F M_t exp(-i t^3 |E|^2 / 12)

is applied per axis with a chirp-z transform for the dilation, so cost stays
N log N and the reachable time is not limited by grid blow-up: the e^{2wt}
spreading lives entirely in the dilation scale g_k(2t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import czt

from .errors import ConfigurationError, DomainEscapeError, OracleScaleError, SingularTimeError
from .grids import (
    POSITION,
    Grid,
    WaveFunction,
    assert_contained,
    boundary_mass_fraction,
    to_momentum,
    to_position,
)
from .potentials import QuadraticSpec

#: Default guard distance around kernel singular times.
SINGULAR_GUARD = 1e-3

#: Kernel-quadrature oracle limits and stated time domain.
ORACLE_MAX_POINTS = 256
ORACLE_MIN_TIME = 0.05


@dataclass(frozen=True)
class TrajectoryFactors:
    """Per-coordinate g_k(2t), h_k(2t) driving the Mehler kernel.

    Sector identities: h^2 - (w g)^2 = 1 (hyperbolic), h^2 + (w g)^2 = 1
    (trigonometric), h = 1 and g = 2t (free and Stark).
    """

    t: float
    g: np.ndarray
    h: np.ndarray
    sectors: tuple


def _sector_gh(sector: str, omega: float, targ: float):
    if sector == "hyperbolic":
        return np.sinh(omega * targ) / omega, np.cosh(omega * targ)
    if sector == "trigonometric":
        return np.sin(omega * targ) / omega, np.cos(omega * targ)
    return targ, 1.0


def trajectory_factors(t: float, spec: QuadraticSpec) -> TrajectoryFactors:
    """g_k(2t), h_k(2t) for every coordinate of the spec."""
    targ = 2.0 * t
    g = np.empty(spec.dims)
    h = np.empty(spec.dims)
    sectors = []
    for k in range(spec.dims):
        sector = spec.sector(k)
        omega = spec.omega(k) if sector in ("hyperbolic", "trigonometric") else 0.0
        g[k], h[k] = _sector_gh(sector, omega, targ)
        sectors.append(sector)
    return TrajectoryFactors(t=t, g=g, h=h, sectors=tuple(sectors))


def singular_times(spec: QuadraticSpec, horizon_T: float) -> list:
    """All t in (0, T] where some trigonometric g_k(2t) vanishes: m pi/(2 w_k)."""
    if not horizon_T > 0:
        raise ConfigurationError("horizon_T must be > 0")
    out = set()
    for k in range(spec.dims):
        if spec.sector(k) != "trigonometric":
            continue
        w = spec.omega(k)
        m = 1
        while m * np.pi / (2.0 * w) <= horizon_T + 1e-15:
            out.add(m * np.pi / (2.0 * w))
            m += 1
    return sorted(out)


def _maslov_count(sector: str, omega: float, t: float) -> int:
    """Zeros of s -> g(2s) strictly between 0 and t (trigonometric only)."""
    if sector != "trigonometric":
        return 0
    return int(np.floor(2.0 * omega * abs(t) / np.pi + 1e-12))


def _branch_amplitude(sector: str, omega: float, t: float, g_val: float) -> complex:
    """(i g_k(2t))^{-1/2} with the branch fixed by continuity from t -> 0,
    advancing a quarter turn at each sign change of g_k along the path."""
    m = _maslov_count(sector, omega, t)
    sign = 1.0 if t >= 0 else -1.0
    phase = np.exp(-1j * sign * (np.pi / 4.0 + np.pi * m / 2.0))
    return phase / np.sqrt(abs(g_val))


def _check_guard_time(spec: QuadraticSpec, t: float, guard: float):
    if t == 0.0:
        return
    for k in range(spec.dims):
        if spec.sector(k) != "trigonometric":
            continue
        w = spec.omega(k)
        period = np.pi / (2.0 * w)
        dist = abs(abs(t) / period - round(abs(t) / period)) * period
        if round(abs(t) / period) > 0 and dist < guard:
            raise SingularTimeError(
                f"t={t} is within {guard} of a singular time of coordinate {k}"
            )
        if abs(g := np.sin(2 * w * t) / w) < 1e-14 and abs(t) > guard:
            raise SingularTimeError(f"g_{k}(2t) vanished at t={t}")


def _chirp_phase(grid: Grid, spec: QuadraticSpec, fac: TrajectoryFactors, t: float) -> np.ndarray:
    """M_t(x) = exp( i sum x_k^2 h_k/(2 g_k) - i (t/2) sum E_k x_k )."""
    phase = np.zeros(grid.shape)
    for k in range(grid.dims):
        xk = grid.axis_nodes(k)
        phase = phase + xk**2 * fac.h[k] / (2.0 * fac.g[k])
        if spec.sector(k) == "stark":
            phase = phase - (t / 2.0) * spec.field(k) * xk
    return np.exp(1j * phase)


def _semidft_axis(values: np.ndarray, grid: Grid, axis: int, scale: float) -> np.ndarray:
    """Per-axis semidiscrete Fourier transform evaluated at nodes x/scale.

    Computes hat(u_j) = dx (2 pi)^{-1/2} sum_m f(x_m) exp(-i u_j x_m) for
    u_j = x_j / scale via a chirp-z transform (exact, N log N).
    """
    n = grid.points_per_dim
    dx = grid.spacing
    x0 = -grid.half_width
    targets0 = x0 / scale
    du = dx / scale
    a = np.exp(1j * targets0 * dx)
    w = np.exp(-1j * du * dx)
    out = czt(values, m=n, w=w, a=a, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = n
    u = (targets0 + du * np.arange(n)).reshape(shape)
    return dx / np.sqrt(2.0 * np.pi) * np.exp(-1j * u * x0) * out


def _stark_norm_sq(spec: QuadraticSpec) -> float:
    return sum(e**2 for e in spec.fields)


def _axis_tail_radius(weights: np.ndarray, nodes: np.ndarray, tail: float = 1e-12) -> float:
    total = weights.sum()
    if total == 0.0:
        return 0.0
    mask = weights / total > tail
    return float(np.max(np.abs(nodes[mask]))) if np.any(mask) else 0.0


def chirp_resolution_ok(psi: WaveFunction, t: float, spec: QuadraticSpec,
                        margin: float = 1.0):
    """Whether the chirp M_t is resolved on psi's grid.

    The chirp's instantaneous frequency at the edge of the state's support,
    |x| |h_k/g_k| (plus the Stark linear term t E_k / 2), added to the
    state's own bandwidth, must stay below Nyquist; otherwise the sampled
    chirp aliases and the factored application silently corrupts.
    """
    psi = to_position(psi)
    grid = psi.grid
    fac = trajectory_factors(t, spec)
    rho_x = psi.density()
    rho_k = np.abs(np.fft.fftn(psi.values)) ** 2
    ximax = float(np.max(np.abs(grid.freq_nodes)))
    for k in range(grid.dims):
        axes = tuple(j for j in range(grid.dims) if j != k)
        mx = rho_x.sum(axis=axes) if axes else rho_x
        mk = rho_k.sum(axis=axes) if axes else rho_k
        radius = _axis_tail_radius(mx, grid.nodes, tail=1e-12)
        bandwidth = _axis_tail_radius(mk, grid.freq_nodes, tail=1e-12)
        needed = radius * abs(fac.h[k] / fac.g[k]) + bandwidth
        if spec.sector(k) == "stark":
            needed += abs(t) * abs(spec.field(k)) / 2.0
        if needed > margin * ximax:
            return False, k, needed, ximax
    return True, -1, 0.0, ximax


def propagate_factored(psi0: WaveFunction, t: float, spec: QuadraticSpec,
                       guard: float = SINGULAR_GUARD,
                       check_domain: bool = True) -> WaveFunction:
    """Apply exp(-i t H0) through the M_t D_t F M_t factorization.

    The dilation is realized as an exact chirp-z resampling of the
    semidiscrete transform at the rescaled lattice x/g_k(2t); unitarity holds
    to roundoff away from singular times.
    """
    psi0 = to_position(psi0)
    grid = psi0.grid
    if grid.dims != spec.dims:
        raise ConfigurationError("grid dims do not match quadratic spec dims")
    if t == 0.0:
        return psi0
    _check_guard_time(spec, t, guard)
    if check_domain:
        assert_contained(psi0, context="propagate_factored input")
        ok, axis, needed, ximax = chirp_resolution_ok(psi0, t, spec)
        if not ok:
            raise ConfigurationError(
                f"chirp unresolved on axis {axis} at t={t}: needs frequencies up to "
                f"{needed:.1f} vs Nyquist {ximax:.1f}; refine the grid or move t "
                "away from kernel singularities"
            )
    fac = trajectory_factors(t, spec)
    chirp = _chirp_phase(grid, spec, fac, t)
    vals = chirp * psi0.values
    amp = 1.0 + 0.0j
    for k in range(grid.dims):
        vals = _semidft_axis(vals, grid, axis=k, scale=fac.g[k])
        omega = spec.omega(k) if fac.sectors[k] in ("hyperbolic", "trigonometric") else 0.0
        amp *= _branch_amplitude(fac.sectors[k], omega, t, fac.g[k])
    vals = amp * chirp * vals
    e2 = _stark_norm_sq(spec)
    if e2:
        vals = vals * np.exp(-1j * t**3 * e2 / 12.0)
    out = WaveFunction(grid, vals, POSITION)
    if check_domain:
        assert_contained(out, context=f"propagate_factored output at t={t}")
    return out


def mehler_phase(t: float, spec: QuadraticSpec):
    """Closure S(t, x, y) of the kernel exp(i S); x, y are per-axis tuples."""
    fac = trajectory_factors(t, spec)

    def S(x, y):
        xs = [np.asarray(c, dtype=float) for c in np.atleast_1d(x)] if np.ndim(x) else [x]
        ys = [np.asarray(c, dtype=float) for c in np.atleast_1d(y)] if np.ndim(y) else [y]
        total = 0.0
        for k in range(spec.dims):
            xk, yk = xs[k], ys[k]
            total = total + ((xk**2 + yk**2) / 2.0 * fac.h[k] - xk * yk) / fac.g[k]
            if spec.sector(k) == "stark":
                ek = spec.field(k)
                total = total - (ek / 2.0 * (xk + yk) * t + ek**2 / 12.0 * t**3)
        return total

    return S


def propagate_kernel(psi0: WaveFunction, t: float, spec: QuadraticSpec,
                     guard: float = SINGULAR_GUARD) -> WaveFunction:
    """Direct O(N^2)-per-axis quadrature of the Mehler integral.

    Independent oracle for propagate_factored; restricted to small grids in
    one or two dimensions, and to t >= ORACLE_MIN_TIME (the kernel
    degenerates to a delta at t = 0).
    """
    psi0 = to_position(psi0)
    grid = psi0.grid
    if grid.dims > 2 or grid.points_per_dim > ORACLE_MAX_POINTS:
        raise OracleScaleError("kernel oracle limited to <= 2 dims and <= 256 points per dim")
    if abs(t) < ORACLE_MIN_TIME:
        raise OracleScaleError(f"kernel oracle domain is |t| >= {ORACLE_MIN_TIME}")
    _check_guard_time(spec, t, guard)
    fac = trajectory_factors(t, spec)
    x = grid.nodes
    vals = psi0.values
    for k in range(grid.dims):
        X = x[:, None]
        Y = x[None, :]
        S = ((X**2 + Y**2) / 2.0 * fac.h[k] - X * Y) / fac.g[k]
        if spec.sector(k) == "stark":
            ek = spec.field(k)
            S = S - (ek / 2.0 * (X + Y) * t + ek**2 / 12.0 * t**3)
        omega = spec.omega(k) if fac.sectors[k] in ("hyperbolic", "trigonometric") else 0.0
        amp = _branch_amplitude(fac.sectors[k], omega, t, fac.g[k]) / np.sqrt(2.0 * np.pi)
        kernel = amp * np.exp(1j * S) * grid.spacing
        vals = np.moveaxis(np.tensordot(kernel, vals, axes=([1], [k])), 0, k)
    return WaveFunction(grid, vals, POSITION)


def avron_herbst(psi0: WaveFunction, t: float, E: float) -> WaveFunction:
    """Pure-Stark evolution exp(-i t (-Laplacian + E x)) in one dimension:

        psi_t(x) = exp(-i (t E x + t^3 E^2 / 3)) (exp(i t Laplacian) psi0)(x + t^2 E)

    The coordinate shift is spectral, so it must stay inside the box.
    """
    psi0 = to_position(psi0)
    grid = psi0.grid
    if grid.dims != 1:
        raise ConfigurationError("avron_herbst is one-dimensional")
    if t == 0.0:
        return psi0
    xi = grid.freq_nodes
    hat = to_momentum(psi0).values
    free = hat * np.exp(-1j * t * xi**2)
    shift = t**2 * E
    radius = _support_radius(np.abs(np.fft.ifft(free * np.exp(1j * (-grid.half_width) * xi))),
                             grid)
    if radius + abs(shift) > 0.95 * grid.half_width:
        raise DomainEscapeError(
            f"Stark shift t^2 E = {shift:.3g} pushes the state outside the box"
        )
    shifted = free * np.exp(1j * shift * xi)
    psi = to_position(WaveFunction(grid, shifted, "momentum"))
    x = grid.nodes
    vals = np.exp(-1j * (t * E * x + t**3 * E**2 / 3.0)) * psi.values
    out = WaveFunction(grid, vals, POSITION)
    assert_contained(out, context=f"avron_herbst at t={t}")
    return out


def _support_radius(amplitude: np.ndarray, grid: Grid, tail: float = 1e-12) -> float:
    rho = np.abs(amplitude) ** 2
    total = rho.sum()
    if total == 0:
        return 0.0
    mask = rho / total > tail
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(grid.nodes[mask])))


def chirped_spectrum(psi0: WaveFunction, t: float, spec: QuadraticSpec,
                     guard: float = SINGULAR_GUARD):
    """F(M_t psi0) on the dual lattice, plus the dilation scales g_k(2t).

    This is the factorization identity used for large-t observables:

        |psi(t, x)|^2 = prod_k |g_k(2t)|^{-1} |F(M_t psi0)(x_1/g_1, ...)|^2,

    so position-density functionals at time t reduce to fixed-lattice sums
    against |F(M_t psi0)|^2 with coordinates scaled by g_k(2t).  No large
    grid is ever built.  Raises a domain-escape error when the chirped
    spectrum leaks to the edge of the dual lattice.
    """
    psi0 = to_position(psi0)
    grid = psi0.grid
    if grid.dims != spec.dims:
        raise ConfigurationError("grid dims do not match quadratic spec dims")
    _check_guard_time(spec, t, guard)
    fac = trajectory_factors(t, spec)
    chirp = _chirp_phase(grid, spec, fac, t)
    phi = to_momentum(WaveFunction(grid, chirp * psi0.values, POSITION))
    if boundary_mass_fraction(phi) >= 1e-6:
        raise DomainEscapeError(
            "chirped spectrum reaches the dual-lattice edge; refine the grid"
        )
    return phi, fac.g.copy()
