"""The asymptotic-velocity observable p_alpha(x)/t.

For alpha = 2 the position density at any time is available through the
chirp/dilation factorization, so t = 10 (where the wavepacket sits at radius
~e^20) costs the same as t = 2.  The mean of ln<x>/t approaches 2, the mass
below any threshold theta < 2 dies out (minimal velocity), no mass travels
faster than 2 (maximal velocity), and a confined eigenstate stays at 0.
For alpha = 1 a split-step run with 1/t extrapolation approaches 2 - alpha.
In a two-direction saddle each coordinate carries its own velocity 2 w_j and
the global observable follows the fastest one.
"""

import numpy as np

import repscat as rs

HYPER = rs.QuadraticSpec(dims=1, n_minus=1, omegas=(1.0,))


def main():
    print("== alpha = 2, free saddle: <ln<x>>/t -> sigma_2 = 2 ==")
    grid = rs.make_grid(1, 512, 12.0)
    trace = rs.velocity_trace(rs.gaussian(grid), HYPER, 2.0, [2.0, 4.0, 6.0, 8.0, 10.0])
    for t, m in zip(trace.times, trace.means):
        print(f"   t = {t:4.1f}: <p_2(x)>/t = {m:.4f}")
    masses = rs.minimal_maximal_velocity_mass(trace, 1.0, (3.0, 4.0))
    print(f"   mass with velocity < 1 at t=10:      {masses['mass_below'][-1]:.2e}")
    print(f"   mass with velocity in [3,4] at t=10: {masses['mass_in_window'][-1]:.2e}")

    print("== confining direction: ground state has asymptotic velocity 0 ==")
    trig = rs.QuadraticSpec(dims=1, n_plus=1, omegas=(1.0,))
    x = grid.nodes
    phi0 = rs.WaveFunction(grid, np.pi**-0.25 * np.exp(-(x**2) / 2) + 0j)
    tr0 = rs.velocity_trace(phi0, trig, 2.0, [2.0, 4.0, 7.0, 10.0])
    print(f"   <ln<x>>/t at t=10: {tr0.means[-1]:.4f};"
          f" mass below theta=1: {rs.minimal_maximal_velocity_mass(tr0, 1.0, (3.0, 4.0))['mass_below'][-1]:.4f}")

    print("== alpha = 1 by split-step: <x>^(1/2)/t -> sigma_1 = 1 ==")
    L, n = rs.suggest_grid(1.0, 8.0, 5.0)
    cfg = rs.evolution_config(rs.make_grid(1, n, L), 2e-3, repulsive=rs.RepulsiveSpec(1.0))
    tr1 = rs.velocity_trace(rs.gaussian(cfg.grid), cfg, 1.0, [2.0, 4.0, 6.0, 8.0])
    for t, m in zip(tr1.times, tr1.means):
        print(f"   t = {t:4.1f}: <p_1(x)>/t = {m:.4f}")
    print(f"   1/t-extrapolated limit: {tr1.richardson_limit():.4f}")

    print("== two saddle directions, omegas (1, 2): per-direction velocities ==")
    spec = rs.QuadraticSpec(dims=2, n_minus=2, omegas=(1.0, 2.0))
    g2 = rs.make_grid(2, 256, 8.0)
    tr2 = rs.velocity_trace(rs.gaussian(g2), spec, 2.0, [6.0, 8.0, 10.0],
                            per_direction=True)
    print(f"   ln<x_1>/t at t=10: {tr2.per_direction[0][-1]:.3f}  (target 2 w_1 = 2)")
    print(f"   ln<x_2>/t at t=10: {tr2.per_direction[1][-1]:.3f}  (target 2 w_2 = 4)")
    print(f"   global ln<x>/t:    {tr2.means[-1]:.3f}  (follows the fastest direction)")


if __name__ == "__main__":
    main()
