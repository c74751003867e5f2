import numpy as np
import pytest

from repscat import (
    OracleScaleError,
    QuadraticSpec,
    SingularTimeError,
    WaveFunction,
    avron_herbst,
    chirped_spectrum,
    expectation,
    gaussian,
    l2_norm,
    make_grid,
    propagate_factored,
    propagate_kernel,
    random_state,
    singular_times,
    trajectory_factors,
)
from repscat.errors import DomainEscapeError
from repscat.grids import Observable
from repscat.mehler import mehler_phase

FREE = QuadraticSpec(dims=1)
HYPER = QuadraticSpec(dims=1, n_minus=1, omegas=(1.0,))
TRIG = QuadraticSpec(dims=1, n_plus=1, omegas=(1.0,))
STARK = QuadraticSpec(dims=1, n_E=1, fields=(1.0,))


def test_trajectory_factors_free():
    f = trajectory_factors(0.5, FREE)
    assert f.g[0] == pytest.approx(1.0)
    assert f.h[0] == pytest.approx(1.0)


def test_trajectory_factors_hyperbolic():
    f = trajectory_factors(0.5, HYPER)
    assert f.g[0] == pytest.approx(np.sinh(1.0), rel=1e-14)
    assert f.h[0] == pytest.approx(np.cosh(1.0), rel=1e-14)


def test_trajectory_factors_trig_singular():
    f = trajectory_factors(np.pi / 2.0, TRIG)
    assert abs(f.g[0]) < 1e-14


def test_sector_identities_random(rng):
    for _ in range(1000):
        w = float(rng.uniform(0.2, 3.0))
        t = float(rng.uniform(-4.0, 4.0))
        fh = trajectory_factors(t, QuadraticSpec(dims=1, n_minus=1, omegas=(w,)))
        assert abs(fh.h[0] ** 2 - (w * fh.g[0]) ** 2 - 1.0) < 1e-12 * max(1.0, fh.h[0] ** 2)
        ft = trajectory_factors(t, QuadraticSpec(dims=1, n_plus=1, omegas=(w,)))
        assert abs(ft.h[0] ** 2 + (w * ft.g[0]) ** 2 - 1.0) < 1e-12
        ff = trajectory_factors(t, FREE)
        assert ff.h[0] == 1.0 and ff.g[0] == 2.0 * t


def test_singular_times_empty_without_trig():
    assert singular_times(HYPER, 10.0) == []
    assert singular_times(STARK, 10.0) == []


def test_singular_times_single_trig():
    ts = singular_times(TRIG, 4.0)
    assert np.allclose(ts, [np.pi / 2, np.pi])


def test_singular_times_merged():
    spec = QuadraticSpec(dims=2, n_plus=2, omegas=(1.0, 2.0))
    assert np.allclose(singular_times(spec, 2.0), [np.pi / 4, np.pi / 2])
    assert np.allclose(singular_times(spec, 2.5), [np.pi / 4, np.pi / 2, 3 * np.pi / 4])


def test_factored_identity_at_t0(l2):
    g = make_grid(1, 128, 10.0)
    psi = gaussian(g)
    assert l2(propagate_factored(psi, 0.0, HYPER), psi) == 0.0


def test_factored_free_gaussian_analytic():
    g = make_grid(1, 512, 20.0)
    psi = gaussian(g)
    t = 1.0
    out = propagate_factored(psi, t, FREE)
    x = g.nodes
    exact = np.pi**-0.25 / np.sqrt(1 + 2j * t) * np.exp(-(x**2) / (2 * (1 + 2j * t)))
    err = np.sqrt(np.sum(np.abs(out.values - exact) ** 2) * g.spacing)
    assert err < 1e-8


def test_factored_vs_kernel_oracle(l2):
    g = make_grid(1, 128, 12.0)
    psi = gaussian(g, momentum=0.5)
    a = propagate_factored(psi, 0.3, HYPER)
    b = propagate_kernel(psi, 0.3, HYPER)
    assert l2(a, b) <= 1e-6 * l2_norm(psi)


def test_factored_unitarity_random(rng):
    # 50 random states x 20 admissible times (chirp resolved, off singular)
    g = make_grid(1, 512, 14.0)
    for _ in range(50):
        psi = random_state(g, rng, bandwidth=0.05)
        n0 = l2_norm(psi)
        for _ in range(10):
            t = float(rng.uniform(0.15, 0.4))
            out = propagate_factored(psi, t, HYPER)
            assert abs(l2_norm(out) - n0) < 1e-10 * n0
            t = float(rng.uniform(0.55, 0.95))
            out = propagate_factored(psi, t, TRIG)
            assert abs(l2_norm(out) - n0) < 1e-10 * n0


def test_chirp_guard_rejects_unresolved_times(rng):
    g = make_grid(1, 128, 10.0)
    psi = random_state(g, rng)
    from repscat.errors import ConfigurationError

    with pytest.raises(ConfigurationError, match="chirp"):
        propagate_factored(psi, 0.02, HYPER)


def test_factored_group_law(l2):
    g = make_grid(1, 512, 14.0)
    psi = gaussian(g, momentum=0.3)
    for s, t in [(0.2, 0.3), (0.2, 0.5), (0.4, 0.4)]:
        one = propagate_factored(propagate_factored(psi, t, HYPER), s, HYPER)
        two = propagate_factored(psi, s + t, HYPER)
        assert l2(one, two) < 1e-8


def test_factored_reverse_roundtrip(l2):
    # box sized so the spread state is contained below the 1e-18 mass level:
    # the roundtrip error is the square root of the truncated mass
    g = make_grid(1, 1024, 20.0)
    psi = gaussian(g, momentum=0.3)
    out = propagate_factored(propagate_factored(psi, 0.7, HYPER), -0.7, HYPER)
    assert l2(out, psi) < 1e-8


def test_trig_eigenstate_phase_through_singularities(l2):
    # independent oracle for the branch convention: confining eigenstates
    # pick up exactly exp(-i (2k+1) w t)
    g = make_grid(1, 256, 12.0)
    x = g.nodes
    phi0 = WaveFunction(g, np.pi**-0.25 * np.exp(-(x**2) / 2) + 0j)
    phi1_vals = np.sqrt(2.0) * x * np.pi**-0.25 * np.exp(-(x**2) / 2)
    phi1 = WaveFunction(g, phi1_vals + 0j)
    for t in (0.3, 2.0, 2.5, 4.0):  # crosses pi/2 and pi
        out0 = propagate_factored(phi0, t, TRIG)
        exact0 = WaveFunction(g, np.exp(-1j * t) * phi0.values)
        assert l2(out0, exact0) < 1e-10
        out1 = propagate_factored(phi1, t, TRIG)
        exact1 = WaveFunction(g, np.exp(-3j * t) * phi1.values)
        assert l2(out1, exact1) < 1e-10


def test_singular_time_guard():
    g = make_grid(1, 128, 10.0)
    psi = gaussian(g)
    with pytest.raises(SingularTimeError):
        propagate_factored(psi, np.pi / 2.0, TRIG)
    with pytest.raises(SingularTimeError):
        propagate_factored(psi, np.pi / 2.0 + 5e-4, TRIG)


def test_kernel_oracle_domain_limits():
    g = make_grid(1, 128, 10.0)
    psi = gaussian(g)
    with pytest.raises(OracleScaleError):
        propagate_kernel(psi, 0.01, FREE)
    big = make_grid(1, 512, 10.0)
    with pytest.raises(OracleScaleError):
        propagate_kernel(gaussian(big), 0.3, FREE)


def test_free_phase_closed_form(rng):
    S = mehler_phase(0.7, FREE)
    for _ in range(50):
        x, y = rng.uniform(-5, 5, size=2)
        assert S((x,), (y,)) == pytest.approx((x - y) ** 2 / (4 * 0.7), rel=1e-12)


def test_phase_symmetry_in_x_y(rng):
    spec = QuadraticSpec(dims=2, n_minus=1, n_E=1, omegas=(1.3,), fields=(0.7,))
    S = mehler_phase(0.4, spec)
    for _ in range(25):
        x = tuple(rng.uniform(-3, 3, size=2))
        y = tuple(rng.uniform(-3, 3, size=2))
        assert S(x, y) == pytest.approx(S(y, x), rel=1e-12)


def test_avron_herbst_identity_at_t0(l2):
    g = make_grid(1, 256, 16.0)
    psi = gaussian(g)
    assert l2(avron_herbst(psi, 0.0, 1.0), psi) == 0.0


def test_avron_herbst_displacement():
    g = make_grid(1, 512, 16.0)
    psi = gaussian(g)
    out = avron_herbst(psi, 1.0, 1.0)
    xavg = expectation(out, Observable.multiplication(g, lambda x: x))
    assert abs(xavg - 0.0) == pytest.approx(1.0, abs=1e-6)  # displaced by t^2 E


def test_avron_herbst_vs_factored(l2):
    g = make_grid(1, 512, 16.0)
    psi = gaussian(g)
    for t in (0.5, 1.0):
        a = avron_herbst(psi, t, 1.0)
        b = propagate_factored(psi, t, STARK)
        assert l2(a, b) <= 1e-8


def test_avron_herbst_escape_guard():
    g = make_grid(1, 256, 10.0)
    psi = gaussian(g)
    with pytest.raises(DomainEscapeError):
        avron_herbst(psi, 4.0, 1.0)  # shift 16 > box


def test_observable_without_grid_matches_direct():
    # factorization-identity expectations vs direct factored propagation
    g = make_grid(1, 1024, 20.0)
    psi = gaussian(g, momentum=0.4)
    spec = HYPER
    t = 0.8
    direct = propagate_factored(psi, t, spec)
    obs = Observable.multiplication(g, lambda x: np.exp(-np.abs(x) / 4.0))
    want = expectation(direct, obs)
    hat, gfac = chirped_spectrum(psi, t, spec)
    rho = hat.density() * hat.measure
    rho = rho / rho.sum()
    got = float(np.sum(np.exp(-np.abs(gfac[0] * g.freq_nodes) / 4.0) * rho))
    # routes agree to the dual-lattice quadrature resolution O((g dnu)^2)
    assert got == pytest.approx(want, abs=2e-3)


def test_factored_2d_mixed_sectors(l2):
    spec = QuadraticSpec(dims=2, n_minus=1, omegas=(1.0,))
    g = make_grid(2, 128, 10.0)
    psi = gaussian(g)
    out = propagate_factored(psi, 0.3, spec)
    assert abs(l2_norm(out) - 1.0) < 1e-10
    oracle = propagate_kernel(psi, 0.3, spec)
    assert l2(out, oracle) < 1e-6
