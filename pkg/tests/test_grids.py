import numpy as np
import pytest

from repscat import (
    ConfigurationError,
    NumericalStateError,
    Observable,
    SelfAdjointnessError,
    WaveFunction,
    boundary_mass_fraction,
    expectation,
    gaussian,
    l2_norm,
    make_grid,
    random_state,
    to_momentum,
    to_position,
)
from repscat.grids import assert_contained
from repscat.errors import DomainEscapeError

# quad oracle: integral sqrt(1+x^2) exp(-x^2) dx / sqrt(pi), epsabs 1e-14
BRACKET_X_GAUSSIAN_MEAN = 1.2003469347909468


def test_make_grid_basic_lattice():
    g = make_grid(1, 8, 4.0)
    assert g.spacing == 1.0
    assert np.array_equal(g.nodes, np.arange(-4.0, 4.0))


def test_make_grid_nyquist():
    g = make_grid(1, 8, 4.0)
    assert np.max(np.abs(g.freq_nodes)) == pytest.approx(np.pi, abs=1e-15)


def test_make_grid_total_points_2d():
    g = make_grid(2, 16, 8.0)
    assert int(np.prod(g.shape)) == 256


def test_make_grid_rejects_bad_sizes():
    with pytest.raises(ConfigurationError):
        make_grid(1, 12, 4.0)
    with pytest.raises(ConfigurationError):
        make_grid(1, 16, -1.0)
    with pytest.raises(ConfigurationError):
        make_grid(0, 16, 1.0)


def test_l2_norm_constant():
    g = make_grid(1, 8, 4.0)
    psi = WaveFunction(g, np.ones(8, dtype=complex))
    assert l2_norm(psi) == pytest.approx(np.sqrt(8.0), rel=1e-14)


def test_l2_norm_zero_state():
    g = make_grid(1, 8, 4.0)
    assert l2_norm(WaveFunction(g, np.zeros(8, dtype=complex))) == 0.0


def test_l2_norm_normalized_gaussian():
    g = make_grid(1, 512, 20.0)
    psi = WaveFunction(g, np.pi**-0.25 * np.exp(-g.nodes**2 / 2) + 0j)
    assert abs(l2_norm(psi) - 1.0) < 1e-10


def test_l2_norm_rejects_nan():
    g = make_grid(1, 8, 4.0)
    vals = np.ones(8, dtype=complex)
    vals[3] = np.nan
    with pytest.raises(NumericalStateError):
        l2_norm(WaveFunction(g, vals))


def test_transform_roundtrip(rng, l2):
    g = make_grid(1, 128, 10.0)
    psi = random_state(g, rng)
    back = to_position(to_momentum(psi))
    assert l2(back, psi) < 1e-12


def test_transform_gaussian_pair():
    g = make_grid(1, 512, 20.0)
    psi = WaveFunction(g, np.exp(-g.nodes**2 / 2) + 0j)
    hat = to_momentum(psi)
    exact = np.exp(-g.freq_nodes**2 / 2)
    err = np.sqrt(np.sum(np.abs(hat.values - exact) ** 2) * g.freq_spacing)
    assert err < 1e-8


def test_transform_spike_flat_modulus():
    g = make_grid(1, 64, 8.0)
    vals = np.zeros(64, dtype=complex)
    vals[10] = 1.0
    hat = to_momentum(WaveFunction(g, vals))
    mods = np.abs(hat.values)
    assert np.max(mods) - np.min(mods) < 1e-12 * np.max(mods)


def test_parseval_random_states(rng):
    g = make_grid(1, 128, 10.0)
    for _ in range(100):
        psi = random_state(g, rng)
        n_pos = l2_norm(psi)
        n_mom = l2_norm(to_momentum(psi))
        assert abs(n_pos - n_mom) < 1e-12 * n_pos


def test_transform_linearity(rng, l2):
    g = make_grid(1, 64, 8.0)
    a, b = random_state(g, rng), random_state(g, rng)
    lin = WaveFunction(g, 2.0 * a.values + 1j * b.values)
    lhs = to_momentum(lin)
    rhs = WaveFunction(g, 2.0 * to_momentum(a).values + 1j * to_momentum(b).values, "momentum")
    assert l2(lhs, rhs) < 1e-13


def test_expectation_bracket_x_on_gaussian():
    g = make_grid(1, 512, 20.0)
    psi = WaveFunction(g, np.pi**-0.25 * np.exp(-g.nodes**2 / 2) + 0j)
    obs = Observable.multiplication(g, lambda x: np.sqrt(1.0 + x**2))
    assert expectation(psi, obs) == pytest.approx(BRACKET_X_GAUSSIAN_MEAN, abs=1e-7)


def test_expectation_odd_observable_even_state():
    g = make_grid(1, 256, 12.0)
    psi = gaussian(g)
    obs = Observable.multiplication(g, lambda x: x)
    assert abs(expectation(psi, obs)) < 1e-10


def test_expectation_momentum_squared():
    g = make_grid(1, 512, 20.0)
    psi = gaussian(g)
    obs = Observable.fourier_multiplier(g, lambda xi: xi**2)
    assert expectation(psi, obs) == pytest.approx(0.5, abs=1e-8)


def test_expectation_nonnegative_multiplier(rng):
    g = make_grid(1, 64, 8.0)
    obs = Observable.multiplication(g, lambda x: x**2)
    for _ in range(20):
        assert expectation(random_state(g, rng), obs) >= 0.0


def test_expectation_sesquilinear_numerator(rng):
    g = make_grid(1, 64, 8.0)
    obs = Observable.multiplication(g, lambda x: 1.0 + 0.3 * np.sin(x))
    psi = random_state(g, rng)
    scaled = WaveFunction(g, (2.0 - 1.0j) * psi.values)
    assert expectation(scaled, obs) == pytest.approx(expectation(psi, obs), rel=1e-12)


def test_observable_rejects_complex_samples():
    g = make_grid(1, 16, 4.0)
    with pytest.raises(ConfigurationError):
        Observable(kind="multiplication", samples=np.ones(16) * 1j)


def test_expectation_raises_on_imaginary_residue():
    g = make_grid(1, 64, 8.0)
    psi = gaussian(g, momentum=1.0)
    obs = Observable.multiplication(g, lambda x: 1.0 + 0.0 * x)
    # plant complex samples behind the constructor's back
    object.__setattr__(obs, "samples", np.full(64, 1.0 + 0.5j))
    with pytest.raises(SelfAdjointnessError):
        expectation(psi, obs)


def test_boundary_guard_triggers():
    g = make_grid(1, 64, 8.0)
    psi = gaussian(g, center=7.5, width=0.3)
    assert boundary_mass_fraction(psi) > 1e-3
    with pytest.raises(DomainEscapeError):
        assert_contained(psi)


def test_boundary_guard_passes_centered():
    g = make_grid(1, 64, 8.0)
    assert_contained(gaussian(g))
