import numpy as np
import pytest

from repscat import (
    ConfigurationError,
    NoEscapeError,
    PhasePoint,
    escape_exponent,
    flow,
    log_growth_rate,
    quadratic_closed_form,
    zero_energy_start,
)
from repscat.classical import p_alpha_rate, trajectory_to_csv


def test_closed_form_growing_branch():
    p = quadratic_closed_form(PhasePoint([1.0], [1.0]), 1.0)
    assert p.x[0] == pytest.approx(np.exp(2.0), rel=1e-14)
    assert p.xi[0] == pytest.approx(np.exp(2.0), rel=1e-14)


def test_closed_form_decaying_branch():
    p = quadratic_closed_form(PhasePoint([1.0], [-1.0]), 2.0)
    assert p.x[0] == pytest.approx(np.exp(-4.0), rel=1e-12)
    assert p.xi[0] == pytest.approx(-np.exp(-4.0), rel=1e-12)


def test_closed_form_identity_at_zero():
    p = quadratic_closed_form(PhasePoint([0.3], [-0.8]), 0.0)
    assert p.x[0] == pytest.approx(0.3, abs=1e-16)
    assert p.xi[0] == pytest.approx(-0.8, abs=1e-16)


def test_flow_alpha2_matches_closed_form():
    traj = flow(PhasePoint([1.0], [1.0]), 2.0, 3.0, 1e-4, regularized=False,
                record_every=100)
    for i, t in enumerate(traj.times):
        exact = quadratic_closed_form(PhasePoint([1.0], [1.0]), t)
        assert abs(traj.xs[i, 0] - exact.x[0]) <= 1e-5 * abs(exact.x[0])


def test_flow_alpha2_example_values():
    traj = flow(PhasePoint([1.0], [1.0]), 2.0, 1.0, 1e-4, regularized=False)
    assert traj.xs[-1, 0] == pytest.approx(np.exp(2.0), rel=1e-6)
    traj = flow(PhasePoint([1.0], [-1.0]), 2.0, 1.0, 1e-4, regularized=False)
    assert traj.xs[-1, 0] == pytest.approx(np.exp(-2.0), rel=1e-6)


def test_origin_is_fixed_point_regularized():
    traj = flow(PhasePoint([0.0], [0.0]), 1.0, 1.0, 1e-3)
    assert np.all(traj.xs == 0.0)
    assert np.all(traj.xis == 0.0)


def test_unregularized_force_singular_at_origin():
    with pytest.raises(ConfigurationError):
        flow(PhasePoint([0.0], [0.0]), 1.0, 0.1, 1e-3, regularized=False)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_escape_exponent_matches_kappa(alpha):
    kappa = 2.0 / (2.0 - alpha)
    T = 160.0
    traj = flow(zero_energy_start(alpha), alpha, T, 1e-3, record_every=50)
    fit = escape_exponent(traj, (T / 2.0, T))
    assert abs(fit["kappa_estimate"] - kappa) <= 0.03 * kappa


def test_alpha2_log_growth_rate():
    traj = flow(PhasePoint([1.0], [1.0]), 2.0, 3.0, 1e-4, record_every=20)
    rate = log_growth_rate(traj, (1.0, 3.0))
    assert abs(rate - 2.0) <= 0.02 * 2.0


def test_energy_conservation_stated_runs():
    # dt = 1e-4, horizon 10; alpha = 2 on the bounded (stable-manifold) branch
    cases = {0.5: PhasePoint([1.0], [0.0]), 1.0: PhasePoint([1.0], [0.0]),
             1.5: PhasePoint([1.0], [3.0]), 2.0: PhasePoint([1.0], [-1.0])}
    for alpha, start in cases.items():
        traj = flow(start, alpha, 10.0, 1e-4, record_every=100)
        assert traj.energy_drift() <= 1e-6, f"alpha={alpha}"


def test_time_reversal():
    start = PhasePoint([1.0], [0.7])
    fwd = flow(start, 1.0, 2.0, 1e-4)
    flipped = PhasePoint(fwd.xs[-1], -fwd.xis[-1])
    back = flow(flipped, 1.0, 2.0, 1e-4)
    assert abs(back.xs[-1, 0] - 1.0) < 1e-8
    assert abs(back.xis[-1, 0] + 0.7) < 1e-8


def test_asymptotic_speed_law():
    for alpha in (0.5, 1.0, 1.5):
        T = 160.0
        traj = flow(zero_energy_start(alpha), alpha, T, 1e-3, record_every=50)
        rate = p_alpha_rate(traj, (T / 2.0, T))
        assert abs(rate - (2.0 - alpha)) <= 0.05 * (2.0 - alpha)


def test_no_escape_error_for_bounded_run():
    traj = flow(PhasePoint([1.0], [-1.0]), 2.0, 5.0, 1e-3, regularized=False)
    with pytest.raises(NoEscapeError):
        escape_exponent(traj, (2.5, 5.0))


def test_overflow_truncation_flag():
    traj = flow(PhasePoint([1.0], [1.0]), 2.0, 200.0, 1e-2)
    assert traj.truncated
    assert traj.times[-1] < 200.0


def test_trajectory_csv(tmp_path):
    traj = flow(PhasePoint([1.0], [0.5]), 1.0, 1.0, 1e-3, record_every=100)
    path = tmp_path / "traj.csv"
    trajectory_to_csv(traj, path)
    header = path.read_text().splitlines()[0]
    assert header == "t,x0,xi0,energy"
