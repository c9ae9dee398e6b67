import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arident.errors import InsufficientLengthError, NonstationaryError
from arident.moments import sample_autocovariance, theoretical_covariance
from arident.noise import NoiseSpec, SeededStream
from arident.system import (
    SystemParams,
    read_trajectory_csv,
    simulate,
    simulate_batches,
    write_trajectory_csv,
)


def test_no_excitation_gives_zeros():
    p = SystemParams.white(0.0, 0.0, 0.0)
    traj = simulate(p, 10, burn_in=5)
    np.testing.assert_array_equal(traj.values, np.zeros(10))
    assert len(traj) == 10


def test_recursion_matches_explicit_loop():
    # reference loop written out from y(t) = lam y(t-1) + q(t) + v(t) - lam v(t-1)
    p = SystemParams.white(0.6, 2.0, 3.0, qbar=0.5, vbar=-1.0)
    stream = SeededStream(99, 4)
    traj = simulate(p, 40, burn_in=7, stream=stream)
    q = p.q_spec.mean + np.sqrt(p.q_spec.variance) * stream.generator(0).standard_normal(47)
    v = p.v_spec.mean + np.sqrt(p.v_spec.variance) * stream.generator(1).standard_normal(47)
    y_prev, v_prev = p.stationary_mean, p.v_spec.mean
    ys = []
    for t in range(47):
        y = p.lam * y_prev + q[t] + v[t] - p.lam * v_prev
        ys.append(y)
        y_prev, v_prev = y, v[t]
    np.testing.assert_allclose(traj.values, ys[7:], rtol=1e-12, atol=1e-12)


def test_white_variance_matches_theory(white_params):
    traj = simulate(white_params, 10**6, burn_in=1000, stream=SeededStream(31))
    assert abs(traj.values.var() - 13.5) <= 0.15


def test_nonzero_mean(nonzero_params):
    traj = simulate(nonzero_params, 10**6, stream=SeededStream(32))
    assert abs(traj.values.mean() - 5.5) <= 0.05


def test_empirical_covariance_converges(white_params):
    n = 10**6
    traj = simulate(white_params, n, stream=SeededStream(33))
    emp = sample_autocovariance(traj.values, 2).values
    theory = theoretical_covariance(white_params, 2).values
    band = 4 * theory[0] / np.sqrt(n) * 10
    assert np.all(np.abs(emp - theory) <= band)


@pytest.mark.parametrize("lam", [-0.9, -0.3, 0.0, 0.5, 0.9])
def test_zero_mean_for_any_pole(lam):
    n = 200_000
    p = SystemParams.white(lam, 1.0, 1.0)
    y = simulate(p, n, stream=SeededStream(34)).values
    # long-run standard deviation of the sample mean
    longrun = 1.0 / (1 - lam) ** 2 + 1.0
    assert abs(y.mean()) <= 4 * np.sqrt(longrun / n)


def test_validation():
    with pytest.raises(NonstationaryError):
        SystemParams.white(1.0, 1.0, 1.0)
    with pytest.raises(NonstationaryError):
        SystemParams.white(-1.5, 1.0, 1.0)
    with pytest.raises(InsufficientLengthError):
        simulate(SystemParams.white(0.5, 1, 1), 2)


def test_batch_of_one_matches_simulate(white_params):
    [traj] = simulate_batches(white_params, 100, 1, burn_in=10, master_seed=5)
    single = simulate(white_params, 100, burn_in=10, stream=SeededStream(5, 0))
    np.testing.assert_array_equal(traj.values, single.values)


def test_batches_differ(white_params):
    a, b = simulate_batches(white_params, 100, 2, master_seed=5)
    assert np.all(a.values != b.values)


def test_batches_schedule_independent(white_params):
    serial = simulate_batches(white_params, 500, 8, master_seed=9)
    threaded = simulate_batches(white_params, 500, 8, master_seed=9, workers=4)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.values, b.values)


def test_colored_q_feeds_recursion(colored_params):
    traj = simulate(colored_params, 1000, stream=SeededStream(1))
    assert traj.values.shape == (1000,)
    assert np.isfinite(traj.values).all()


@settings(max_examples=20, deadline=None)
@given(lam=st.floats(-0.95, 0.95), seed=st.integers(0, 2**32), n=st.integers(3, 300))
def test_simulate_deterministic(lam, seed, n):
    p = SystemParams.white(lam, 1.0, 2.0, qbar=0.3)
    a = simulate(p, n, burn_in=20, stream=SeededStream(seed, 2))
    b = simulate(p, n, burn_in=20, stream=SeededStream(seed, 2))
    np.testing.assert_array_equal(a.values, b.values)


def test_trajectory_csv_round_trip(tmp_path, white_params):
    traj = simulate(white_params, 25, stream=SeededStream(2))
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,y"
    assert lines[1].startswith("1,")
    assert len(lines) == 26
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    np.testing.assert_array_equal(read_trajectory_csv(path), traj.values)
