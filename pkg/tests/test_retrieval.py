import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bscpsp.imaging import FringeParams, MotionTrajectory, ScenePhase, simulate_capture
from bscpsp.oracle import predict_error_nstep, predict_residual_pbsc3
from bscpsp.retrieval import (
    TWO_PI,
    WrappedPhaseMap,
    phase_diff_wrapped,
    rebase,
    wrap_phase,
    wrapped_phase_3step,
    wrapped_phase_4step,
    wrapped_phase_nstep,
)

phases = st.floats(0, 2 * np.pi, exclude_max=True, allow_nan=False)


def static_frames(phi0, N, count=None, A=0.5, B=0.4):
    phi0 = np.atleast_2d(np.asarray(phi0, dtype=float))
    p = FringeParams(A=A, B=B, N=N, width=phi0.shape[1], height=phi0.shape[0])
    count = count or N
    return simulate_capture(ScenePhase(phi0), p, MotionTrajectory.static(max(count, N))).frames[:count]


def circ_err(a, b):
    return np.max(np.abs(phase_diff_wrapped(a, b)))


def test_nstep_four_static():
    pm = wrapped_phase_nstep(static_frames(np.pi / 3, 4), 4)
    assert pm.phase[0, 0] == pytest.approx(np.pi / 3, abs=1e-9)


@pytest.mark.parametrize("N", range(3, 9))
def test_nstep_exact_on_random_grid(N):
    phi0 = np.random.default_rng(N).uniform(0, TWO_PI, (8, 8))
    pm = wrapped_phase_nstep(static_frames(phi0, N), N)
    assert circ_err(pm.phase, phi0) < 1e-9
    assert pm.valid.all()


def test_nstep_length_mismatch():
    with pytest.raises(ValueError):
        wrapped_phase_nstep(static_frames(0.3, 4), 5)
    with pytest.raises(ValueError):
        wrapped_phase_nstep(static_frames(0.3, 4)[:2])


def test_nstep_error_matches_prediction(phase_grid):
    x = np.array([0.01, 0.02, 0.03, 0.04])
    p = FringeParams(width=phase_grid.shape[1], height=1)
    frames = simulate_capture(ScenePhase(phase_grid), p, x).frames
    err = phase_diff_wrapped(wrapped_phase_nstep(frames, 4).phase, phase_grid)
    pred = predict_error_nstep(x, phase_grid, 0, 4)
    assert np.sqrt(np.mean((err - pred) ** 2) / np.mean(pred**2)) < 0.02


def test_3step_examples():
    f = static_frames(1.0, 4, 3)
    assert wrapped_phase_3step(*f).phase[0, 0] == pytest.approx(1.0, abs=1e-9)
    f = static_frames(0.0, 4, 3)
    assert 2 * f[1] - f[0] - f[2] == pytest.approx(0.0, abs=1e-15)
    assert (f[0] - f[2])[0, 0] == pytest.approx(0.8)
    assert wrapped_phase_3step(*f).phase[0, 0] == pytest.approx(0.0, abs=1e-9)


@given(phases)
def test_3step_exact(phi):
    assert circ_err(wrapped_phase_3step(*static_frames(phi, 4, 3)).phase, phi) < 1e-9


def test_3step_error_matches_prediction(phase_grid):
    # centred kinematic motion, same regime as the 4-step fidelity check
    x = MotionTrajectory.kinematic(0.015, 0.004, 4, 1.0).x
    p = FringeParams(width=phase_grid.shape[1], height=1)
    frames = simulate_capture(ScenePhase(phase_grid), p, x).frames[:3]
    err = phase_diff_wrapped(wrapped_phase_3step(*frames).phase, phase_grid)
    ripple = err - np.mean(err)
    pred = predict_residual_pbsc3(x, 0, 0).ripple(phase_grid)
    assert np.sqrt(np.mean((ripple - pred) ** 2) / np.mean(pred**2)) < 0.02


def test_4step_examples():
    f = static_frames(np.pi / 4, 4, 5)
    assert wrapped_phase_4step(*f[:4]).phase[0, 0] == pytest.approx(np.pi / 4, abs=1e-9)
    assert wrapped_phase_4step(*f[1:5], t=1).phase[0, 0] == pytest.approx(7 * np.pi / 4, abs=1e-9)


def test_zero_modulation_is_invalid():
    f = static_frames(np.array([[0.3, 1.0]]), 4)
    f = [fr.copy() for fr in f]
    for fr in f:
        fr[0, 1] = 0.5
    pm = wrapped_phase_4step(*f)
    assert pm.valid.tolist() == [[True, False]]
    assert np.isnan(pm.phase[0, 1])


@given(st.lists(phases, min_size=1, max_size=20), st.integers(0, 3))
def test_range_is_half_open(vals, t):
    f = static_frames(np.array([vals]), 4, 4 + t)
    pm = wrapped_phase_4step(*f[t : t + 4], t=t)
    assert np.all((pm.phase >= 0) & (pm.phase < TWO_PI))


def test_rebase_examples():
    pm = WrappedPhaseMap(np.array([0.0, 1.5 * np.pi]), np.array([True, True]))
    assert rebase(pm, 4).phase[0] == pytest.approx(0.0, abs=1e-12)
    assert rebase(pm, 1).phase[1] == pytest.approx(0.0, abs=1e-12) or rebase(pm, 1).phase[1] == pytest.approx(TWO_PI, abs=1e-12)
    assert rebase(pm, 1).phase[1] < TWO_PI


def test_rebased_static_frames_agree():
    phi0 = np.random.default_rng(3).uniform(0, TWO_PI, (4, 6))
    f = static_frames(phi0, 4, 12)
    maps = [rebase(wrapped_phase_4step(*f[t : t + 4], t=t), t) for t in range(9)]
    for m in maps:
        assert circ_err(m.phase, maps[0].phase) < 1e-9


def test_phase_diff_examples():
    assert phase_diff_wrapped(0.1, TWO_PI - 0.1) == pytest.approx(0.2)
    assert phase_diff_wrapped(np.pi, 0.0) == np.pi


def test_phase_diff_grid_bounded():
    g = np.linspace(-10, 10, 401)
    d = phase_diff_wrapped(g[:, None], g[None, :])
    assert np.all(np.abs(d) <= np.pi)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_phase_diff_congruent(a, b):
    d = phase_diff_wrapped(a, b)
    assert -np.pi < d <= np.pi
    k = (a - b - d) / TWO_PI
    assert abs(k - round(k)) < 1e-9


def test_wrap_phase_edge():
    assert wrap_phase(-1e-18) == 0.0 or wrap_phase(-1e-18) < TWO_PI
    assert wrap_phase(TWO_PI) == 0.0
