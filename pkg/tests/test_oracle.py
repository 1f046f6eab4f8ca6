import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bscpsp.imaging import FringeParams, MotionTrajectory, ScenePhase, make_ramp_scene, simulate_capture
from bscpsp.oracle import (
    ErrorPrediction,
    diff_k,
    diff_k_closed,
    diff_k_recursive,
    ibsc_ripple_direct,
    predict_error_4step,
    predict_error_nstep,
    predict_residual,
    predict_residual_ibsc,
    predict_residual_pbsc3,
    predict_residual_pbsc4,
    ripple_error,
    rmse_curve,
)

small_x = arrays(np.float64, 12, elements=st.floats(-0.05, 0.05))
# hand-picked trajectory whose difference values are frozen from a 30-digit evaluation
FIXED_X = np.array([3, -1, 4, 1, -5, 9, 2, -6, 5]) / 1000


def test_diff_examples():
    sq = np.arange(10.0) ** 2
    assert all(diff_k(sq, 2, i) == 2 for i in range(8))
    assert diff_k(sq, 3, 0) == 0
    with pytest.raises(IndexError):
        diff_k(sq, 3, 7)


@given(arrays(np.float64, 16, elements=st.floats(-10, 10)), st.integers(0, 8), st.integers(0, 7))
def test_diff_definitions_agree(x, K, i):
    assert abs(diff_k_recursive(x, K, i) - diff_k_closed(x, K, i)) <= 1e-12 * max(1.0, np.abs(x).max()) * 2**K


def test_nstep_prediction_examples(phase_grid):
    assert np.all(predict_error_nstep(np.zeros(4), phase_grid, 0, 4) == 0)
    assert np.allclose(predict_error_nstep(np.full(4, 0.03), phase_grid, 0, 4), 0.03, atol=1e-15)
    assert np.allclose(predict_error_4step(np.full(4, 0.03), phase_grid, 0), 0.03, atol=1e-15)


@given(st.floats(-0.1, 0.1), st.floats(-0.02, 0.02), st.floats(-3, 3))
def test_4step_equals_nstep_at_n4(v0, a, d):
    x = MotionTrajectory.kinematic(v0, a, 4, d).x
    phi = np.linspace(0, 2 * np.pi, 37)
    assert np.max(np.abs(predict_error_4step(x, phi, 0) - predict_error_nstep(x, phi, 0, 4))) < 1e-12


def test_ripple_has_zero_mean_and_double_frequency(phase_grid):
    pred = predict_residual_pbsc3(FIXED_X, 0, 1)
    r = pred.ripple(phase_grid)
    assert abs(r.mean()) < 1e-15
    spectrum = np.abs(np.fft.rfft(r[0]))
    assert np.argmax(spectrum) == 2


def test_pbsc4_linear_and_quadratic_nulls():
    lin = MotionTrajectory.kinematic(0.25, 0.0, 12).x
    quad = MotionTrajectory.kinematic(0.25, 0.125, 12).x
    assert predict_residual_pbsc4(lin, 0, 1).amplitude == 0.0
    assert predict_residual_pbsc4(quad, 0, 2).amplitude == 0.0


def test_pbsc4_frozen_k3():
    pred = predict_residual_pbsc4(FIXED_X, 0, 3)
    # unsigned sum 2**-5 (D4 x0 + D4 x2) = -0.0013125; (-1)**3 refers it to the window start
    assert pred.cos_coeff == pytest.approx(0.0013125, abs=1e-15)


@given(small_x, st.integers(0, 4), st.integers(0, 2))
def test_pbsc4_amplitude_is_difference_sum(x, K, i):
    pred = predict_residual_pbsc4(x, i, K)
    expect = 2.0 ** -(K + 2) * (diff_k(x, K + 1, i) + diff_k(x, K + 1, i + 2))
    assert abs(abs(pred.cos_coeff) - abs(expect)) < 1e-15


def test_pbsc3_examples():
    lin = MotionTrajectory.kinematic(0.25, 0.0, 8).x
    p = predict_residual_pbsc3(lin, 0, 1)
    assert (p.cos_coeff, p.sin_coeff) == (0.0, 0.0)
    a = 0.125
    quad = MotionTrajectory.kinematic(0.25, a, 8).x
    p = predict_residual_pbsc3(quad, 0, 1)
    assert p.cos_coeff == 0.0
    assert p.sin_coeff == pytest.approx(2**-3 * 2 * a, abs=1e-15)
    assert predict_residual_pbsc3(np.zeros(6), 0, 2).amplitude == 0.0
    assert p.dc is None


def test_pbsc3_frozen_k2():
    p = predict_residual_pbsc3(FIXED_X, 0, 2)
    assert p.cos_coeff == pytest.approx(-0.001375, abs=1e-15)
    assert p.sin_coeff == pytest.approx(0.00075, abs=1e-15)


def test_ibsc_frozen_k3():
    assert predict_residual_ibsc(FIXED_X, 3).cos_coeff == pytest.approx(0.0013125, abs=1e-15)


@given(small_x, st.integers(0, 6))
def test_ibsc_magnitude_equals_pbsc4(x, K):
    x = x[: K + 4]
    assert abs(predict_residual_ibsc(x, K).amplitude - predict_residual_pbsc4(x, 0, K).amplitude) < 1e-15


@given(small_x, st.integers(0, 6))
def test_ibsc_direct_sum_equals_closed_form(x, K):
    assert abs(ibsc_ripple_direct(x, K) - predict_residual_ibsc(x, K).cos_coeff) < 1e-12


def test_ibsc_sign_alternates_with_k():
    # every difference of 2**i is positive, so only the (-1)**K factor sets the sign
    x = 1e-3 * 2.0 ** np.arange(12)
    signs = [np.sign(predict_residual_ibsc(x, K).cos_coeff) for K in range(7)]
    assert signs == [1, -1, 1, -1, 1, -1, 1]


def test_predict_residual_dispatch():
    with pytest.raises(ValueError):
        predict_residual("pbsc5", FIXED_X, 1)
    assert predict_residual("ibsc", FIXED_X, 2).method == "ibsc"
    with pytest.raises(IndexError):
        predict_residual_ibsc(FIXED_X[:5], 2)


def test_error_prediction_evaluation():
    e = ErrorPrediction("x", 0, 0.1, 0.2, 0.05)
    assert e.error(0.0) == pytest.approx(0.15)
    assert e.amplitude == pytest.approx(np.hypot(0.1, 0.2))


def test_ripple_error_requires_valid_pixels():
    with pytest.raises(ValueError):
        ripple_error(np.array([np.nan]), np.array([0.0]))


@pytest.mark.parametrize("method", ["pbsc3", "pbsc4", "ibsc"])
def test_rmse_static_is_zero(method):
    p = FringeParams(width=96, height=2)
    rows = rmse_curve(make_ramp_scene(p), p, MotionTrajectory.static(12), None, method, range(6))
    assert all(r[1] < 1e-9 for r in rows)


def test_rmse_requires_quarter_steps():
    p = FringeParams(N=5, width=20, height=1)
    with pytest.raises(ValueError):
        rmse_curve(make_ramp_scene(p), p, MotionTrajectory.static(8), None, "ibsc", [0])


def test_gamma_hurts_3step_more_than_4step():
    from bscpsp.imaging import CaptureConfig

    p = FringeParams(width=240, height=2)
    scene, motion, cfg = make_ramp_scene(p), MotionTrajectory.kinematic(0.25, 0.01, 12), CaptureConfig(gamma=1.15)
    p3 = rmse_curve(scene, p, motion, cfg, "pbsc3", range(7))
    p4 = rmse_curve(scene, p, motion, cfg, "pbsc4", range(7))
    assert all(a[1] > b[1] for a, b in zip(p3, p4))


def test_pbsc_floor_exceeds_its_prediction():
    # the prediction is exactly 0 for uniform acceleration at K >= 2; simulation floors above it
    p = FringeParams(width=240, height=2)
    motion = MotionTrajectory.kinematic(0.25, 0.01, 12)
    rows = rmse_curve(make_ramp_scene(p), p, motion, None, "pbsc4", range(3, 7))
    for K, rmse, _ in rows:
        assert predict_residual_pbsc4(motion.x, 0, K).amplitude < 1e-15
        assert rmse > 1e-4


def test_fidelity_on_simulation(phase_grid):
    x = MotionTrajectory.kinematic(0.0125, 0.004, 8, 3.5).x
    p = FringeParams(width=phase_grid.shape[1], height=1)
    frames = simulate_capture(ScenePhase(phase_grid), p, x).frames
    from bscpsp.bsc import ibsc

    pm = ibsc(frames, 4)
    rip, _ = ripple_error(pm.phase, phase_grid)
    pred = predict_residual_ibsc(x, 4)
    assert pred.amplitude < 1e-15
    assert np.sqrt(np.mean(rip**2)) < 1e-5
