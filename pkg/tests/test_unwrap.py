import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bscpsp.retrieval import TWO_PI, wrap_phase
from bscpsp.unwrap import (
    AbsolutePhaseMap,
    DeploymentScene,
    beat_wavelength,
    deployment_study,
    deployment_trial,
    interleave_schedule,
    number_theory_orders,
    number_theory_orders_bruteforce,
    success_rate,
    true_orders,
    unwrap_heterodyne3,
    unwrap_hierarchical,
    unwrap_number_theory,
)


def test_schedule_single_frequency():
    s = interleave_schedule([1], 4, 2)
    assert s.order == tuple((0, i % 4) for i in range(8))


def test_schedule_two_frequencies_alternate():
    s = interleave_schedule([1, 20], 4, 1)
    assert [f for f, _ in s.order] == [0, 1] * 4


@given(st.integers(1, 3), st.integers(3, 6), st.integers(1, 4))
def test_schedule_invariant(F, N, cycles):
    s = interleave_schedule(list(range(F)), N, cycles)
    for start in range(len(s) - F * N + 1):
        window = s.order[start : start + F * N]
        for j in range(F):
            slots = [i for i, (f, _) in enumerate(window) if f == j]
            assert len(slots) == N
            assert set(np.diff(slots)) <= {F}


def test_schedule_errors():
    with pytest.raises(ValueError):
        interleave_schedule([], 4, 1)
    with pytest.raises(ValueError):
        interleave_schedule([1, 2, 3, 4], 4, 1)


def _ramp(freqs, n=480):
    u = (np.arange(n) + 0.5) / n
    truth = [TWO_PI * f * u for f in freqs]
    return truth, [wrap_phase(t) for t in truth]


def test_hierarchical_examples():
    r = unwrap_hierarchical(np.zeros(1), np.zeros(1), 20)
    assert r.orders.tolist() == [0]
    truth, wrapped = _ramp([1, 20])
    r = unwrap_hierarchical(wrapped[1], wrapped[0], 20)
    assert success_rate(r, true_orders(wrapped[1], truth[1])) == 1.0
    assert np.allclose(r.phase, truth[1], atol=1e-9)


def test_heterodyne_static_exact():
    x = np.arange(480) + 0.5 + 8
    truth = [TWO_PI * x / lam for lam in (22, 24, 26)]
    r = unwrap_heterodyne3(*[wrap_phase(t) for t in truth], field_of_view=496)
    assert success_rate(r, true_orders(wrap_phase(truth[0]), truth[0])) == 1.0


def test_heterodyne_rejects_short_beat_and_bad_order():
    assert beat_wavelength(beat_wavelength(22, 24), beat_wavelength(24, 26)) == pytest.approx(1716)
    z = np.zeros(3)
    with pytest.raises(ValueError):
        unwrap_heterodyne3(z, z, z, (22, 24, 26), field_of_view=2000)
    with pytest.raises(ValueError):
        unwrap_heterodyne3(z, z, z, (24, 22, 26))


def test_number_theory_static_exact():
    truth, wrapped = _ramp([7, 8])
    r = unwrap_number_theory(wrapped[0], wrapped[1], 7, 8)
    assert success_rate(r, true_orders(wrapped[1], truth[1])) == 1.0


def test_number_theory_rejects_non_coprime():
    with pytest.raises(ValueError):
        unwrap_number_theory(np.zeros(2), np.zeros(2), 6, 8)


def test_number_theory_fast_equals_bruteforce_grid():
    g = np.linspace(0, TWO_PI, 41, endpoint=False)
    p1, p2 = np.meshgrid(g + 0.013, g + 0.007)
    k1, k2 = number_theory_orders(p1.ravel(), p2.ravel(), 7, 8)
    for a, b, f1, f2 in zip(p1.ravel(), p2.ravel(), k1, k2):
        assert (f1, f2) == number_theory_orders_bruteforce(a, b, 7, 8)


@given(st.floats(0, TWO_PI, exclude_max=True), st.floats(0, TWO_PI, exclude_max=True), st.sampled_from([(3, 4), (5, 7), (7, 8), (9, 11)]))
def test_number_theory_fast_equals_bruteforce_random(a, b, f):
    k1, k2 = number_theory_orders(np.array([a]), np.array([b]), *f)
    r_fast = abs((a + TWO_PI * k1[0]) / f[0] - (b + TWO_PI * k2[0]) / f[1])
    b1, b2 = number_theory_orders_bruteforce(a, b, *f)
    r_brute = abs((a + TWO_PI * b1) / f[0] - (b + TWO_PI * b2) / f[1])
    assert r_fast <= r_brute + 1e-12


def test_success_rate_examples():
    wrapped = np.zeros(4)
    r = AbsolutePhaseMap(wrapped + TWO_PI * np.array([0, 1, 2, 3]), [0, 1, 2, 3], np.ones(4, bool), wrapped)
    assert success_rate(r, [0, 1, 2, 3]) == 1.0
    assert success_rate(r, [1, 2, 3, 4]) == 0.0
    assert success_rate(r, [0, 1, 0, 0]) == 0.5
    with pytest.raises(ValueError):
        success_rate(r, [0, 1])


def test_absolute_map_consistency_checked():
    with pytest.raises(ArithmeticError):
        AbsolutePhaseMap(np.array([1.0]), [1], np.array([True]), np.array([0.5]))


@pytest.mark.parametrize("method", ["number_theory", "heterodyne", "hierarchical"])
def test_static_deployment_is_exact(method):
    assert deployment_trial(method, "ibsc", 0, v0=0.0, a=0.0) == 1.0
    assert deployment_trial(method, "pbsc", 2, v0=0.0, a=0.0) == 1.0


def test_deployment_table_shape():
    table = {}
    for m in ("number_theory", "heterodyne", "hierarchical"):
        for b in ("pbsc", "ibsc"):
            for _, _, K, sr in deployment_study(m, b):
                table[m, b, K] = sr
    for m in ("number_theory", "heterodyne", "hierarchical"):
        assert table[m, "pbsc", 0] == table[m, "ibsc", 0]
        for b in ("pbsc", "ibsc"):
            assert table[m, b, 4] == 1.0
            assert table[m, b, 3] == 1.0
            assert table[m, b, 0] < 1.0
    assert table["hierarchical", "pbsc", 0] < 0.9


def test_deployment_rejects_unknown():
    with pytest.raises(ValueError):
        deployment_study("spatial", "ibsc")
    with pytest.raises(ValueError):
        deployment_study("heterodyne", "xbsc")


def test_deployment_scene_positions():
    s = DeploymentScene()
    phases = s.absolute_phases("heterodyne")
    assert len(phases) == 3
    assert phases[0].min() > 0
