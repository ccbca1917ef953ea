import numpy as np
import pytest

from solitonkit.sampling import distance_estimate, sample_points

BOX = ([-1.0, -1.0], [1.0, 1.0])


def circle(x):
    return x[0] * x[0] + x[1] * x[1] - 0.25


def test_deterministic_for_a_seed():
    a = sample_points(BOX, 20, seed=4)
    b = sample_points(BOX, 20, seed=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_points(BOX, 20, seed=5))


def test_points_lie_in_the_box():
    pts = sample_points(([0.1, 2.0, -3.0], [0.9, 2.5, 3.0]), 50, seed=1)
    assert pts.shape == (50, 3)
    assert np.all(pts >= [0.1, 2.0, -3.0]) and np.all(pts <= [0.9, 2.5, 3.0])


def test_margin_from_excluded_set():
    pts = sample_points(BOX, 64, seed=2, excluded=[circle], margin=0.05)
    r = np.hypot(pts[:, 0], pts[:, 1])
    # |h| / |grad h| = |r^2 - 1/4| / (2r) underestimates |r - 1/2| by at most a factor (r + 1/2) / 2r
    assert np.all(np.abs(r - 0.5) >= 0.05 * 0.9)


def test_distance_estimate():
    assert distance_estimate(circle, [1.0, 0.0]) == pytest.approx(0.375)
    assert distance_estimate(circle, [0.5, 0.0]) == 0.0
    assert distance_estimate(lambda x: 1.0 + 0 * x[0], [0.3, 0.3]) == np.inf


@pytest.mark.parametrize("count", [0, -3])
def test_count_validation(count):
    with pytest.raises(ValueError):
        sample_points(BOX, count)


def test_hopeless_exclusion_raises():
    with pytest.raises(RuntimeError, match="admissible"):
        sample_points(BOX, 4, excluded=[lambda x: 0 * x[0]], max_draws=40)
