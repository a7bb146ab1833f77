import numpy as np
import pytest

from invset.dynamics import euler_disk_radius
from invset.geometry import hausdorff_exact
from invset.verify import distance_to_disk, distance_to_segment, reference, reference_from_spec, report_quality


def test_interval_grid_spacing():
    ref = reference("IntervalGrid", {"a": 0.0, "b": 1.0, "N": 10_000})
    x = ref.sample.points.ravel()
    assert len(x) == 10_000 and x[0] == 0.0 and x[-1] == 1.0
    np.testing.assert_allclose(np.diff(x), 1 / 9_999, rtol=1e-9)


def test_singleton_reduces_to_max_abs(rng):
    X = rng.uniform(-1, 1, size=(15, 1))
    ref = reference("PointSingleton", {"point": [0.0]})
    d_h, d_fwd, d_bwd = report_quality(X, ref)
    assert d_h == pytest.approx(np.max(np.abs(X)))
    assert d_fwd == pytest.approx(np.min(np.abs(X)))


def test_report_quality_identity():
    ref = reference("SegmentGrid", {"N": 101})
    assert report_quality(ref.sample, ref) == (0.0, 0.0, 0.0)


def test_single_point_against_interval():
    ref = reference("IntervalGrid", {"N": 10_000})
    d_h, d_fwd, d_bwd = report_quality([[0.5]], ref)
    assert d_fwd == pytest.approx(0.5)
    assert d_bwd <= 1 / 9_999
    assert d_h == max(d_fwd, d_bwd)


def test_dh_is_max_of_one_sided(rng):
    ref = reference("DiskSample", {"N": 2000})
    for _ in range(10):
        X = rng.uniform(-1.5, 1.5, size=(50, 2))
        d_h, d_fwd, d_bwd = report_quality(X, ref)
        assert d_h == max(d_fwd, d_bwd)
        assert d_h == pytest.approx(hausdorff_exact(X, ref.sample))


def test_disk_sample_in_disk_and_gap():
    N = 5000
    ref = reference("DiskSample", {"N": N})
    r = euler_disk_radius()
    assert ref.meta["radius"] == pytest.approx(0.997490, abs=1e-6)
    assert np.all(np.linalg.norm(ref.sample.points, axis=1) <= r + 1e-12)
    # the largest hole: probe the disk densely and measure distance to the sample
    probe = reference("DiskSample", {"N": 40_000}).sample.points
    gap = report_quality(probe, ref)[2]
    assert gap <= 2 * np.sqrt(np.pi * r * r / N)


def test_henon_trajectory_sample_bounded():
    ref = reference("TrajectorySample", {"map": "henon", "params": {"a": 1.3, "b": 0.3},
                                         "transient": 1000, "samples": 100_000})
    assert ref.sample.n == 100_000
    assert np.all(np.abs(ref.sample.points) <= 2.0)


def test_segment_and_disk_distances():
    np.testing.assert_allclose(distance_to_segment([[0.0, 0.0], [2.0, 0.0], [0.5, -0.3], [-1.3, 0.4]]),
                               [0.0, 1.0, 0.3, 0.5])
    np.testing.assert_allclose(distance_to_disk([[0.0, 0.0], [3.0, 4.0]], 1.0), [0.0, 4.0])


def test_invalid_reference():
    with pytest.raises(ValueError):
        reference("Torus", {})
    with pytest.raises(ValueError):
        reference("PointSingleton", {})
    with pytest.raises(ValueError):
        reference("IntervalGrid", {"a": 1.0, "b": 0.0})
    with pytest.raises(ValueError):
        reference_from_spec({"N": 3})
