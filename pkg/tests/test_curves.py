"""tau-length of polygonal causal curves and its agreement with V^1."""
import numpy as np
import pytest

from lorvol import (
    MinkowskiSpace,
    PiecewiseLinearCurve,
    compare_length_measure,
    is_null_curve,
    partition_sum,
    tau_length,
)


@pytest.fixture
def space():
    return MinkowskiSpace(2)


def test_unit_timelike_segment(space):
    curve = PiecewiseLinearCurve(space, [[0, 0], [1, 0]])
    assert tau_length(curve) == pytest.approx(1.0, abs=1e-6)
    for pieces in (1, 2, 7, 64):
        assert partition_sum(curve, pieces) == pytest.approx(1.0, abs=1e-12)


def test_tilted_geodesic_length(space):
    # proper time of the chord (0,0) -> (2,1) is sqrt(3)
    curve = PiecewiseLinearCurve(space, [[0, 0], [2, 1]])
    assert tau_length(curve) == pytest.approx(np.sqrt(3.0), abs=1e-6)


def test_null_segment_zero_length(space):
    curve = PiecewiseLinearCurve(space, [[0, 0], [1, 1]])
    assert is_null_curve(curve)
    assert tau_length(curve) == 0.0


def test_null_zigzag_refines_to_zero(space):
    """The chord sum of a null zig-zag collapses under dyadic refinement."""
    curve = PiecewiseLinearCurve(space, [[0, 0], [0.5, 0.5], [1.0, 0.0]])
    L, trace = tau_length(curve, return_trace=True)
    assert L < 1e-3
    sums = [s for _, _, s in trace.levels]
    assert sums[0] == pytest.approx(1.0)  # single chord sees the full tau
    assert all(b <= a + 1e-12 for a, b in zip(sums, sums[1:]))


def test_partition_sums_nonincreasing(space):
    """Reverse triangle inequality: refining a partition cannot increase the sum."""
    curve = PiecewiseLinearCurve(space, [[0, 0], [1, 0.6], [2, 0.0], [3, -0.4]])
    sums = [partition_sum(curve, 2 ** k) for k in range(8)]
    assert all(b <= a + 1e-12 for a, b in zip(sums, sums[1:]))


def test_length_invariant_under_resampling(space):
    curve = PiecewiseLinearCurve(space, [[0, 0], [1, 0.4], [2, 0.1]])
    fine = curve.resample(64)
    assert tau_length(fine) == pytest.approx(tau_length(curve), abs=1e-6)


def test_compare_length_measure_equality(space):
    """V^1 chain-cover upper bound matches L_tau for a geodesic segment."""
    curve = PiecewiseLinearCurve(space, [[0, 0], [1, 0]])
    out = compare_length_measure(curve, [0.5, 0.25, 0.125, 0.0625])
    assert out["L_tau"] == pytest.approx(1.0, abs=1e-6)
    for v in out["V1upper"].values():
        assert v >= out["L_tau"] - 1e-6
        assert v == pytest.approx(1.0, abs=1e-6)
