"""Time-separation length of causal curves by dyadic partition refinement."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .measure import cover_cost, curve_chain_cover
from .spaces import PiecewiseLinearCurve

__all__ = [
    "PartitionSumTrace",
    "InvalidCurveError",
    "partition_sum",
    "tau_length",
    "is_null_curve",
    "compare_length_measure",
]


class InvalidCurveError(ValueError):
    """A partition exposed a consecutive pair that is not causally related."""


@dataclass
class PartitionSumTrace:
    """Refinement levels with partition mesh and sum of consecutive separations.

    Sums are nonincreasing level to level: refining a partition can only lower
    the sum by the reverse triangle inequality.
    """

    levels: list = field(default_factory=list)  # (level, mesh, sum)

    def add(self, level, mesh, total):
        self.levels.append((int(level), float(mesh), float(total)))

    def final_sum(self) -> float:
        return self.levels[-1][2]

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write("level,mesh,sum\n")
            for level, mesh, total in self.levels:
                f.write(f"{level},{mesh:.17g},{total:.17g}\n")


def partition_sum(curve: PiecewiseLinearCurve, pieces: int) -> float:
    """Sum of tau over the uniform partition of [0, 1] into the given pieces."""
    params = np.linspace(0.0, 1.0, pieces + 1)
    pts = [curve.point(t) for t in params]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if not curve.space.causal(a, b):
            raise InvalidCurveError(f"partition pair not causally related: {a} -> {b}")
        total += curve.space.time_sep(a, b)
    return total


def tau_length(curve: PiecewiseLinearCurve, tol: float = 1e-6,
               return_trace: bool = False):
    """Infimum of partition sums of tau, approximated by dyadic refinement.

    Refines until two successive dyadic sums agree within tol and returns the
    last sum, an upper bound on the true length within tol of the limit when
    tau is continuous along the curve.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    trace = PartitionSumTrace()
    pieces = 1
    prev = partition_sum(curve, pieces)
    trace.add(0, 1.0, prev)
    level = 0
    while True:
        level += 1
        pieces *= 2
        cur = partition_sum(curve, pieces)
        trace.add(level, 1.0 / pieces, cur)
        if abs(prev - cur) < tol:
            break
        prev = cur
        if level > 40:
            raise RuntimeError("partition refinement did not stabilize")
    value = trace.final_sum()
    return (value, trace) if return_trace else value


def is_null_curve(curve: PiecewiseLinearCurve, sample_count: int = 64) -> bool:
    """True iff no sampled parameter pair s < t is chronologically related."""
    params = np.linspace(0.0, 1.0, sample_count)
    pts = [curve.point(t) for t in params]
    for i in range(len(pts)):
        for jj in range(i + 1, len(pts)):
            if curve.space.chron(pts[i], pts[jj]):
                return False
    return True


def compare_length_measure(curve: PiecewiseLinearCurve, delta_grid,
                           tol: float = 1e-6) -> dict:
    """tau-length against chain-cover V^1 upper bounds over a delta grid.

    In Minkowski space the diamonds are closed and the two notions agree; the
    chain-cover cost can never exceed the length beyond tol.
    """
    L = tau_length(curve, tol=tol)
    v1 = {}
    for delta in delta_grid:
        cover = curve_chain_cover(curve, float(delta))
        cover.verify()
        cost = cover_cost(cover, 1.0)
        if cost > L + tol:
            raise AssertionError(
                f"chain cover cost {cost} exceeds tau-length {L} at delta={delta}")
        v1[float(delta)] = cost
    return {"L_tau": L, "V1upper": v1}
