"""Causal-space capability, causal diamonds and the normalized diamond volume.

The normalization constant makes the N-th power of the time separation of a
diamond equal to the Lebesgue volume of a causal diamond with the same time
separation in N-dimensional Minkowski space (integer N >= 2).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CausalSpace",
    "CausalDiamond",
    "omega",
    "rho",
    "make_diamond",
    "as_point",
]


def as_point(coords) -> np.ndarray:
    """Coerce chart coordinates to a float vector (coordinate 0 is time)."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"point must be a flat coordinate sequence, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite entries: {p}")
    return p


class CausalSpace(ABC):
    """Background distance, causal relations and time separation on a chart domain.

    Implementations must keep `causal` reflexive and transitive, `chron` a
    subrelation of `causal`, and `time_sep` compatible with both: it vanishes
    off the causal relation, is positive exactly on the chronological one, and
    satisfies the reverse triangle inequality
    time_sep(p, r) >= time_sep(p, q) + time_sep(q, r) for p <= q <= r.
    """

    #: ambient coordinate dimension
    dimension: int

    def check_point(self, p) -> np.ndarray:
        p = as_point(p)
        if len(p) != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {len(p)}")
        return p

    @abstractmethod
    def dist(self, p, q) -> float:
        """Background metric distance d(p, q) >= 0."""

    @abstractmethod
    def chron(self, p, q) -> bool:
        """Chronological relation p << q."""

    @abstractmethod
    def causal(self, p, q) -> bool:
        """Causal relation p <= q (reflexive)."""

    @abstractmethod
    def time_sep(self, p, q) -> float:
        """Time separation tau(p, q) in [0, inf]."""

    def diam_bound(self, p, q) -> float:
        """Upper bound on the d-diameter of the diamond J(p, q).

        Default: sampled Lipschitz-style bound is not available abstractly, so
        concrete spaces override with a closed form where they have one.
        """
        raise NotImplementedError


@dataclass(frozen=True)
class CausalDiamond:
    """Causal diamond J(p, q) with cached time separation and diameter bound."""

    space: CausalSpace = field(repr=False)
    p: np.ndarray
    q: np.ndarray
    tau: float
    diam_bound: float
    empty: bool = False

    def contains(self, z) -> bool:
        """Membership z in J(p, q) via the space's causal relation."""
        if self.empty:
            return False
        return self.space.causal(self.p, z) and self.space.causal(z, self.q)


def omega(N: float) -> float:
    """Normalizing constant for the N-dimensional diamond volume.

    Evaluated through log-gamma so large N does not overflow.
    """
    if N < 0:
        raise ValueError(f"dimension parameter must be >= 0, got {N}")
    if N == 0:
        raise ValueError("omega(0) is undefined; rho handles N = 0 directly")
    log_w = 0.5 * (N - 1.0) * math.log(math.pi) - math.log(N) \
        - math.lgamma(0.5 * (N + 1.0)) - (N - 1.0) * math.log(2.0)
    return math.exp(log_w)


def rho(N: float, diamond: CausalDiamond) -> float:
    """Normalized diamond volume omega_N * tau^N, with the edge-case conventions.

    Empty diamond -> 0; N = 0 on a nonempty diamond -> 1 (counting measure);
    infinite time separation propagates to +inf for N > 0.
    """
    if N < 0:
        raise ValueError(f"dimension parameter must be >= 0, got {N}")
    if diamond.empty:
        return 0.0
    if N == 0:
        return 1.0
    if math.isinf(diamond.tau):
        return math.inf
    if diamond.tau == 0.0:
        return 0.0
    return omega(N) * diamond.tau ** N


def make_diamond(space: CausalSpace, p, q) -> CausalDiamond:
    """Build J(p, q), flagging it empty when p, q are not causally related."""
    p = space.check_point(p)
    q = space.check_point(q)
    if not space.causal(p, q):
        return CausalDiamond(space, p, q, tau=0.0, diam_bound=0.0, empty=True)
    tau = space.time_sep(p, q)
    return CausalDiamond(space, p, q, tau=tau, diam_bound=space.diam_bound(p, q))
