"""Concrete model spaces: scaled Minkowski, linear subspaces, regions and curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import qmc

from .core import CausalSpace, as_point

__all__ = [
    "MinkowskiSpace",
    "LinearSubspace",
    "SubspaceRestriction",
    "classify_subspace",
    "restrict_to_subspace",
    "lorentz_boost",
    "BoxRegion",
    "SubspaceCubeRegion",
    "CurveRegion",
    "PointCloudRegion",
    "PiecewiseLinearCurve",
    "DegenerateBasisError",
]

GRAM_TOL = 1e-10


class DegenerateBasisError(ValueError):
    """Raised when a subspace basis is rank deficient."""


@dataclass(frozen=True)
class MinkowskiSpace(CausalSpace):
    """Flat space with metric -C^2 dt^2 + dx_1^2 + ... on R^n, cone scale C >= 1.

    Coordinate 0 is time and increasing time is the future direction.
    """

    n: int
    C: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least one time and one space coordinate, got n={self.n}")
        if self.C <= 0:
            raise ValueError(f"cone scale must be positive, got {self.C}")

    @property
    def dimension(self) -> int:
        return self.n

    def metric_matrix(self) -> np.ndarray:
        eta = np.eye(self.n)
        eta[0, 0] = -self.C ** 2
        return eta

    def dist(self, p, q) -> float:
        return float(np.linalg.norm(np.asarray(q, dtype=float) - np.asarray(p, dtype=float)))

    def _split(self, p, q):
        dp = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
        return dp[0], float(np.linalg.norm(dp[1:]))

    def causal(self, p, q) -> bool:
        dt, dx = self._split(p, q)
        return dt >= 0.0 and (self.C * dt) ** 2 >= dx ** 2

    def chron(self, p, q) -> bool:
        dt, dx = self._split(p, q)
        return dt > 0.0 and (self.C * dt) ** 2 > dx ** 2

    def time_sep(self, p, q) -> float:
        dt, dx = self._split(p, q)
        if dt < 0.0 or (self.C * dt) ** 2 < dx ** 2:
            return 0.0
        return math.sqrt(max((self.C * dt) ** 2 - dx ** 2, 0.0))

    def diam_bound(self, p, q) -> float:
        """Euclidean diameter of J(p, q) from its extreme points.

        The diamond is the convex hull of the two tips and the waist spheroid
        (the set where both cone constraints are tight); the diameter is
        realized between extreme points, which we enumerate in closed form and
        refine with a parametric sweep of the waist.
        """
        dt, dx = self._split(p, q)
        if dt < 0.0 or (self.C * dt) ** 2 < dx ** 2:
            return 0.0
        tau = self.time_sep(p, q)
        tips = math.hypot(dt, dx)
        axial = math.hypot(dx / self.C, self.C * dt)
        best = max(tips, axial, tau)
        if tau > 0.0 and dx > 0.0:
            best = max(best, self._waist_sweep(dt, dx, tau))
        return best

    def _waist_sweep(self, dt: float, dx: float, tau: float) -> float:
        # Reduced (u, rho, t) coordinates: u along the spatial displacement,
        # rho a transverse radius, t = |(u, rho)| / C on the lower cone.
        a = 0.5 * self.C * dt
        b = 0.5 * tau
        phi = np.linspace(0.0, 2.0 * math.pi, 257)
        u = 0.5 * dx + a * np.cos(phi)
        rho = b * np.sin(phi)
        t = np.hypot(u, rho) / self.C
        pts = np.stack([t, u, rho], axis=1)
        # waist-to-waist, with transverse components aligned or opposed
        d2 = 0.0
        for sgn in (1.0, -1.0):
            diff_t = t[:, None] - t[None, :]
            diff_u = u[:, None] - u[None, :]
            diff_r = rho[:, None] - sgn * rho[None, :]
            d2 = max(d2, float(np.max(diff_t ** 2 + diff_u ** 2 + diff_r ** 2)))
        # tips to waist
        for tip in (np.array([0.0, 0.0, 0.0]), np.array([dt, dx, 0.0])):
            d2 = max(d2, float(np.max(np.sum((pts - tip) ** 2, axis=1))))
        return math.sqrt(d2)


def lorentz_boost(v: float, axis: int = 1, n: int = 2) -> np.ndarray:
    """Determinant-one boost of rapidity atanh(v) along the given spatial axis.

    Units with cone scale C = 1; |v| < 1 required.
    """
    if abs(v) >= 1.0:
        raise ValueError(f"boost velocity must satisfy |v| < 1, got {v}")
    if not 1 <= axis < n:
        raise ValueError(f"axis must be a spatial index in [1, {n}), got {axis}")
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    L = np.eye(n)
    L[0, 0] = L[axis, axis] = gamma
    L[0, axis] = L[axis, 0] = gamma * v
    return L


def classify_subspace(basis, ambient: MinkowskiSpace) -> str:
    """Signature class of span(basis) from the eigenvalues of its Gram matrix."""
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    if B.shape[1] != ambient.n:
        raise ValueError(f"basis vectors must have {ambient.n} components")
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[-1] <= GRAM_TOL * max(sv[0], 1.0):
        raise DegenerateBasisError("basis is rank deficient within tolerance 1e-10")
    gram = B @ ambient.metric_matrix() @ B.T
    eig = np.linalg.eigvalsh(gram)
    tol = GRAM_TOL * max(1.0, float(np.max(np.abs(eig))))
    if np.all(eig > tol):
        return "spacelike"
    if np.any(eig < -tol):
        return "timelike"
    return "null-degenerate"


@dataclass(frozen=True)
class LinearSubspace:
    """k-dimensional linear subspace of a Minkowski space with induced structure."""

    ambient: MinkowskiSpace
    basis: np.ndarray
    signature_class: str = field(init=False)

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "signature_class", classify_subspace(B, self.ambient))

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    def embed(self, coeffs) -> np.ndarray:
        """Map subspace coefficients to ambient coordinates."""
        return np.asarray(coeffs, dtype=float) @ self.basis

    def gram(self) -> np.ndarray:
        return self.basis @ self.ambient.metric_matrix() @ self.basis.T

    def euclidean_gram(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def contains(self, p, tol: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        coeffs, res, _, _ = np.linalg.lstsq(self.basis.T, p, rcond=None)
        return float(np.linalg.norm(self.basis.T @ coeffs - p)) <= tol * max(1.0, float(np.linalg.norm(p)))

    def timelike_normal(self) -> np.ndarray:
        """Future-directed unit timelike vector eta-orthogonal to a spacelike subspace."""
        if self.signature_class != "spacelike":
            raise ValueError("timelike normal requires a spacelike subspace")
        eta = self.ambient.metric_matrix()
        # null space of (B eta)^T applied to candidates: solve for v with B eta v = 0
        A = self.basis @ eta
        _, _, vt = np.linalg.svd(A)
        null_basis = vt[self.k:]
        # pick the direction with a timelike component: minimize eta(v, v)
        G = null_basis @ eta @ null_basis.T
        w, vecs = np.linalg.eigh(G)
        v = null_basis.T @ vecs[:, 0]
        norm2 = -float(v @ eta @ v)
        if norm2 <= 0:
            raise ValueError("no timelike direction orthogonal to subspace")
        v = v / math.sqrt(norm2)
        if v[0] < 0:
            v = -v
        return v


class SubspaceRestriction(CausalSpace):
    """Causal structure induced on a linear subspace by its ambient Minkowski space.

    Points are ambient coordinates constrained to the subspace; relations,
    time separation and the background Euclidean distance are the ambient ones.
    """

    def __init__(self, subspace: LinearSubspace):
        self.subspace = subspace
        self.ambient = subspace.ambient
        self.dimension = self.ambient.n

    def dist(self, p, q) -> float:
        return self.ambient.dist(p, q)

    def chron(self, p, q) -> bool:
        return self.ambient.chron(p, q)

    def causal(self, p, q) -> bool:
        return self.ambient.causal(p, q)

    def time_sep(self, p, q) -> float:
        return self.ambient.time_sep(p, q)

    def diam_bound(self, p, q) -> float:
        return self.ambient.diam_bound(p, q)


def restrict_to_subspace(sub: LinearSubspace) -> SubspaceRestriction:
    return SubspaceRestriction(sub)


# ---------------------------------------------------------------------------
# Regions


class BoxRegion:
    """Axis-aligned coordinate box in an ambient space."""

    kind = "box"

    def __init__(self, space: CausalSpace, lo, hi):
        self.space = space
        self.lo = as_point(lo)
        self.hi = as_point(hi)
        if np.any(self.hi < self.lo):
            raise ValueError("box corners must satisfy lo <= hi")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def membership(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo - 1e-12) and np.all(p <= self.hi + 1e-12))

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        eng = qmc.Halton(d=self.dim, scramble=True, seed=seed)
        u = eng.random(count)
        return self.lo + u * (self.hi - self.lo)


class SubspaceCubeRegion:
    """Cube [-h, h]^k in subspace coefficients, embedded into the ambient space."""

    kind = "subspaceCube"

    def __init__(self, restriction: SubspaceRestriction, half_side: float = 1.0):
        self.space = restriction
        self.subspace = restriction.subspace
        self.half_side = float(half_side)

    @property
    def k(self) -> int:
        return self.subspace.k

    def membership(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        coeffs, _, _, _ = np.linalg.lstsq(self.subspace.basis.T, p, rcond=None)
        on_plane = float(np.linalg.norm(self.subspace.basis.T @ coeffs - p)) <= 1e-9
        return on_plane and bool(np.all(np.abs(coeffs) <= self.half_side + 1e-12))

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        eng = qmc.Halton(d=self.k, scramble=True, seed=seed)
        c = (2.0 * eng.random(count) - 1.0) * self.half_side
        return c @ self.subspace.basis


class CurveRegion:
    """Image of a piecewise linear causal curve."""

    kind = "curveImage"

    def __init__(self, curve: "PiecewiseLinearCurve"):
        self.space = curve.space
        self.curve = curve

    def membership(self, p, tol: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        for a, b in zip(self.curve.vertices[:-1], self.curve.vertices[1:]):
            d = b - a
            L2 = float(d @ d)
            t = 0.0 if L2 == 0.0 else float(np.clip((p - a) @ d / L2, 0.0, 1.0))
            if np.linalg.norm(a + t * d - p) <= tol:
                return True
        return False

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        ts = (np.arange(count) + 0.5) / count
        return np.array([self.curve.point(t) for t in ts])


class PointCloudRegion:
    """Explicit finite point set (finite truncation of a countable set)."""

    kind = "pointCloud"

    def __init__(self, space: CausalSpace, points):
        self.space = space
        self.points = np.atleast_2d(np.asarray(points, dtype=float))

    def membership(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.any(np.linalg.norm(self.points - p, axis=1) <= 1e-12))

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        idx = np.arange(count) % len(self.points)
        return self.points[idx]


# ---------------------------------------------------------------------------
# Curves


class PiecewiseLinearCurve:
    """Future-directed causal polygonal curve, parametrized uniformly on [0, 1]."""

    def __init__(self, space: CausalSpace, vertices):
        self.space = space
        self.vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        if len(self.vertices) < 2:
            raise ValueError("curve needs at least two vertices")
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            if np.array_equal(a, b):
                raise ValueError("repeated consecutive vertices")
            if not space.causal(a, b):
                raise ValueError(f"consecutive vertices not causally related: {a} -> {b}")

    @cached_property
    def causality_class(self) -> str:
        m = len(self.vertices)
        any_chron = False
        all_consecutive_chron = True
        for i in range(m):
            for j in range(i + 1, m):
                if self.space.chron(self.vertices[i], self.vertices[j]):
                    any_chron = True
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            if not self.space.chron(a, b):
                all_consecutive_chron = False
        if not any_chron:
            return "null"
        if all_consecutive_chron:
            return "timelike"
        return "causal-mixed"

    def point(self, t: float) -> np.ndarray:
        """Evaluate at parameter t in [0, 1] (uniform vertex spacing)."""
        t = min(max(float(t), 0.0), 1.0)
        m = len(self.vertices) - 1
        s = t * m
        i = min(int(s), m - 1)
        frac = s - i
        return (1.0 - frac) * self.vertices[i] + frac * self.vertices[i + 1]

    def resample(self, points_per_leg: int) -> "PiecewiseLinearCurve":
        """Same polygonal image with each leg subdivided into equal pieces."""
        verts = [self.vertices[0]]
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            for j in range(1, points_per_leg + 1):
                verts.append(a + (b - a) * j / points_per_leg)
        return PiecewiseLinearCurve(self.space, np.array(verts))
