"""Diamond-cover upper bounds, mass-distribution lower bounds and dimension fits.

The infimal cover cost over all countable diamond covers is not computable;
everything here reports generator-constrained upper bounds and Frostman-style
statistical lower bounds, which is exactly the pair of techniques the theory
uses to pin dimensions down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CausalDiamond, CausalSpace, make_diamond, omega
from .spaces import (
    BoxRegion,
    CurveRegion,
    MinkowskiSpace,
    PiecewiseLinearCurve,
    PointCloudRegion,
    SubspaceCubeRegion,
    SubspaceRestriction,
)

__all__ = [
    "Cover",
    "ScalingSeries",
    "DimensionEstimate",
    "MassDistribution",
    "UnverifiedCoverError",
    "GeneratorError",
    "BracketNotFoundError",
    "cover_cost",
    "grid_cover",
    "null_cover",
    "box_cover",
    "point_cover",
    "curve_chain_cover",
    "upper_measure",
    "lower_measure",
    "estimate_dimension",
    "uniform_on_cube",
    "uniform_on_box",
    "length_on_curve",
    "NULL_EPS_GRID",
]

COVERAGE_THRESHOLD = 0.999
COVERAGE_SAMPLES = 2000

#: exponent grid for the null-subspace cover family; small exponents pin the
#: scaling crossover near k - 1 but are only float-sound at coarse scales
NULL_EPS_GRID = (0.1, 0.15, 0.2, 0.35, 0.5, 0.65, 0.8)


class UnverifiedCoverError(RuntimeError):
    """Cover cost was requested before statistical coverage verification."""


class GeneratorError(RuntimeError):
    """No applicable cover generator, or a generator fed the wrong region kind."""


class BracketNotFoundError(RuntimeError):
    """All fitted scaling slopes have the same sign on the N grid."""

    def __init__(self, message, slopes=None):
        super().__init__(message)
        self.slopes = slopes or {}


# ---------------------------------------------------------------------------
# Covers


@dataclass
class Cover:
    """A delta-scale diamond cover of a region.

    Diamonds with equal time separation are stored as (tau, count) groups so
    fine-scale covers with astronomically many cells stay cheap; membership of
    a point in some diamond of the cover is decided by `covers_point`.
    """

    region: object
    scale: float
    groups: list  # [(tau, count)]
    covers_point: callable
    generator: str
    diamonds: list = field(default_factory=list)  # explicit, when small
    verified: bool = False

    @property
    def size(self) -> int:
        return int(sum(c for _, c in self.groups))

    def verify(self, sample_count: int = COVERAGE_SAMPLES, seed: int = 0) -> bool:
        """Quasi-random coverage check: >= 99.9% of region samples must be covered."""
        pts = self.region.sample(sample_count, seed=seed)
        hit = sum(1 for p in pts if self.covers_point(p))
        self.verified = hit >= COVERAGE_THRESHOLD * len(pts)
        return self.verified

    @staticmethod
    def from_diamonds(region, scale, diamonds, generator) -> "Cover":
        diamonds = [d for d in diamonds if not d.empty]
        groups = [(d.tau, 1) for d in diamonds]

        def covers_point(p):
            return any(d.contains(p) for d in diamonds)

        return Cover(region, scale, groups, covers_point, generator, diamonds=diamonds)


def _group_cost(groups, N: float) -> float:
    if N == 0:
        return float(sum(c for _, c in groups))
    w = omega(N)
    total = 0.0
    for tau, count in groups:
        if math.isinf(tau):
            return math.inf
        if tau > 0.0:
            total += count * w * tau ** N
    return total


def cover_cost(cover: Cover, N: float) -> float:
    """Sum of normalized diamond volumes of a verified cover (upper bound material)."""
    if not cover.verified:
        raise UnverifiedCoverError(
            f"cover from generator {cover.generator!r} has not passed coverage verification"
        )
    return _group_cost(cover.groups, N)


# ---------------------------------------------------------------------------
# Generators


def grid_cover(region: SubspaceCubeRegion, delta: float, j: int | None = None) -> Cover:
    """Cover a cube in a spacelike k-subspace by j^k on-axis diamonds.

    Each subcube of side 2h/j is covered by the diamond whose tips sit at the
    cell midpoint displaced by +- the circumscribed radius along the timelike
    normal of the subspace; the time separation of every cell diamond is twice
    that radius.
    """
    if not isinstance(region, SubspaceCubeRegion):
        raise GeneratorError("grid_cover needs a subspaceCube region")
    sub = region.subspace
    if sub.signature_class != "spacelike":
        raise GeneratorError(
            f"grid_cover needs a spacelike subspace, got {sub.signature_class}"
        )
    if delta <= 0:
        raise ValueError("delta must be positive")
    space = region.space
    nu = sub.timelike_normal()
    G = sub.euclidean_gram()
    h = region.half_side
    k = sub.k

    # circumscribed radius of a coefficient cell of side 2h/j, in the induced metric
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * k)).reshape(k, -1).T
    corner_norm = math.sqrt(max(float(s @ G @ s) for s in signs))

    def cell_diamond_diam(j: int) -> float:
        r = corner_norm * h / j
        center = sub.embed(np.zeros(k))
        return make_diamond(space, center - r * nu, center + r * nu).diam_bound

    if j is None:
        j = 1
        while cell_diamond_diam(j) > delta:
            j *= 2
        lo_j, hi_j = max(1, j // 2), j
        while lo_j < hi_j:
            mid = (lo_j + hi_j) // 2
            if cell_diamond_diam(mid) > delta:
                lo_j = mid + 1
            else:
                hi_j = mid
        j = hi_j
    r = corner_norm * h / j
    tau = 2.0 * r
    cell = 2.0 * h / j
    pinv = np.linalg.pinv(sub.basis.T)

    def covers_point(p):
        p = np.asarray(p, dtype=float)
        coeffs = pinv @ p
        idx = np.clip(np.floor((coeffs + h) / cell), 0, j - 1)
        center = sub.embed(-h + (idx + 0.5) * cell)
        return space.causal(center - r * nu, p) and space.causal(p, center + r * nu)

    return Cover(region, delta, [(tau, j ** k)], covers_point, "grid")


def _null_frame(sub):
    """Adapted frame of a null-degenerate subspace: Euclid-unit null direction
    plus a Euclid-orthonormal spacelike complement inside the subspace."""
    G = sub.gram()
    w, vecs = np.linalg.eigh(G)
    nu = sub.embed(vecs[:, 0])
    nu = nu / np.linalg.norm(nu)
    if nu[0] < 0:
        nu = -nu
    rest = [sub.embed(vecs[:, i]) for i in range(1, sub.k)]
    frame = []
    for v in rest:
        v = v - (v @ nu) * nu
        for u in frame:
            v = v - (v @ u) * u
        frame.append(v / np.linalg.norm(v))
    return nu, frame


def null_cover(region: SubspaceCubeRegion, delta: float, eps: float) -> Cover:
    """Cover a cube in a null-degenerate k-subspace by thin tilted diamonds.

    The template diamond has axis delta/2 * nu + t * e_t with t =
    (delta/2)^(-1+2/eps); its intersection with the subspace is a thin slab
    around the null direction, and translates of the box inscribed in that
    slab tile the cube. All template quantities (time separation, inscribed
    extents) are evaluated in closed form in the adapted frame: the naive
    ambient formulas cancel catastrophically because t is many orders below
    delta.
    """
    if not isinstance(region, SubspaceCubeRegion):
        raise GeneratorError("null_cover needs a subspaceCube region")
    sub = region.subspace
    if sub.signature_class != "null-degenerate":
        raise GeneratorError(
            f"null_cover needs a null-degenerate subspace, got {sub.signature_class}"
        )
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if delta <= 0:
        raise ValueError("delta must be positive")
    ambient = sub.ambient
    C = ambient.C
    nu, frame = _null_frame(sub)
    k = sub.k
    h = region.half_side
    nu_t = nu[0]

    # the template's own Euclidean size is of order its axis length, so aim at
    # half the nominal scale to keep every diamond diameter below delta
    d_eff = 0.5 * delta
    t = d_eff ** (-1.0 + 2.0 / eps)
    if t <= 0.0 or not math.isfinite(t):
        raise GeneratorError("null-cover template height underflowed")
    # -eta(axis, axis) = C^2 t (2 d_eff nu_t + t), stable for t << d_eff
    tau = C * math.sqrt(t * (2.0 * d_eff * nu_t + t))
    e_t = np.zeros(ambient.n)
    e_t[0] = 1.0
    half_axis = 0.5 * (d_eff * nu + t * e_t)

    # inscribed box: half-extent h_par along nu and c_perp along each frame
    # direction, from the exact quadratic form of the template membership
    # inequality (the sixteenth/eighth splits leave a strict margin)
    if frame:
        D = np.array([[float(fi @ ambient.metric_matrix() @ fj) for fj in frame]
                      for fi in frame])
        lam_max = float(np.max(np.linalg.eigvalsh(D)))
        rho_t = float(sum(abs(f[0]) for f in frame))
        h_par = d_eff / 4.0
        c_perp = math.sqrt(C ** 2 * t * d_eff * nu_t / (8.0 * lam_max * (k - 1)))
        if rho_t > 0.0:
            c_perp = min(c_perp, d_eff * nu_t / (16.0 * rho_t))
    else:
        h_par = d_eff / 4.0
        c_perp = 0.0
    if c_perp < 1e-13 and frame:
        raise GeneratorError(
            f"null-cover cells below float resolution at delta={delta}, eps={eps}")

    # bounding box of the cube in the adapted frame
    axes = np.array([nu] + frame)
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * k)).reshape(k, -1).T
    adapted = (signs * h) @ sub.basis @ axes.T
    lo_box = adapted.min(axis=0)
    hi_box = adapted.max(axis=0)
    steps = [2.0 * h_par] + [2.0 * c_perp] * (k - 1)
    cells = [max(1, math.ceil((hi_box[i] - lo_box[i]) / steps[i])) for i in range(k)]
    count = float(np.prod([float(c) for c in cells]))
    diam = float(np.linalg.norm(2.0 * half_axis)) + 2.0 * tau
    if diam > delta:
        raise GeneratorError("null-cover template diameter exceeds the scale")

    def covers_point(p):
        # cell boxes tile the adapted bounding box and each box is inscribed
        # in its cell's diamond, so membership reduces to box membership
        a = axes @ np.asarray(p, dtype=float)
        for i in range(k):
            top = lo_box[i] + cells[i] * steps[i]
            if not lo_box[i] - 1e-9 * steps[i] <= a[i] <= top + 1e-9 * steps[i]:
                return False
        return True

    return Cover(region, delta, [(tau, count)], covers_point,
                 f"null(eps={eps})")


def box_cover(region: BoxRegion, delta: float) -> Cover:
    """Tile an ambient Minkowski box with on-axis diamonds over cubic cells."""
    if not isinstance(region, BoxRegion):
        raise GeneratorError("box_cover needs a box region")
    space = region.space
    if not isinstance(space, MinkowskiSpace):
        raise GeneratorError("box_cover is defined for Minkowski spaces")
    n = space.n
    C = space.C
    # cell: time height H, spatial side H; tip offset covers the cell corners
    # diameter of the on-axis diamond is C * tau
    a_factor = 0.5 + 0.5 * math.sqrt(n - 1) / C
    H = delta / (2.0 * a_factor * C)
    a = a_factor * H
    tau = 2.0 * a * C
    lo, hi = region.lo, region.hi
    counts = [max(1, math.ceil((hi[i] - lo[i]) / H)) for i in range(n)]
    total = int(np.prod(counts))

    def covers_point(p):
        p = np.asarray(p, dtype=float)
        idx = np.clip(np.floor((p - lo) / H), 0, np.array(counts) - 1)
        center = lo + (idx + 0.5) * H
        tip = np.zeros(n)
        tip[0] = a
        return space.causal(center - tip, p) and space.causal(p, center + tip)

    return Cover(region, delta, [(tau, total)], covers_point, "box")


def point_cover(region: PointCloudRegion, delta: float) -> Cover:
    """One degenerate (zero time separation) diamond per point."""
    if not isinstance(region, PointCloudRegion):
        raise GeneratorError("point_cover needs a pointCloud region")
    space = region.space
    diamonds = [make_diamond(space, p, p) for p in region.points]
    return Cover.from_diamonds(region, delta, diamonds, "points")


def curve_chain_cover(curve: PiecewiseLinearCurve, delta: float,
                      region: CurveRegion | None = None) -> Cover:
    """Chain of consecutive diamonds J(gamma(s_i), gamma(s_{i+1})) along a curve."""
    space = curve.space
    region = region or CurveRegion(curve)
    m = len(curve.vertices) - 1
    pieces = 1
    while True:
        params = np.linspace(0.0, 1.0, m * pieces + 1)
        pts = [curve.point(t) for t in params]
        diamonds = []
        ok = True
        for a, b in zip(pts[:-1], pts[1:]):
            d = make_diamond(space, a, b)
            if d.empty:
                raise GeneratorError(f"curve vertices not causally related: {a} -> {b}")
            if d.diam_bound > delta:
                ok = False
                break
            diamonds.append(d)
        if ok:
            return Cover.from_diamonds(region, delta, diamonds, "chain")
        pieces *= 2
        if pieces > 1 << 22:
            raise GeneratorError("chain cover refinement did not reach the target scale")


def _null_variants(region, delta):
    """All float-sound members of the eps family of null covers at one scale."""
    out = []
    for e in NULL_EPS_GRID:
        try:
            out.append(null_cover(region, delta, e))
        except GeneratorError:
            continue
    if not out:
        raise GeneratorError(f"no sound null-cover variant at scale {delta}")
    return out


# (generator name, region predicate, builder) -- the null entry fans out over eps
def _applicable_builders(region):
    builders = []
    if isinstance(region, SubspaceCubeRegion):
        cls = region.subspace.signature_class
        if cls == "spacelike":
            builders.append(("grid", lambda d: [grid_cover(region, d)]))
        elif cls == "null-degenerate":
            builders.append(("null", lambda d: _null_variants(region, d)))
    elif isinstance(region, BoxRegion):
        builders.append(("box", lambda d: [box_cover(region, d)]))
    elif isinstance(region, PointCloudRegion):
        builders.append(("points", lambda d: [point_cover(region, d)]))
    elif isinstance(region, CurveRegion):
        builders.append(("chain", lambda d: [curve_chain_cover(region.curve, d, region)]))
    return builders


def upper_measure(space, region, N: float, delta: float,
                  generators=None, seed: int = 0) -> float:
    """Best verified generator cover cost: an upper bound on the delta-scale measure."""
    builders = _applicable_builders(region)
    if generators is not None:
        builders = [(name, b) for name, b in builders if name in generators]
    if not builders:
        raise GeneratorError(f"no applicable cover generator for region kind {region.kind!r}")
    best = math.inf
    for _, build in builders:
        for cover in build(delta):
            cover.verify(seed=seed)
            if cover.verified:
                best = min(best, cover_cost(cover, N))
    if math.isinf(best) and best > 0:
        raise GeneratorError("no generator produced a verified cover")
    return best


# ---------------------------------------------------------------------------
# Mass distributions and lower bounds


class MassDistribution:
    """Sampler for a measure on a region plus probe diamonds for Frostman ratios."""

    def __init__(self, region, total_mass: float, sampler, probe_pairs):
        self.region = region
        self.total_mass = float(total_mass)
        self._sampler = sampler
        self._probe_pairs = probe_pairs

    def sample(self, count: int, rng) -> np.ndarray:
        return self._sampler(count, rng)

    def probe_pairs(self, count: int, scale: float, rng):
        return self._probe_pairs(count, scale, rng)

    def frostman_constant(self, space, N: float, sample_budget: int = 100_000,
                          probes: int = 200, scale: float = 0.15,
                          seed: int = 0) -> float:
        """Estimated sup over sampled small diamonds of mu(J) / (omega_N tau^N)."""
        rng = np.random.default_rng(seed)
        pts = self.sample(sample_budget, rng)
        w = omega(N) if N > 0 else 1.0
        best = 0.0
        min_count = 30
        for a, b in self.probe_pairs(probes, scale, rng):
            d = make_diamond(space, a, b)
            if d.empty or d.tau <= 0.0:
                continue
            inside = _causal_mask(space, d.p, pts) & _causal_mask(space, d.q, pts,
                                                                  reverse=True)
            count = int(np.count_nonzero(inside))
            if count < min_count:
                continue
            mu = self.total_mass * count / len(pts)
            denom = w * d.tau ** N if N > 0 else 1.0
            best = max(best, mu / denom)
        if best <= 0.0:
            raise GeneratorError("degenerate sampler: no probe diamond captured mass")
        return best


def _causal_mask(space, a, pts, reverse: bool = False) -> np.ndarray:
    """Vectorized causal relation a <= p (or p <= a with reverse=True) in Minkowski."""
    ambient = space.ambient if isinstance(space, SubspaceRestriction) else space
    if not isinstance(ambient, MinkowskiSpace):
        rel = (lambda p: space.causal(p, a)) if reverse else (lambda p: space.causal(a, p))
        return np.array([rel(p) for p in pts], dtype=bool)
    diff = (np.asarray(a) - pts) if reverse else (pts - np.asarray(a))
    dt = diff[:, 0]
    dx2 = np.sum(diff[:, 1:] ** 2, axis=1)
    return (dt >= 0.0) & ((ambient.C * dt) ** 2 >= dx2)


def uniform_on_cube(region: SubspaceCubeRegion) -> MassDistribution:
    """Uniform (Hausdorff) measure on a spacelike subspace cube."""
    sub = region.subspace
    k = sub.k
    h = region.half_side
    total = (2.0 * h) ** k * math.sqrt(max(np.linalg.det(sub.euclidean_gram()), 0.0))
    nu = sub.timelike_normal()
    eta = sub.ambient.metric_matrix()

    # eta-orthonormal spacelike frame inside the subspace, for boosted probes
    G = sub.gram()
    Lc = np.linalg.cholesky(G)
    ortho = np.linalg.inv(Lc).T  # columns: coefficient vectors, eta-orthonormal

    def sampler(count, rng):
        c = rng.uniform(-h, h, size=(count, k))
        return c @ sub.basis

    def probe_pairs(count, scale, rng):
        pairs = []
        for _ in range(count):
            center = sub.embed(rng.uniform(-0.6 * h, 0.6 * h, size=k))
            r = scale * rng.uniform(0.5, 1.0)
            phi = rng.choice([0.0, 0.4, 0.8])
            u = sub.embed(ortho[:, rng.integers(k)])
            axis = math.cosh(phi) * nu + math.sinh(phi) * u
            pairs.append((center - r * axis, center + r * axis))
        return pairs

    return MassDistribution(region, total, sampler, probe_pairs)


def uniform_on_box(region: BoxRegion) -> MassDistribution:
    """Lebesgue measure on an ambient coordinate box."""
    lo, hi = region.lo, region.hi
    total = float(np.prod(hi - lo))
    n = len(lo)

    def sampler(count, rng):
        return lo + rng.uniform(size=(count, n)) * (hi - lo)

    def probe_pairs(count, scale, rng):
        pairs = []
        tip = np.zeros(n)
        tip[0] = 1.0
        for _ in range(count):
            center = lo + (0.2 + 0.6 * rng.uniform(size=n)) * (hi - lo)
            r = scale * rng.uniform(0.5, 1.0)
            pairs.append((center - r * tip, center + r * tip))
        return pairs

    return MassDistribution(region, total, sampler, probe_pairs)


def length_on_curve(curve: PiecewiseLinearCurve, tau_length: float) -> MassDistribution:
    """tau-length measure along a causal curve."""
    region = CurveRegion(curve)

    def sampler(count, rng):
        ts = rng.uniform(size=count)
        return np.array([curve.point(t) for t in ts])

    def probe_pairs(count, scale, rng):
        pairs = []
        for _ in range(count):
            s = rng.uniform(0.0, 1.0 - scale)
            pairs.append((curve.point(s), curve.point(s + scale * rng.uniform(0.5, 1.0))))
        return pairs

    return MassDistribution(region, tau_length, sampler, probe_pairs)


def lower_measure(space, region, N: float, mass_dist: MassDistribution,
                  sample_budget: int = 200_000, probes: int = 200,
                  scale: float = 0.15, seed: int = 0) -> float:
    """Statistical Frostman lower bound mu(region) / sup mu(J)/(omega_N tau^N)."""
    c_hat = mass_dist.frostman_constant(space, N, sample_budget=sample_budget,
                                        probes=probes, scale=scale, seed=seed)
    return mass_dist.total_mass / c_hat


# ---------------------------------------------------------------------------
# Scaling series and dimension estimation


@dataclass
class ScalingSeries:
    """Cover costs S_N(delta) over a geometric delta grid, per generator."""

    entries: list = field(default_factory=list)  # (generator, delta, N, cost, verified)

    def add(self, generator, delta, N, cost, verified=True):
        self.entries.append((generator, float(delta), float(N), float(cost), bool(verified)))

    def enveloped(self, N: float) -> list:
        """(delta, running-max cost) over coarser scales, mirroring delta-monotonicity."""
        rows = sorted([(d, c) for g, d, n, c, v in self.entries if n == N],
                      key=lambda t: -t[0])
        out = []
        running = 0.0
        for d, c in rows:
            running = max(running, c)
            out.append((d, running))
        return out

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write("generator,delta,N,cost,verified\n")
            for g, d, n, c, v in self.entries:
                f.write(f"{g},{d:.17g},{n:.17g},{c:.17g},{v}\n")


@dataclass
class DimensionEstimate:
    value: float
    bracket: tuple
    slopes: dict
    diagnostics: dict = field(default_factory=dict)
    series: ScalingSeries = field(default_factory=ScalingSeries)


def _fit_slope(deltas, costs, fit_scales: int = 4):
    """Least-squares d log cost / d log delta over the finest scales."""
    pairs = sorted(zip(deltas, costs))[:fit_scales]
    if any(c == 0.0 for _, c in pairs):
        return math.inf
    if any(math.isinf(c) for _, c in pairs):
        return -math.inf
    x = np.log([d for d, _ in pairs])
    y = np.log([c for _, c in pairs])
    return float(np.polyfit(x, y, 1)[0])


def estimate_dimension(space, region, delta_grid, N_grid,
                       generators=None, seed: int = 0,
                       fit_scales: int = 4, slope_tol: float = 1e-3,
                       verify_covers: bool = True) -> DimensionEstimate:
    """Estimate the geometric dimension from the zero crossing of the scaling slope.

    For each N the cover cost scales like delta^(N - dim) along the generator
    family, so the fitted log-log slope changes sign at the dimension.
    """
    delta_grid = sorted(float(d) for d in delta_grid)
    if len(delta_grid) < 5:
        raise ValueError("delta grid needs at least 5 geometric scales")
    ratios = [delta_grid[i + 1] / delta_grid[i] for i in range(len(delta_grid) - 1)]
    if max(ratios) / min(ratios) > 1.2:
        raise ValueError("delta grid must be (approximately) geometric")
    N_grid = sorted(float(N) for N in N_grid)

    if isinstance(region, PointCloudRegion):
        series = ScalingSeries()
        for d in delta_grid:
            series.add("points", d, 0.0, float(len(region.points)))
        return DimensionEstimate(0.0, (0.0, 0.0), {N: math.inf for N in N_grid},
                                 {"shortcut": "finite point set"}, series)

    builders = _applicable_builders(region)
    if generators is not None:
        builders = [(n, b) for n, b in builders if n in generators]
    if not builders:
        raise GeneratorError(f"no applicable cover generator for region kind {region.kind!r}")

    covers_by_delta = {}
    for d in delta_grid:
        variants = []
        for _, build in builders:
            for cover in build(d):
                if verify_covers:
                    cover.verify(seed=seed)
                else:
                    cover.verified = True
                if cover.verified:
                    variants.append(cover)
        if not variants:
            raise GeneratorError(f"no verified cover at scale {d}")
        covers_by_delta[d] = variants

    def cost(N, d):
        return min(_group_cost(c.groups, N) for c in covers_by_delta[d])

    # per-generator-family slopes: each family is an exact power law, so it is
    # fit over its own finest sound scales, and the dimension signal is whether
    # ANY family achieves bounded cost (the largest slope)
    families = {}
    for d in delta_grid:
        for c in covers_by_delta[d]:
            families.setdefault(c.generator, {})[d] = c.groups
    families = {g: m for g, m in families.items() if len(m) >= 2}
    if not families:
        raise GeneratorError("no generator family is available on >= 2 scales")

    def slope(N):
        best = -math.inf
        for m in families.values():
            ds = sorted(m)[:fit_scales]
            s = _fit_slope(ds, [_group_cost(m[d], N) for d in ds], fit_scales)
            best = max(best, s)
        return best

    series = ScalingSeries()
    slopes = {}
    for N in N_grid:
        for d in delta_grid:
            best = min(covers_by_delta[d], key=lambda c: _group_cost(c.groups, N))
            series.add(best.generator, d, N, _group_cost(best.groups, N), best.verified)
        slopes[N] = slope(N)

    def sign(s):
        if abs(s) <= slope_tol:
            return 0
        return -1 if s < 0 else 1

    # tie: a grid node with slope zero within tolerance is the answer
    for N in N_grid:
        if sign(slopes[N]) == 0:
            return DimensionEstimate(N, (N, N), slopes, {"tie": True}, series)

    bracket = None
    for a, b in zip(N_grid[:-1], N_grid[1:]):
        if sign(slopes[a]) < 0 and sign(slopes[b]) > 0:
            bracket = (a, b)
            break
    if bracket is None:
        raise BracketNotFoundError(
            f"all scaling slopes share a sign over N grid {N_grid}", slopes)

    lo, hi = bracket
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        s = slope(mid)
        if abs(s) <= slope_tol:
            lo = hi = mid
            break
        if s < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-4:
            break
    value = 0.5 * (lo + hi)
    return DimensionEstimate(value, bracket, slopes, {}, series)
