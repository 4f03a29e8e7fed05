"""Continuous chart metrics: cone sandwiches, DP time separation, doubling.

A continuous (not necessarily smooth) Lorentzian metric field on a box chart
is bracketed between scaled Minkowski cones; the time separation is bounded
below by a longest-path dynamic program on a causal grid graph and above by
the outer cone, and the cylindrical-neighborhood enlargement turns volume
ratios of causal diamonds into a doubling constant and a dimension bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .core import omega
from .spaces import MinkowskiSpace

__all__ = [
    "ChartMetric",
    "ConeSandwich",
    "CausalGraph",
    "CylindricalNeighborhood",
    "InvalidMetricError",
    "ResolutionError",
    "metric_field",
    "verify_cone_sandwich",
    "sup_metric_deviation",
    "dp_time_separation",
    "enlarge_diamond",
    "diamond_volume",
    "doubling_constant",
    "dimension_bound_from_doubling",
    "measure_ratio_check",
    "volume_density_check",
    "chart_diam_bound",
]


class InvalidMetricError(ValueError):
    """Metric field is not Lorentzian at a sampled point."""


class ResolutionError(RuntimeError):
    """A quantity vanished at the configured sampling resolution."""


@dataclass
class ChartMetric:
    """Continuous symmetric metric field on a coordinate box.

    `func` maps a coordinate point to a symmetric n x n matrix; det_bounds
    are caller-supplied bounds [k_det, K_det] for |det g| on the closure.
    """

    n: int
    func: object
    lo: np.ndarray
    hi: np.ndarray
    det_bounds: tuple
    name: str = "custom"

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.det_bounds[0] <= 0:
            raise InvalidMetricError("lower determinant bound must be positive")

    def __call__(self, x) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))

    def sqrt_det(self, x) -> float:
        return math.sqrt(abs(float(np.linalg.det(self(x)))))


def metric_field(name: str, n: int = 2, lo=None, hi=None, **params) -> ChartMetric:
    """Named built-in metric fields for configs: minkowski, conformal-bump,
    anisotropic-stretch."""
    lo = np.array([0.0] + [-1.0] * (n - 1)) if lo is None else np.asarray(lo, float)
    hi = np.array([1.0] + [1.0] * (n - 1)) if hi is None else np.asarray(hi, float)
    if name == "minkowski":
        eta = np.eye(n)
        eta[0, 0] = -1.0
        return ChartMetric(n, lambda x: eta, lo, hi, (1.0, 1.0), name)
    if name == "conformal-bump":
        a = float(params.get("a", 0.2))
        xmax = float(np.max(np.abs(np.concatenate([lo[1:], hi[1:]]))))

        def g(x):
            m = np.eye(n)
            m[0, 0] = -(1.0 + a * np.linalg.norm(x[1:]))
            return m

        return ChartMetric(n, g, lo, hi, (1.0, 1.0 + a * xmax), name)
    if name == "anisotropic-stretch":
        s = np.asarray(params.get("factors", [1.2] * (n - 1)), dtype=float)
        diag = np.diag(np.concatenate([[-1.0], s ** 2]))
        det = float(np.prod(s ** 2))
        return ChartMetric(n, lambda x: diag, lo, hi, (det, det), name)
    raise ValueError(f"unknown metric field {name!r}")


# ---------------------------------------------------------------------------
# Cone sandwich


@dataclass
class ConeSandwich:
    C: float
    verified: bool
    resolution: int
    worst_margin: float


def _direction_samples(n: int, C: float, slopes: int):
    """Directions (1, m*u) with spatial magnitudes m sweeping through both cones."""
    ms = np.linspace(0.0, 1.5 * C, slopes)
    if n == 2:
        us = [np.array([1.0]), np.array([-1.0])]
    else:
        rng = np.random.default_rng(7)
        us = [u / np.linalg.norm(u) for u in rng.normal(size=(16, n - 1))]
    for m in ms:
        for u in us:
            yield np.concatenate([[1.0], m * u])


def verify_cone_sandwich(metric: ChartMetric, C: float, resolution: int = 9,
                         slopes: int = 64) -> ConeSandwich:
    """Check eta_{1/C} < g < eta_C at grid samples and sampled directions.

    C = 1 is allowed only for the exactly flat field (non-strict comparisons);
    any genuinely continuous example needs C > 1.
    """
    if C < 1.0:
        raise ValueError("cone scale must satisfy C >= 1")
    n = metric.n
    strict = C > 1.0
    grids = [np.linspace(metric.lo[i], metric.hi[i], resolution) for i in range(n)]
    eta_in = np.eye(n)
    eta_in[0, 0] = -1.0 / C ** 2
    eta_out = np.eye(n)
    eta_out[0, 0] = -C ** 2
    worst = math.inf
    verified = True
    dirs = list(_direction_samples(n, C, slopes))
    for x in itertools.product(*grids):
        g = metric(np.array(x))
        eig = np.linalg.eigvalsh(g)
        if not (np.sum(eig < 0) == 1 and np.sum(eig > 0) == n - 1):
            raise InvalidMetricError(f"non-Lorentzian signature at {x}: eigenvalues {eig}")
        for v in dirs:
            gv = float(v @ g @ v)
            if float(v @ eta_in @ v) <= 0.0:
                worst = min(worst, -gv)
                if (gv >= 0.0) if strict else (gv > 0.0):
                    verified = False
            if gv <= 0.0:
                ov = float(v @ eta_out @ v)
                worst = min(worst, -ov)
                if (ov >= 0.0) if strict else (ov > 0.0):
                    verified = False
    return ConeSandwich(C, verified, resolution, worst)


def sup_metric_deviation(metric: ChartMetric, resolution: int = 17) -> float:
    """Sampled sup-norm deviation of g from the unit Minkowski metric."""
    n = metric.n
    eta = np.eye(n)
    eta[0, 0] = -1.0
    grids = [np.linspace(metric.lo[i], metric.hi[i], resolution) for i in range(n)]
    worst = 0.0
    for x in itertools.product(*grids):
        worst = max(worst, float(np.max(np.abs(metric(np.array(x)) - eta))))
    return worst


# ---------------------------------------------------------------------------
# Longest-path DP time separation


@dataclass
class CausalGraph:
    """Regular grid with edges along g-causal chords; dp holds longest-path values."""

    metric: ChartMetric
    t_nodes: np.ndarray
    x_axes: list
    dp: np.ndarray  # shape (T+1, M, ..., M), -inf where unreachable
    stencil: int

    def value(self, t_index: int, x_index) -> float:
        return float(self.dp[(t_index, *np.atleast_1d(x_index))])


@dataclass
class DPInterval:
    lo: float
    hi: float
    connected: bool
    quad_error: float
    graph: CausalGraph | None = None


def _chord_form(metric, a, b):
    v = np.asarray(b, float) - np.asarray(a, float)
    mid = 0.5 * (np.asarray(a, float) + np.asarray(b, float))
    return float(v @ metric(mid) @ v)


def chord_causal(metric, a, b) -> bool:
    """Chord admissibility: future-pointing with g-causal midpoint form."""
    v = np.asarray(b, float) - np.asarray(a, float)
    if v[0] < 0:
        return False
    if v[0] == 0:
        return bool(np.all(v == 0))
    return _chord_form(metric, a, b) <= 0.0


def dp_time_separation(metric: ChartMetric, p, q, grid_res: int = 48,
                       C: float = 1.5, stencil: int = 3,
                       keep_graph: bool = False) -> DPInterval:
    """Bracket tau(p, q) between a longest-path grid value and the outer cone.

    lo is the longest-path value over chords admissible at their midpoint
    (weight sqrt(-g_mid(v, v))); hi combines the eta_C closed form with the
    local-control factor sqrt((1+C^2) delta + 2C^2 - 1) on on-axis pairs.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = metric.n
    eta_C = MinkowskiSpace(n, C)
    height = q[0] - p[0]
    if not eta_C.causal(p, q):
        return DPInterval(0.0, 0.0, False, 0.0)
    if stencil < 3:
        raise ValueError("edge stencil radius must be >= 3 grid cells")

    T = int(grid_res)
    ht = height / T
    half = 0.5 * C * height * 1.05 + ht
    M = T + 1 if (T + 1) % 2 == 1 else T + 2
    x_axes = []
    idx_p, idx_q = [], []
    for i in range(1, n):
        center = 0.5 * (p[i] + q[i])
        span = max(half, abs(q[i] - p[i]) * 0.75 + ht)
        axis = np.linspace(center - span, center + span, M)
        x_axes.append(axis)
        idx_p.append(int(np.argmin(np.abs(axis - p[i]))))
        idx_q.append(int(np.argmin(np.abs(axis - q[i]))))
    hx = [float(a[1] - a[0]) for a in x_axes]
    t_nodes = np.linspace(p[0], q[0], T + 1)

    # metric components on the half-step lattice, so every chord midpoint is
    # a precomputed entry
    half_axes = [np.linspace(a[0], a[-1], 2 * M - 1) for a in x_axes]
    half_t = np.linspace(p[0], q[0], 2 * T + 1)
    mesh = np.meshgrid(half_t, *half_axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    G = np.array([metric(x) for x in pts]).reshape(
        (2 * T + 1,) + tuple(2 * M - 1 for _ in range(n - 1)) + (n, n))

    shape = (T + 1,) + (M,) * (n - 1)
    dp = np.full(shape, -np.inf)
    dp[(0, *idx_p)] = 0.0

    offset_ranges = []
    for i in range(n - 1):
        jmax = int(math.floor(C * stencil * ht / hx[i])) + 1
        offset_ranges.append(range(-jmax, jmax + 1))

    for step in range(1, T + 1):
        best = np.full((M,) * (n - 1), -np.inf)
        for k in range(1, min(stencil, step) + 1):
            for off in itertools.product(*offset_ranges):
                if any(abs(o) > math.floor(C * k * ht / hx[i]) + 1
                       for i, o in enumerate(off)):
                    continue
                v = np.concatenate([[k * ht], [o * h for o, h in zip(off, hx)]])
                # source slice of dp and target positions
                src = [slice(max(0, -o), M - max(0, o)) for o in off]
                dst = [slice(max(0, o), M - max(0, -o)) for o in off]
                prev = dp[(step - k, *src)]
                # midpoint half-indices: time 2*step - k, spatial 2*s + o for
                # target index s + o -> in half lattice: 2*(s+o) - o
                mid_idx = [slice(2 * d.start - o, 2 * (d.stop - 1) - o + 1, 2)
                           for d, o in zip(dst, off)]
                gm = G[(2 * step - k, *mid_idx)]
                form = np.einsum("i,...ij,j->...", v, gm, v)
                w = np.where(form <= 0.0, np.sqrt(np.maximum(-form, 0.0)), -np.inf)
                cand = prev + w
                cur = best[tuple(dst)]
                best[tuple(dst)] = np.maximum(cur, cand)
        dp[step] = best

    lo = float(dp[(T, *idx_q)])
    connected = math.isfinite(lo)
    if not connected:
        lo = 0.0
    delta = sup_metric_deviation(metric)
    tau_outer = eta_C.time_sep(p, q)
    on_axis = bool(np.allclose(p[1:], q[1:]))
    quad_error = 2.0 * C * (ht + max(hx))
    if on_axis:
        upper_factor = math.sqrt((1.0 + C ** 2) * delta + 2.0 * C ** 2 - 1.0)
        lower_factor = math.sqrt(max(1.0 - delta, 0.0))
        corr = (upper_factor - lower_factor) * height
        hi = min(tau_outer, upper_factor * height, lo + corr)
    else:
        hi = tau_outer
    hi = max(hi, lo)
    graph = CausalGraph(metric, t_nodes, x_axes, dp, stencil) if keep_graph else None
    return DPInterval(lo, hi, connected, quad_error, graph)


# ---------------------------------------------------------------------------
# Cylindrical neighborhoods, enlargement, doubling


def enlarge_diamond(p, q, lam: float, W_box=None):
    """Stretch an on-axis pair by lam below and above; flags exit from W."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not np.allclose(p[1:], q[1:]):
        raise ValueError("enlargement is defined for on-axis pairs only")
    t, s = p[0], q[0]
    if not t < s:
        raise ValueError("need p strictly below q")
    p_hat = p.copy()
    q_hat = q.copy()
    p_hat[0] = t - lam * (s - t)
    q_hat[0] = s + lam * (s - t)
    inside = True
    if W_box is not None:
        lo, hi = W_box
        inside = bool(np.all(p_hat >= lo) and np.all(q_hat <= hi))
    return p_hat, q_hat, inside


@dataclass
class CylindricalNeighborhood:
    """Chart W = (0, B) x Z with a thin causally convex band W' = (a, b) x V.

    The band is thin enough (b - a < B/(4 lam)) that the lam-enlargement of
    any on-axis pair inside it stays inside W.
    """

    B: float
    Z_lo: np.ndarray
    Z_hi: np.ndarray
    a: float
    b: float
    V_lo: np.ndarray
    V_hi: np.ndarray
    C: float = 1.0
    lam: float = field(init=False)

    def __post_init__(self):
        self.Z_lo = np.atleast_1d(np.asarray(self.Z_lo, float))
        self.Z_hi = np.atleast_1d(np.asarray(self.Z_hi, float))
        self.V_lo = np.atleast_1d(np.asarray(self.V_lo, float))
        self.V_hi = np.atleast_1d(np.asarray(self.V_hi, float))
        self.lam = 3.0 * self.C ** 2 + 2.0
        h = self.b - self.a
        if not 0 < h < self.B / (4.0 * self.lam):
            raise ValueError("band height must satisfy 0 < b - a < B/(4 lam)")
        if self.a - self.lam * h < 0.0 or self.b + self.lam * h > self.B:
            raise ValueError("enlarged on-axis pairs would exit the chart")
        if np.any(self.V_lo < self.Z_lo) or np.any(self.V_hi > self.Z_hi):
            raise ValueError("V must sit inside Z")

    @property
    def W_box(self):
        return (np.concatenate([[0.0], self.Z_lo]),
                np.concatenate([[self.B], self.Z_hi]))


def chart_diam_bound(C: float, height: float) -> float:
    """Closed-form diameter bound 2 sqrt(1 + C^2) (s - t) for on-axis chart diamonds."""
    return 2.0 * math.sqrt(1.0 + C ** 2) * height


def diamond_volume(metric: ChartMetric, p, q, W_box=None,
                   t_slices: int = 400, x_quad: int = 17,
                   sample_budget: int = 200_000, seed: int = 0) -> float:
    """Metric volume of the local diamond J(p, q, W) under sqrt|det g|.

    Membership is chord admissibility from p and to q at midpoints. In two
    dimensions each time slice meets the diamond in an interval, so the volume
    is a deterministic slice scan with bisected edges; in higher dimensions a
    quasi-random estimate over the bounding box is used.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = metric.n
    if W_box is None:
        W_box = (metric.lo, metric.hi)
    lo_W, hi_W = W_box
    t0 = max(p[0], lo_W[0])
    t1 = min(q[0], hi_W[0])
    if t1 <= t0:
        return 0.0

    def member(z):
        return (chord_causal(metric, p, z) and chord_causal(metric, z, q)
                and bool(np.all(z >= lo_W) and np.all(z <= hi_W)))

    if n == 2:
        xc = 0.5 * (p[1] + q[1])
        xl_cap, xr_cap = float(lo_W[1]), float(hi_W[1])
        span = 2.0 * (q[0] - p[0]) + 1.0
        ts = t0 + (np.arange(t_slices) + 0.5) * (t1 - t0) / t_slices
        total = 0.0
        wts = (t1 - t0) / t_slices
        for t in ts:
            center = np.array([t, xc])
            if not member(center):
                continue

            def edge(direction):
                inside = xc
                outside = xc + direction * span
                outside = min(max(outside, xl_cap - 1.0), xr_cap + 1.0)
                for _ in range(50):
                    mid = 0.5 * (inside + outside)
                    if member(np.array([t, mid])):
                        inside = mid
                    else:
                        outside = mid
                return inside

            xl, xr = edge(-1.0), edge(1.0)
            if xr <= xl:
                continue
            xs = np.linspace(xl, xr, x_quad)
            vals = [metric.sqrt_det(np.array([t, x])) for x in xs]
            total += wts * float(np.trapezoid(vals, xs))
        return total

    # quasi-random fallback for n >= 3
    box_lo = np.maximum(np.concatenate([[p[0]], p[1:] - (q[0] - p[0])]), lo_W)
    box_hi = np.minimum(np.concatenate([[q[0]], p[1:] + (q[0] - p[0])]), hi_W)
    eng = qmc.Halton(d=n, scramble=True, seed=seed)
    u = eng.random(sample_budget)
    pts = box_lo + u * (box_hi - box_lo)
    vol_box = float(np.prod(box_hi - box_lo))
    acc = 0.0
    hits = 0
    for z in pts:
        if member(z):
            acc += metric.sqrt_det(z)
            hits += 1
    return vol_box * acc / len(pts)


def doubling_constant(metric: ChartMetric, nbhd: CylindricalNeighborhood,
                      pairs: int = 8, seed: int = 0, t_slices: int = 400) -> dict:
    """Empirical and analytic doubling constants of diamond enlargement.

    Empirical: max sampled ratio vol(J(p_hat, q_hat, W)) / vol(J(p, q, W))
    over on-axis pairs in the band. Analytic: (K_det/k_det)(2 lam + 1)^n
    C^(2(n-1)).
    """
    lam = nbhd.lam
    n = metric.n
    k_det, K_det = metric.det_bounds
    L_analytic = (K_det / k_det) * (1.0 + 2.0 * lam) ** n * nbhd.C ** (2 * (n - 1))
    rng = np.random.default_rng(seed)
    W_box = nbhd.W_box
    ratios = []
    for _ in range(pairs):
        x = nbhd.V_lo + rng.uniform(size=n - 1) * (nbhd.V_hi - nbhd.V_lo)
        hmax = nbhd.b - nbhd.a
        h = hmax * rng.uniform(0.4, 0.95)
        t = nbhd.a + rng.uniform(0.0, hmax - h)
        p = np.concatenate([[t], x])
        q = np.concatenate([[t + h], x])
        vol_small = diamond_volume(metric, p, q, W_box, t_slices=t_slices)
        if vol_small <= 0.0:
            raise ResolutionError(
                f"small diamond of height {h} has zero volume at {t_slices} slices")
        p_hat, q_hat, inside = enlarge_diamond(p, q, lam, W_box)
        vol_big = diamond_volume(metric, p_hat, q_hat, W_box, t_slices=t_slices)
        ratios.append(vol_big / vol_small)
    return {"L_empirical": max(ratios), "L_analytic": L_analytic,
            "ratios": ratios, "lam": lam}


def dimension_bound_from_doubling(L: float, lam: float) -> float:
    """Dimension bound log_(1+2 lam)(L) from a doubling constant."""
    if L < 1.0:
        raise ValueError("doubling constant must be >= 1")
    if lam < 5.0:
        raise ValueError("lam must be >= 5 (C >= 1)")
    return math.log(L) / math.log(1.0 + 2.0 * lam)


def measure_ratio_check(metric: ChartMetric, nbhd: CylindricalNeighborhood,
                        pair_list, L_empirical: float,
                        t_slices: int = 400) -> list:
    """Check vol(J)/vol(J0) >= (1/K)(tau/tau0)^kappa against a reference pair.

    kappa = log_(1+2 lam)(L_empirical), K = ((1+2 lam)/2)^kappa; pairs that
    violate the overlap or height hypotheses are skipped with a reason.
    """
    lam = nbhd.lam
    kappa = dimension_bound_from_doubling(L_empirical, lam)
    K = ((1.0 + 2.0 * lam) / 2.0) ** kappa
    W_box = nbhd.W_box
    (p0, q0), rest = pair_list[0], pair_list[1:]
    p0 = np.asarray(p0, float)
    q0 = np.asarray(q0, float)
    vol0 = diamond_volume(metric, p0, q0, W_box, t_slices=t_slices)
    tau0 = math.sqrt(max(-_chord_form(metric, p0, q0), 0.0))
    rows = []
    for p, q in rest:
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        h, h0 = q[0] - p[0], q0[0] - p0[0]
        if h > 2.0 * h0:
            rows.append({"pair": (p, q), "skipped": "height exceeds twice the reference"})
            continue
        if not np.allclose(p[1:], p0[1:]) or min(q[0], q0[0]) <= max(p[0], p0[0]):
            rows.append({"pair": (p, q), "skipped": "diamonds do not overlap on-axis"})
            continue
        vol = diamond_volume(metric, p, q, W_box, t_slices=t_slices)
        tau = math.sqrt(max(-_chord_form(metric, p, q), 0.0))
        rhs = (1.0 / K) * (tau / tau0) ** kappa if tau0 > 0 else 0.0
        lhs = vol / vol0
        rows.append({"pair": (p, q), "lhs": lhs, "rhs": rhs,
                     "margin": lhs - rhs, "kappa": kappa, "K": K})
    return rows


def volume_density_check(metric: ChartMetric, base_point, h0: float,
                         halvings: int = 4, t_slices: int = 400) -> list:
    """Ratio vol(J(p, q)) / (omega_n tau^n) for on-axis pairs shrinking to a point."""
    x0 = np.asarray(base_point, dtype=float)
    n = metric.n
    rows = []
    for i in range(halvings + 1):
        h = h0 / 2 ** i
        p = x0.copy()
        q = x0.copy()
        p[0] -= 0.5 * h
        q[0] += 0.5 * h
        vol = diamond_volume(metric, p, q, t_slices=t_slices)
        tau = math.sqrt(max(-_chord_form(metric, p, q), 0.0))
        if tau <= 0.0:
            raise ResolutionError("degenerate on-axis pair")
        rows.append({"h": h, "tau": tau, "ratio": vol / (omega(n) * tau ** n)})
    return rows
