"""End-to-end acceptance checks.

Each test prints a single PASS/FAIL line (written straight to the terminal so
it is visible under pytest capture) and asserts the stated tolerance.
"""
import math
import time

import numpy as np
import pytest

from lorvol import (
    CylindricalNeighborhood,
    BoxRegion,
    LinearSubspace,
    MinkowskiSpace,
    PiecewiseLinearCurve,
    PointCloudRegion,
    SubspaceCubeRegion,
    bg_ratio_bound,
    compare_length_measure,
    cover_cost,
    dimension_bound_from_doubling,
    doubling_constant,
    dp_time_separation,
    estimate_dimension,
    grid_cover,
    lorentz_boost,
    lower_measure,
    make_diamond,
    metric_field,
    null_cover,
    omega,
    point_cover,
    restrict_to_subspace,
    rho,
    sup_metric_deviation,
    tau_length,
    tcd_doubling_constant,
    uniform_on_cube,
    upper_measure,
    verify_cone_sandwich,
    volume_density_check,
)

from test_core import mc_diamond_volume


_CAPMAN = None


@pytest.fixture(autouse=True)
def _uncaptured_reporting(request):
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def report(num, name, ok, detail, t0, budget):
    elapsed = time.time() - t0
    line = (f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} ({name}): "
            f"{detail} [{elapsed:.1f}s]")
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)
    assert ok, line
    assert elapsed < budget, f"criterion {num} exceeded {budget}s ({elapsed:.1f}s)"


def spacelike_cube(k, half_side=1.0):
    space = MinkowskiSpace(k + 1)
    basis = np.zeros((k, k + 1))
    for i in range(k):
        basis[i, i + 1] = 1.0
    sub = LinearSubspace(space, basis)
    return space, SubspaceCubeRegion(restrict_to_subspace(sub), half_side)


def null_cube():
    space = MinkowskiSpace(3)
    basis = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    sub = LinearSubspace(space, basis)
    return space, SubspaceCubeRegion(restrict_to_subspace(sub), 1.0)


DELTA_GRID = [2.0 ** -e for e in range(3, 9)]


def test_criterion_01_normalization():
    t0 = time.time()
    errs = [abs(omega(2) - 0.5), abs(omega(4) - math.pi / 24.0)]
    ok = omega(1) == 1.0 and max(errs) < 1e-12
    report(1, "normalization", ok,
           f"omega(1)={omega(1)}, |err| omega(2),omega(4) <= {max(errs):.2e}",
           t0, 5.0)


def test_criterion_02_diamond_volume_law():
    t0 = time.time()
    worst = 0.0
    for n in (2, 3, 4):
        for tau in (0.5, 1.0, 2.0):
            est = mc_diamond_volume(n, tau, 10 ** 6, seed=11 * n + int(4 * tau))
            exact = omega(n) * tau ** n
            worst = max(worst, abs(est - exact) / exact)
    report(2, "diamond volume law", worst < 0.01,
           f"worst MC relative error {worst:.4f} over n=2..4, tau in 0.5/1/2",
           t0, 10.0)


def test_criterion_03_lorentz_invariance():
    t0 = time.time()
    worst = 0.0
    for n in (2, 3, 4):
        space = MinkowskiSpace(n)
        L = lorentz_boost(0.6, axis=1, n=n)
        p = np.zeros(n)
        q = np.zeros(n)
        q[0] = 1.7
        if n > 2:
            q[2] = 0.5
        d = make_diamond(space, p, q)
        db = make_diamond(space, L @ p, L @ q)
        worst = max(worst, abs(db.tau - d.tau))
        for N in (1.0, float(n)):
            worst = max(worst, abs(rho(N, db) - rho(N, d)) / rho(N, d))
    report(3, "Lorentz invariance", worst < 1e-12,
           f"worst tau/rho deviation under v=0.6 boost: {worst:.2e}", t0, 5.0)


def test_criterion_04_box_dimension():
    t0 = time.time()
    vals = {}
    for n in (2, 3):
        space = MinkowskiSpace(n)
        region = BoxRegion(space, np.zeros(n), np.ones(n))
        N_grid = [0.5 * i for i in range(1, 2 * n + 2)]
        vals[n] = estimate_dimension(space, region, DELTA_GRID, N_grid).value
    ok = all(abs(vals[n] - n) <= 0.15 for n in (2, 3))
    report(4, "Minkowski box dimension", ok,
           f"dim estimates n=2: {vals[2]:.3f}, n=3: {vals[3]:.3f}", t0, 60.0)


def test_criterion_05_spacelike_subspaces():
    t0 = time.time()
    details = []
    ok = True
    for k in (1, 2):
        space, region = spacelike_cube(k)
        N_grid = [0.5 * i for i in range(1, 2 * k + 3)]
        dim = estimate_dimension(space, region, DELTA_GRID, N_grid).value
        upper = upper_measure(space, region, N=float(k), delta=2.0 ** -6)
        mass = uniform_on_cube(region)
        lower = lower_measure(space, region, N=float(k), mass_dist=mass, seed=2)
        c_minus = 1.0 / (k * 2.0 ** (k - 1))
        # upper bound 2^k (omega_k/alpha_k) H^k(ball of radius sqrt(k))
        upper_bound = 2.0 ** k * omega(k) * k ** (k / 2.0)
        ok_k = (abs(dim - k) <= 0.15 and lower >= 0.9 * c_minus * 2.0 ** k
                and upper <= 1.1 * upper_bound)
        ok = ok and ok_k
        details.append(f"k={k}: dim {dim:.3f}, lower {lower:.3f} "
                       f"(>= {0.9 * c_minus * 2.0 ** k:.2f}), "
                       f"upper {upper:.3f} (<= {1.1 * upper_bound:.2f})")
    report(5, "spacelike subspaces", ok, "; ".join(details), t0, 120.0)


def test_criterion_06_null_subspaces():
    t0 = time.time()
    space, region = null_cube()
    dim = estimate_dimension(space, region, DELTA_GRID,
                             [0.5, 1.0, 1.5, 2.0]).value
    costs = []
    for delta in DELTA_GRID:
        cover = null_cover(region, delta, eps=0.5)
        cover.verify()
        costs.append(cover_cost(cover, 1.5))
    spread = max(costs) / min(costs)
    ok = abs(dim - 1.0) <= 0.2 and spread < 3.0
    report(6, "null subspaces", ok,
           f"dim {dim:.3f} (target 1 +- 0.2), S_1.5 spread factor {spread:.2f}",
           t0, 120.0)


def test_criterion_07_curves():
    t0 = time.time()
    space = MinkowskiSpace(2)
    seg = PiecewiseLinearCurve(space, [[0, 0], [1, 0]])
    out = compare_length_measure(seg, DELTA_GRID)
    seg_ok = (abs(out["L_tau"] - 1.0) < 1e-6 and
              all(abs(v - 1.0) < 1e-6 for v in out["V1upper"].values()))
    null_seg = PiecewiseLinearCurve(space, [[0, 0], [1, 1]])
    null_ok = tau_length(null_seg) == 0.0
    zigzag = PiecewiseLinearCurve(space, [[0, 0], [0.5, 0.5], [1.0, 0.0]])
    L_zig, trace = tau_length(zigzag, return_trace=True)
    zig_ok = L_zig < 1e-3
    ok = seg_ok and null_ok and zig_ok
    report(7, "curves", ok,
           f"segment L={out['L_tau']:.6f}, V1 at every delta = 1, "
           f"null L=0, zigzag final sum {L_zig:.2e}", t0, 5.0)


def test_criterion_08_cardinality():
    t0 = time.time()
    space = MinkowskiSpace(2)
    rng = np.random.default_rng(0)
    results = {}
    for m in (1, 5, 50):
        cloud = PointCloudRegion(space, rng.uniform(-1, 1, size=(m, 2)))
        cover = point_cover(cloud, delta=0.05)
        cover.verify()
        results[m] = cover_cost(cover, 0.0)
    ok = all(results[m] == m for m in (1, 5, 50))
    report(8, "cardinality (V^0)", ok, f"V^0 of point clouds: {results}",
           t0, 5.0)


def test_criterion_09_cone_sandwich_tau():
    t0 = time.time()
    bump = metric_field("conformal-bump", 2, a=0.2)
    C = 1.5
    assert verify_cone_sandwich(bump, C).verified
    delta = sup_metric_deviation(bump)
    lo_f = math.sqrt(1.0 - delta)
    hi_f = math.sqrt((1.0 + C ** 2) * delta + 2.0 * C ** 2 - 1.0)
    pairs = [([0.0, 0.4], [0.6, 0.4]), ([0.1, -0.2], [0.5, -0.2]),
             ([-0.2, 0.0], [0.3, 0.0]), ([0.0, 0.55], [0.35, 0.55])]
    ok = True
    for p, q in pairs:
        h = q[0] - p[0]
        out = dp_time_separation(bump, p, q, C=C)
        ok = ok and out.lo >= lo_f * h * 0.98 - out.quad_error
        ok = ok and out.hi <= hi_f * h * 1.02 + out.quad_error
    report(9, "cone-sandwich tau bounds", ok,
           f"{len(pairs)} on-axis dp intervals inside "
           f"[{lo_f:.3f}, {hi_f:.3f}] x height within 2%", t0, 60.0)


def test_criterion_10_doubling_dimension():
    t0 = time.time()
    flat = metric_field("minkowski", 2)
    nbhd = CylindricalNeighborhood(B=1.0, Z_lo=[-1.0], Z_hi=[1.0],
                                   a=0.46, b=0.49, V_lo=[-0.3], V_hi=[0.3],
                                   C=1.0)
    rec = doubling_constant(flat, nbhd, pairs=4, seed=5, t_slices=300)
    L_ref = (1.0 + 2.0 * nbhd.lam) ** 2
    bound = dimension_bound_from_doubling(rec["L_empirical"], nbhd.lam)
    rows = volume_density_check(flat, [0.5, 0.0], h0=0.4, halvings=4,
                                t_slices=300)
    drift = max(abs(r["ratio"] - 1.0) for r in rows)
    ok = (abs(rec["L_empirical"] - L_ref) / L_ref < 0.05 and bound <= 2.1
          and drift < 0.02)
    report(10, "doubling to dimension", ok,
           f"L_emp {rec['L_empirical']:.2f} (ref {L_ref:.0f}), "
           f"dim bound {bound:.3f}, density drift {drift:.4f}", t0, 120.0)


def test_criterion_11_bishop_gromov_tcd():
    t0 = time.time()
    tcd_ok = all(tcd_doubling_constant(0.0, N) == 2.0 ** (N + 1)
                 for N in (1, 2, 3))
    bg_err = abs(bg_ratio_bound(0.0, 3, 1.0, 2.0) - 1.0 / 16.0)
    lattice_ok = True
    cells = 0
    for K in (-3.0, -1.0, 0.0, 2.0, 5.0):
        for N in (1.0, 2.0, 3.0, 4.0):
            r = 0.3
            lhs = bg_ratio_bound(K, N, r, 2 * r)
            rhs = 1.0 / tcd_doubling_constant(K, N, Rstar=2.0)
            lattice_ok = lattice_ok and lhs >= rhs - 1e-12
            cells += 1
    ok = tcd_ok and bg_err < 1e-10 and lattice_ok and cells == 20
    report(11, "Bishop-Gromov / TCD", ok,
           f"flat doubling exact, bg(0,3,1,2) err {bg_err:.1e}, "
           f"inequality holds on all {cells} lattice cells", t0, 5.0)


def test_criterion_12_property_suites():
    t0 = time.time()
    import test_properties as props
    props.test_reverse_triangle_inequality()
    props.test_partition_refinement_monotonicity()
    props.test_cover_cost_dilation_homogeneity()
    props.test_dimension_subset_monotonicity()
    props.test_lower_upper_sandwich()
    report(12, "property suites", True,
           "5 suites x 1000 randomized cases, zero violations", t0, 60.0)
