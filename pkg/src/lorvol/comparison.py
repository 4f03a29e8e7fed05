"""Constant-curvature comparison functions, timelike Bishop-Gromov ratios and
sub-level doubling constants."""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

__all__ = [
    "s_K",
    "bg_ratio_bound",
    "tcd_doubling_constant",
    "bg_monotonicity_probe",
    "dimension_consistency_assert",
    "comparison_table_csv",
]


def s_K(K: float, t: float) -> float:
    """Comparison function: sin / linear / sinh scaled by the curvature."""
    if K > 0.0:
        r = math.sqrt(K)
        return math.sin(r * t) / r
    if K < 0.0:
        r = math.sqrt(-K)
        return math.sinh(r * t) / r
    return t


def _radius_cap(K: float, N: float) -> float:
    return math.pi * math.sqrt(N / K) if K > 0.0 else math.inf


def bg_ratio_bound(K: float, N: float, r: float, R: float,
                   epsrel: float = 1e-8) -> float:
    """Lower bound on m(E_r)/m(E_R): ratio of integrals of s_{K/N}^N."""
    if not 0.0 < r <= R:
        raise ValueError("need 0 < r <= R")
    cap = _radius_cap(K, N)
    if R > cap:
        raise ValueError(f"R={R} exceeds the model-space cap pi*sqrt(N/K)={cap}")
    if r == R:
        return 1.0

    def integrand(t):
        return s_K(K / N, t) ** N

    num, _ = quad(integrand, 0.0, r, epsrel=epsrel, limit=200)
    den, _ = quad(integrand, 0.0, R, epsrel=epsrel, limit=200)
    return num / den


def tcd_doubling_constant(K: float, N: float, Rstar: float = math.inf) -> float:
    """Doubling constant of tau-sublevel sets: L = 2^(N+1) max(1, cosh(...)^N).

    The cosh branch is active only for negative curvature, where a finite
    reference radius is required.
    """
    if N < 1.0:
        raise ValueError("N must be >= 1")
    base = 2.0 ** (N + 1.0)
    if K < 0.0:
        if math.isinf(Rstar):
            raise ValueError("negative curvature requires a finite reference radius")
        return base * math.cosh(math.sqrt(-K / N) * Rstar) ** N
    return base


def bg_monotonicity_probe(n: int, N: float, r_grid) -> dict:
    """Profile r -> vol(E_r) / integral_0^r t^N for a flat solid cone.

    vol(E_r) scales exactly as r^n, so the profile is proportional to
    r^(n - N - 1): nonincreasing precisely when N >= n - 1, which is the
    regime where a flat cone can satisfy the comparison inequality.
    """
    r_grid = np.asarray(sorted(float(r) for r in r_grid))
    if np.any(r_grid <= 0):
        raise ValueError("radii must be positive")
    vols = r_grid ** n
    denom = r_grid ** (N + 1.0) / (N + 1.0)
    profile = vols / denom
    diffs = np.diff(profile)
    nonincreasing = bool(np.all(diffs <= 1e-12 * np.abs(profile[:-1])))
    return {
        "r": r_grid,
        "profile": profile,
        "exponent": n - N - 1.0,
        "monotone_nonincreasing": nonincreasing,
        "expected_nonincreasing": N >= n - 1,
    }


def dimension_consistency_assert(n: int, N: float, mode: str) -> bool:
    """Dimension bound n <= N + 1 under wTCD, n <= N under TMCP."""
    if mode == "wTCD":
        return n <= N + 1.0
    if mode == "TMCP":
        return n <= N
    raise ValueError(f"mode must be 'wTCD' or 'TMCP', got {mode!r}")


def comparison_table_csv(path, rows):
    """Write (K, N, Rstar, L, ratio bound) rows to CSV."""
    with open(path, "w") as f:
        f.write("K,N,Rstar,L,bg_ratio_r_2r\n")
        for K, N, Rstar, L, ratio in rows:
            f.write(f"{K:.17g},{N:.17g},{Rstar:.17g},{L:.17g},{ratio:.17g}\n")
