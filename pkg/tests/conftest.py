import numpy as np
import pytest

from lorvol import MinkowskiSpace


@pytest.fixture
def mink2():
    return MinkowskiSpace(2)


@pytest.fixture
def mink3():
    return MinkowskiSpace(3)


def random_causal_chain(space, rng, count=3, spread=1.0):
    """Random chain p_0 <= p_1 <= ... built by stacking causal steps."""
    pts = [rng.uniform(-spread, spread, size=space.n)]
    for _ in range(count - 1):
        dt = rng.uniform(0.05, spread)
        dx = rng.uniform(-1.0, 1.0, size=space.n - 1)
        nrm = np.linalg.norm(dx)
        if nrm > 0:
            # keep the step strictly inside the cone
            dx = dx / nrm * rng.uniform(0.0, 0.95) * space.C * dt
        pts.append(pts[-1] + np.concatenate([[dt], dx]))
    return pts
