import numpy as np
import pytest

from guardsim import fixtures
from guardsim.geometry import Point, SimplePolygon


@pytest.fixture(scope="session")
def corpus():
    return fixtures.corpus()


@pytest.fixture
def l_hexagon():
    return fixtures.l_hexagon()


@pytest.fixture
def crown_hexagon():
    return fixtures.crown_hexagon()


def sample_interior(P: SimplePolygon, count: int, seed: int = 0,
                    margin: float = 0.0) -> np.ndarray:
    """Rejection-sample ``count`` interior points; optional boundary margin."""
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = P.bbox
    out = []
    while len(out) < count:
        pts = rng.uniform([x0, y0], [x1, y1], size=(4 * count, 2))
        mask = P.contains_many(pts)
        if margin > 0:
            mask &= ~_near_boundary(P, pts, margin)
        out.extend(pts[mask].tolist())
    return np.array(out[:count])


def _near_boundary(P: SimplePolygon, pts: np.ndarray, band: float) -> np.ndarray:
    e = P._edges_array()
    ax, ay = e[:, 0, 0], e[:, 0, 1]
    ex, ey = e[:, 1, 0] - ax, e[:, 1, 1] - ay
    seg2 = ex * ex + ey * ey
    px, py = pts[:, 0][:, None], pts[:, 1][:, None]
    t = np.clip(((px - ax) * ex + (py - ay) * ey) / seg2, 0.0, 1.0)
    dx = px - (ax + t * ex)
    dy = py - (ay + t * ey)
    return ((dx * dx + dy * dy) <= band * band).any(axis=1)


def ray_crossing_oracle(P: SimplePolygon, pts: np.ndarray) -> np.ndarray:
    """Independent even-odd containment check (no boundary tolerance)."""
    verts = [(v.x, v.y) for v in P.vertices]
    out = np.zeros(len(pts), dtype=bool)
    n = len(verts)
    for k, (px, py) in enumerate(pts):
        inside = False
        j = n - 1
        for i in range(n):
            xi, yi = verts[i]
            xj, yj = verts[j]
            if (yi > py) != (yj > py):
                xint = xi + (py - yi) * (xj - xi) / (yj - yi)
                if px < xint:
                    inside = not inside
            j = i
        out[k] = inside
    return out
