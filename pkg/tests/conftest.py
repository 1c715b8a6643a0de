import math

import numpy as np
import pytest
from hypothesis import strategies as st

from swarmcover.geom2d import ConvexPolygon, GeometryError

PENTAGON_VERTS = ((1, 0), (6, 0), (8, 5), (5, 8), (0, 4))
SQUARE_VERTS = ((0, 0), (1, 0), (1, 1), (0, 1))
PENTAGON = ConvexPolygon.checked(PENTAGON_VERTS)


@pytest.fixture
def pentagon():
    return ConvexPolygon.checked(PENTAGON_VERTS)


@pytest.fixture
def square():
    return ConvexPolygon.checked(SQUARE_VERTS)


def random_convex(rng, k=None, scale=3.0):
    """Convex polygon from sorted random angles on a jittered ellipse."""
    while True:
        k = k or int(rng.integers(3, 9))
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        rad = rng.uniform(0.5, 1.0) * scale
        ax = rng.uniform(0.5, 1.5)
        c = rng.uniform(-2, 2, 2)
        pts = np.column_stack((c[0] + ax * rad * np.cos(ang), c[1] + rad * np.sin(ang)))
        try:
            return ConvexPolygon.checked(pts)
        except GeometryError:
            k = None


def points_in(poly, rng, n):
    """Uniform samples inside ``poly`` by rejection from its bounding box."""
    x0, y0, x1, y1 = poly.bounds()
    out = []
    while len(out) < n:
        p = rng.uniform((x0, y0), (x1, y1), (4 * n, 2))
        ok = np.all(poly.signed_distances(p) > 1e-6, axis=1)
        out.extend(p[ok])
    return np.array(out[:n])


seeds = st.integers(min_value=0, max_value=2**32 - 1)
