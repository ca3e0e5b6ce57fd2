import math

import numpy as np
import pytest

from ccfour import CanonicalFrame, MassVector, PlanarConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20250823)


def random_convex_config(rng, masses: MassVector | None = None) -> PlanarConfig:
    """Random convex quadrilateral with vertices 1,2 and 3,4 on the diagonals."""
    if masses is None:
        masses = MassVector(alpha=1.0, beta=1.0)
    frame = CanonicalFrame(
        u=float(rng.uniform(0.5, 2.0)),
        v=float(rng.uniform(0.5, 2.0)),
        t=float(rng.uniform(0.5, 2.0)),
        s=float(rng.uniform(0.5, 2.0)),
        theta=float(rng.uniform(0.35 * math.pi, 0.65 * math.pi)),
    )
    return frame.reconstruct(masses)


def unit_square_config(masses: MassVector | None = None) -> PlanarConfig:
    if masses is None:
        masses = MassVector(alpha=1.0, beta=1.0)
    h = math.sqrt(2.0) / 2.0
    pts = [[-h, 0.0], [h, 0.0], [0.0, h], [0.0, -h]]
    return PlanarConfig.from_points(pts, masses)
