"""Basins of attraction on the spin sphere."""

import numpy as np
import pytest

from dicke.basins import (
    UNRESOLVED,
    basin_fractions,
    basin_map,
    sphere_grid,
)
from dicke.model import SystemParams


def test_sphere_grid_exact_count_and_on_sphere():
    for n in (16, 64, 257):
        pts = sphere_grid(n)
        assert pts.shape == (n, 3)
        r2 = np.sum(pts ** 2, axis=1)
        np.testing.assert_allclose(r2, 0.25, atol=1e-12)


def test_sphere_grid_equal_area_bands():
    pts = sphere_grid(512)
    # equal-area banding puts comparable point counts in equal gamma slabs
    lo = np.sum(pts[:, 2] < -1.0 / 6.0)
    mid = np.sum(np.abs(pts[:, 2]) <= 1.0 / 6.0)
    hi = np.sum(pts[:, 2] > 1.0 / 6.0)
    assert max(lo, mid, hi) - min(lo, mid, hi) < 0.2 * 512


def test_sphere_grid_rejects_empty():
    with pytest.raises(ValueError):
        sphere_grid(0)


def test_basin_map_requires_a_stable_target():
    # just above the balanced critical coupling the origin is unstable and
    # the attractor is not an equilibrium
    with pytest.raises(ValueError):
        basin_map(SystemParams(1.0, 1.0, 1.0, 1.0, 1.45), n=4)


@pytest.mark.slow
def test_multistable_wedge_fractions():
    p = SystemParams(1.0, 1.0, 1.0, 2.0, 0.9)
    bm = basin_map(p, n=64)
    fr = basin_fractions(bm)
    assert UNRESOLVED not in fr
    down = sum(v for k, v in fr.items() if k.startswith("N_S"))
    sr = sum(v for k, v in fr.items() if k.startswith("SR"))
    assert down == pytest.approx(0.703, abs=0.08)
    assert sr == pytest.approx(0.297, abs=0.08)
    # the superradiant lobes sit toward the upper hemisphere
    sr_pts = bm.points[[lab.startswith("SR") for lab in bm.labels]]
    assert np.mean(sr_pts[:, 2]) > np.mean(bm.points[:, 2])
