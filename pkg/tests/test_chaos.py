"""Lyapunov spectra, spectral diagnostics, attractor locality."""

import numpy as np
import pytest

from dicke.chaos import (
    NotOneDimUnstable,
    classify_attractor,
    decimate_cloud,
    dominant_frequency,
    has_subharmonic,
    locality_flag,
    lyapunov_max,
    lyapunov_spectrum,
    mean_divergence,
    parity_distance,
    power_spectrum,
    unstable_manifold_1d,
)
from dicke.equilibria import origin_record
from dicke.integrate import flow, integrate
from dicke.model import SystemParams


def test_parity_distance_symmetric_cloud_is_zero():
    cloud = np.array([[1.0, 0.0, 2.0, 0.0], [-1.0, 0.0, -2.0, 0.0],
                      [0.5, 0.5, 0.5, 0.5], [-0.5, -0.5, -0.5, -0.5]])
    assert parity_distance(cloud) == 0.0
    assert locality_flag(cloud) == "merged-symmetric"


def test_locality_flag_localized_and_indeterminate():
    one_sided = np.array([[1.0, 1.0, 1.0, 1.0], [1.1, 1.0, 1.0, 1.0]])
    assert locality_flag(one_sided) == "localized-pair"
    # a single point at x=0.06 sits 0.12 from its parity image: inside the
    # (0.05, 0.2) indeterminate band
    near = np.array([[0.06, 0.0, 0.0, 0.0]])
    assert locality_flag(near).startswith("indeterminate")


def test_decimate_cloud_removes_duplicates():
    pts = np.array([[0.0, 0.0, 0.0, 0.0], [1e-5, 0.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0, 0.0]])
    out = decimate_cloud(pts, resolution=1e-3)
    assert len(out) == 2


def test_lyapunov_negative_at_stable_focus():
    p = SystemParams(1.0, 1.0, 1.0, 0.4, 0.4)
    lmax = lyapunov_max(p, np.array([0.01, 0.0, 0.02, 0.01]), T=200.0,
                        transient=50.0)
    assert lmax < -0.05


@pytest.mark.slow
def test_periodic_orbit_has_zero_exponent_and_divergence_sum():
    p = SystemParams(1.0, 1.0, 1.0, 1.0, 1.45)
    s0 = np.array([0.1, 0.0, 0.2, 0.1])
    spec = lyapunov_spectrum(p, s0, T=3000.0, k=4, transient=500.0)
    assert abs(spec[0]) < 1.5e-3        # neutral direction along the flow
    assert spec[1] < -1e-3              # attracting orbit
    y = flow(p, s0, 500.0)
    traj = integrate(p, y, (0.0, 300.0))
    div = mean_divergence(p, traj)
    assert np.sum(spec) == pytest.approx(div, rel=0.05)


@pytest.mark.slow
def test_power_spectrum_of_settled_orbit():
    p = SystemParams(1.0, 1.0, 1.0, 1.0, 1.45)
    y = flow(p, np.array([0.1, 0.0, 0.2, 0.1]), 500.0)
    traj = integrate(p, y, (0.0, 500.0))
    freq, mag = power_spectrum(traj)
    f0 = dominant_frequency(freq, mag)
    assert f0 > 0.01
    assert not has_subharmonic(freq, mag, f0)


def test_unstable_manifold_two_sides():
    p = SystemParams(1.0, 1.0, 1.0, 0.8, 1.61)
    rec = origin_record(p)
    a, b = unstable_manifold_1d(p, rec, t_max=30.0)
    # the two sides are parity images of each other at matched times
    assert a.states.shape[1] == 4
    assert np.linalg.norm(a.states[-1]) > 0.1
    assert np.linalg.norm(b.states[-1]) > 0.1


def test_unstable_manifold_rejects_stable_point():
    p = SystemParams(1.0, 1.0, 1.0, 0.4, 0.4)
    with pytest.raises(NotOneDimUnstable):
        unstable_manifold_1d(p, origin_record(p))


@pytest.mark.slow
def test_classify_attractor_kinds():
    eq = classify_attractor(SystemParams(1.0, 1.0, 1.0, 0.4, 0.4),
                            np.array([0.01, 0.0, 0.02, 0.01]),
                            T_lyap=200.0)
    assert eq.kind == "equilibrium"
    per = classify_attractor(SystemParams(1.0, 1.0, 1.0, 1.0, 1.45),
                             np.array([0.1, 0.0, 0.2, 0.1]), T_lyap=500.0)
    assert per.kind == "periodic"
    assert per.period is not None and per.period > 0
