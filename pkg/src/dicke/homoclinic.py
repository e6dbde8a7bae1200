"""Homoclinic connections to saddle equilibria, by shooting along the
unstable manifold.

Shooting-based monodromy becomes useless for orbits whose period is dominated
by a slow saddle passage (the tangent flow overflows), so homoclinic orbits
are approximated differently: the one-dimensional unstable manifold of the
saddle is integrated until it comes back near the saddle, the coupling
``lambda_+`` is tuned to minimize the return miss distance, and the close
return is glued to the departure through the linearized flow at the saddle.
The glued object is a periodic pseudo-orbit whose period can be made
arbitrarily long by lengthening the near-saddle dwell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.signal import find_peaks

from .chaos import NotOneDimUnstable
from .equilibria import EquilibriumRecord, find_equilibria, newton_equilibrium
from .integrate import Trajectory, integrate
from .model import SystemParams, jacobian_proj, rhs_proj

__all__ = [
    "HomoclinicApproximation",
    "NoReturn",
    "unstable_direction",
    "manifold_excursion",
    "manifold_miss",
    "unstable_gap",
    "tune_homoclinic",
    "homoclinic_approximation",
    "count_loops",
    "origin_return_distance",
]


class NoReturn(RuntimeError):
    """The manifold never re-enters the saddle neighborhood."""


@dataclass
class HomoclinicApproximation:
    """A long-period pseudo-orbit approximating a homoclinic connection."""

    params: SystemParams
    saddle: np.ndarray
    times: np.ndarray
    states: np.ndarray
    period: float
    loop_count: int
    miss_distance: float

    @property
    def a1(self) -> np.ndarray:
        return self.states[:, 0]


def unstable_direction(p: SystemParams, saddle) -> np.ndarray:
    """Unit vector along the (unique real) unstable eigendirection."""
    w, V = np.linalg.eig(jacobian_proj(saddle, p))
    pos = np.where((w.real > 1e-9) & (np.abs(w.imag) < 1e-9))[0]
    if len(pos) != 1:
        raise NotOneDimUnstable(f"eigenvalues {w}")
    v = np.real(V[:, pos[0]])
    return v / np.linalg.norm(v)


def manifold_excursion(p: SystemParams, saddle, side=1.0, delta=1e-7,
                       r_leave=0.3, t_max=60.0, tol=1e-10, n_dense=6000):
    """One excursion of the unstable manifold and its distance-to-saddle trace.

    Integrates from ``delta`` along the unstable direction, and reports the
    densely sampled trajectory together with the distance to the saddle,
    restricted to the part after the orbit has first left the ball of radius
    ``r_leave``.  Returns ``(traj, t_grid, dist)``.
    """
    saddle = np.asarray(saddle, float)
    v = unstable_direction(p, saddle)
    traj = integrate(p, saddle + side * delta * v, (0.0, t_max), tol=tol)
    t = np.linspace(0.0, traj.times[-1], n_dense)
    y = traj.sol(t).T
    dist = np.linalg.norm(y - saddle, axis=1)
    outside = np.where(dist > r_leave)[0]
    if len(outside) == 0:
        raise NoReturn("manifold never left the saddle neighborhood")
    i0 = outside[0]
    # drop the outgoing leg up to the first distance peak, so that the
    # departure point itself can never masquerade as a return
    peaks, _ = find_peaks(dist[i0:], prominence=0.05 * np.max(dist[i0:]))
    if len(peaks) == 0:
        raise NoReturn("manifold never turned back toward the saddle")
    im = i0 + peaks[0]
    return traj, t[im:], dist[im:]


def manifold_miss(lp: float, base: SystemParams, saddle_seed, side=1.0,
                  t_max=60.0, tol=1e-10) -> float:
    """Minimum return distance of the unstable manifold at ``lambda_+ = lp``.

    Diagnostic only: for a saddle focus with a small Shilnikov ratio this
    distance shrinks like ``|dlam|`` to the power of that ratio, far too flat
    to optimize.  Use :func:`unstable_gap` to locate the connection.
    """
    p = base.with_couplings(lambda_plus=lp)
    saddle = newton_equilibrium(p, saddle_seed)
    _, _, dist = manifold_excursion(p, saddle, side=side, t_max=t_max, tol=tol)
    return float(np.min(dist))


def _left_unstable(J) -> np.ndarray:
    """Left eigenvector of the unstable eigenvalue, with a deterministic sign."""
    w, VL = np.linalg.eig(J.T)
    i = int(np.argmax(w.real))
    wu = np.real(VL[:, i])
    wu /= np.linalg.norm(wu)
    j = int(np.argmax(np.abs(wu)))
    return wu if wu[j] > 0 else -wu


def unstable_gap(lp: float, base: SystemParams, saddle_seed, side=1.0,
                 t_max=60.0, tol=1e-10):
    """Signed unstable coordinate of the closest return to the saddle.

    The deviation of the return point from the saddle is projected onto the
    left eigenvector of the unstable eigenvalue; to linear order the orbit
    lies on the stable manifold exactly when this vanishes, and the sign
    flips as ``lambda_+`` crosses the homoclinic value, so the connection can
    be bisected.  Returns ``(gap, return_distance)``.
    """
    p = base.with_couplings(lambda_plus=lp)
    saddle = newton_equilibrium(p, saddle_seed)
    wu = _left_unstable(jacobian_proj(saddle, p))
    traj, t, dist = manifold_excursion(p, saddle, side=side, t_max=t_max,
                                       tol=tol)
    j = int(np.argmin(dist))
    q = traj.sol(t[j])
    return float(wu @ (q - saddle)), float(dist[j])


def tune_homoclinic(base: SystemParams, lp_bracket, saddle_seed, side=1.0,
                    t_max=60.0, tol=1e-10, xtol=1e-9, n_scan=12,
                    max_return=0.35):
    """Bisect the signed unstable gap to the homoclinic ``lambda_+``.

    The bracket is scanned for an adjacent sign change whose return distance
    stays below ``max_return`` on both sides (a far-away excursion can carry
    a spurious sign), then refined with brentq.  Returns
    ``(lp_star, gap_at_root)``.
    """
    lps = np.linspace(lp_bracket[0], lp_bracket[1], n_scan)
    vals = [unstable_gap(lp, base, saddle_seed, side, t_max, tol)
            for lp in lps]
    for (la, (ga, da)), (lb, (gb, db)) in zip(zip(lps, vals),
                                              zip(lps[1:], vals[1:])):
        if ga * gb >= 0 or da > max_return or db > max_return:
            continue
        lp_star = brentq(
            lambda l: unstable_gap(l, base, saddle_seed, side, t_max,
                                   tol)[0],
            la, lb, xtol=xtol)
        g_star, d_star = unstable_gap(lp_star, base, saddle_seed, side,
                                      t_max, tol)
        # a sign change across a jump of the return selection is not a
        # connection; the gap must actually vanish at the refined point
        if abs(g_star) < 1e-4 and d_star < max_return:
            return lp_star, g_star
    raise NoReturn(f"no valid gap sign change in {lp_bracket}")


def count_loops(states, saddle, min_prominence=0.25) -> int:
    """Number of large excursion loops in a trajectory sample.

    Loops are prominent peaks of the state-space distance to the saddle; the
    prominence cutoff is relative to the largest excursion so small
    near-saddle oscillations do not count.
    """
    states = np.asarray(states, float)
    dev = np.linalg.norm(states - np.asarray(saddle, float), axis=1)
    big = np.max(dev)
    if big <= 0:
        return 0
    peaks, _ = find_peaks(dev, prominence=min_prominence * big)
    return int(len(peaks))


def homoclinic_approximation(base: SystemParams, lp: float, saddle_seed,
                             side=1.0, T_target=300.0, t_max=60.0,
                             tol=1e-10) -> HomoclinicApproximation:
    """Glued long-period approximation of a homoclinic orbit at ``lambda_+ = lp``.

    The manifold excursion is cut at its closest return to the saddle and the
    remaining time up to ``T_target`` is filled with the linearized near-saddle
    passage ``saddle + exp(J t) (q - saddle)``, which decays along the stable
    eigenspace.  The reported ``miss_distance`` is the gluing defect.
    """
    p = base.with_couplings(lambda_plus=lp)
    saddle = newton_equilibrium(p, saddle_seed)
    traj, t_grid, dist = manifold_excursion(p, saddle, side=side,
                                            t_max=t_max, tol=tol)
    i_min = int(np.argmin(dist))
    t_cut = t_grid[i_min]
    miss = float(dist[i_min])
    n_exc = 4000
    te = np.linspace(0.0, t_cut, n_exc)
    ye = traj.sol(te).T
    q = ye[-1]
    # near-saddle passage: evolve only the stable modes of the linearization
    # (the unstable component of the return equals the gap defect and would
    # blow up the matrix exponential over a long dwell)
    J = jacobian_proj(saddle, p)
    w, V = np.linalg.eig(J)
    c = np.linalg.solve(V, (q - saddle).astype(complex))
    sel = w.real <= 0
    ws, Vs, cs = w[sel], V[:, sel], c[sel]
    t_dwell = max(T_target - t_cut, 0.0)
    td = np.linspace(0.0, t_dwell, 2000)[1:]
    yd = np.real(np.array([Vs @ (cs * np.exp(ws * t)) for t in td])) + saddle
    times = np.concatenate([te, t_cut + td])
    states = np.vstack([ye, yd])
    loops = count_loops(ye, saddle)
    return HomoclinicApproximation(p, saddle, times, states,
                                   float(times[-1]), loops, miss)


def origin_return_distance(p: SystemParams, t_max=80.0, tol=1e-10,
                           r_leave=0.3, n_valleys=8) -> float:
    """Early-return distance of the origin's unstable manifold to the origin.

    A multi-loop connection spirals through several distance valleys before
    closing, so the reported value is the minimum over the first ``n_valleys``
    close approaches after the initial excursion.  Later approaches are
    excluded on purpose: a chaotic attractor revisits the origin neighborhood
    indefinitely and its global minimum says nothing about the manifold
    geometry.  Both sides of the manifold are parity images, so one side
    suffices.
    """
    v = unstable_direction(p, np.zeros(4))
    traj = integrate(p, 1e-6 * v, (0.0, t_max), tol=tol)
    t = np.linspace(0.0, traj.times[-1], 20000)
    d = np.linalg.norm(traj.sol(t).T, axis=1)
    outside = np.where(d > r_leave)[0]
    if len(outside) == 0:
        raise NoReturn("manifold never left the origin neighborhood")
    i0 = outside[0]
    valleys, _ = find_peaks(-d[i0:])
    if len(valleys) == 0:
        raise NoReturn("manifold never turned back toward the origin")
    return float(np.min(d[i0:][valleys[:n_valleys]]))
