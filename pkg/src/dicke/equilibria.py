"""Equilibrium location, stability classification and analytic curves.

The normal-phase equilibria are the two poles of the Bloch sphere: the South
pole is the origin of the projected system, and the North pole is handled in
the second chart (where it is the origin of the parameter-exchanged system).
Superradiant equilibria are found by Newton iteration from deterministic
seeds.  The analytic bifurcation curves (pitchfork, saddle-node, pole-flip,
their intersections and the natural-parameter variants) are closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from .model import (
    SystemParams,
    bialternate_2i,
    chart_to_sphere,
    jacobian_proj,
    param_exchange,
    parity,
    rhs_proj,
)

__all__ = [
    "EquilibriumRecord",
    "KappaZero",
    "MuCurvePole",
    "NewtonDivergence",
    "find_equilibria",
    "newton_equilibrium",
    "origin_record",
    "north_pole_record",
    "pitchfork_curve",
    "pitchfork_quartic",
    "saddle_node_slopes",
    "saddle_node_quartic",
    "psn_points",
    "pole_flip_lambda_plus",
    "fp_points",
    "mu_pitchfork",
    "mu_saddle_node_slope",
    "mu_from_lambda",
    "lambda_from_mu",
    "critical_omega0",
    "balanced_critical_coupling",
    "STABILITY_EIG_TOL",
]

# Eigenvalue real parts within this of zero are counted as marginal.
STABILITY_EIG_TOL = 1e-9

RESIDUAL_TOL = 1e-10


class KappaZero(ValueError):
    pass


class MuCurvePole(ValueError):
    """The pitchfork curve in mu coordinates has a pole at mu_-^2 = omega*omega0."""


class NewtonDivergence(RuntimeError):
    pass


@dataclass
class EquilibriumRecord:
    """A located equilibrium with its linearization.

    ``chart`` is ``"north-projection"`` for states expressed in the standard
    chart and ``"south-projection"`` for the North pole, which only the second
    chart can represent.  ``sphere`` always carries ``(b1, b2, gamma)``.
    """

    state: np.ndarray
    eigenvalues: np.ndarray
    unstable_count: int
    label: str
    chart: str = "north-projection"
    marginal: bool = False
    sphere: tuple = None

    @property
    def stable(self) -> bool:
        return self.unstable_count == 0 and not self.marginal

    def jacobian(self, p: SystemParams) -> np.ndarray:
        pp = param_exchange(p) if self.chart == "south-projection" else p
        return jacobian_proj(self.state, pp)


def _classify(eigs):
    re = eigs.real
    unstable = int(np.sum(re > STABILITY_EIG_TOL))
    marginal = bool(np.any(np.abs(re) <= STABILITY_EIG_TOL))
    return unstable, marginal


def _record(state, p, label_root, chart="north-projection"):
    pp = param_exchange(p) if chart == "south-projection" else p
    eigs = np.linalg.eigvals(jacobian_proj(state, pp))
    eigs = eigs[np.argsort(-eigs.real)]
    unstable, marginal = _classify(eigs)
    if chart == "south-projection" and np.allclose(state, 0.0):
        sphere = (0.0, 0.0, 0.5)
    else:
        sphere = chart_to_sphere(state[2], state[3])
        if chart == "south-projection":
            sphere = (sphere[0], -sphere[1], -sphere[2])
    label = f"{label_root}{unstable}"
    return EquilibriumRecord(np.asarray(state, float), eigs, unstable, label,
                             chart, marginal, sphere)


def origin_record(p: SystemParams) -> EquilibriumRecord:
    """South pole equilibrium (origin of the projected system)."""
    return _record(np.zeros(4), p, "N_S_")


def north_pole_record(p: SystemParams) -> EquilibriumRecord:
    """North pole equilibrium, expressed in the second chart."""
    return _record(np.zeros(4), p, "N_N_", chart="south-projection")


def newton_equilibrium(p: SystemParams, seed, tol=RESIDUAL_TOL):
    """Newton solve of ``rhs_proj = 0`` from ``seed``.

    Raises
    ------
    NewtonDivergence
        If the iteration does not converge below ``tol``.
    """
    res = root(lambda y: rhs_proj(y, p), np.asarray(seed, float),
               jac=lambda y: jacobian_proj(y, p), method="hybr",
               options={"xtol": 1e-13})
    r = np.linalg.norm(rhs_proj(res.x, p))
    if not res.success and r > tol:
        raise NewtonDivergence(f"no convergence from {seed}: residual {r:.2e}")
    if r > tol:
        raise NewtonDivergence(f"stalled at residual {r:.2e}")
    return res.x


def field_amplitude(x: float, y: float, p: SystemParams):
    """Cavity field ``(a1, a2)`` in equilibrium with the spin point ``(x, y)``."""
    b1, b2, _ = chart_to_sphere(x, y)
    c1 = (p.lambda_minus + p.lambda_plus) * b1
    c2 = (p.lambda_minus - p.lambda_plus) * b2
    n = p.kappa**2 + p.omega**2
    return (c2 * p.kappa - c1 * p.omega) / n, -(c1 * p.kappa + c2 * p.omega) / n


def _reduced_spin_residual(xy, p):
    a1, a2 = field_amplitude(xy[0], xy[1], p)
    return rhs_proj((a1, a2, xy[0], xy[1]), p)[2:]


# Deterministic spin-plane seeds; the reduced problem is two-dimensional so a
# coarse grid reliably reaches every superradiant pair.
_SPIN_SEEDS = tuple(
    (sx, sy)
    for sx in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
    for sy in (-2.0, -1.0, -0.3, 0.3, 1.0, 2.0)
)


def find_equilibria(p: SystemParams, dedup_tol=1e-6) -> list:
    """All equilibria of the projected system at parameters ``p``.

    Returns the two poles plus any superradiant equilibria.  Superradiant
    points are found deterministically: the cavity field is eliminated via its
    own equilibrium condition and the remaining two-dimensional spin problem
    is Newton-solved from a fixed seed grid, then polished in the full
    four-dimensional system.  The list is closed under parity.
    """
    records = [origin_record(p), north_pole_record(p)]
    found = []
    for seed in _SPIN_SEEDS:
        res = root(_reduced_spin_residual, np.array(seed), args=(p,),
                   method="hybr", options={"xtol": 1e-13})
        if not res.success:
            continue
        x, y = res.x
        if x * x + y * y < 1e-10:
            continue  # South pole
        a1, a2 = field_amplitude(x, y, p)
        try:
            s = newton_equilibrium(p, np.array([a1, a2, x, y]))
        except NewtonDivergence:
            continue
        if np.linalg.norm(s) < 1e-8:
            continue
        for cand in (s, parity(s)):
            if all(np.linalg.norm(cand - f) > dedup_tol for f in found):
                found.append(cand)
    for s in found:
        records.append(_record(s, p, "SR_"))
    return records


# ---------------------------------------------------------------------------
# analytic curves


def pitchfork_quartic(lm, lp, p: SystemParams) -> float:
    """Residual of the quartic condition det J = 0 at the South pole."""
    return ((lm**2 - lp**2) ** 2
            - 2.0 * p.omega * p.omega0 * (lm**2 + lp**2)
            + p.omega0**2 * (p.kappa**2 + p.omega**2))


def pitchfork_curve(lm: float, p: SystemParams) -> tuple:
    """Real values of lambda_+ on the pitchfork curve at given lambda_-.

    Returns zero, one or two values, sorted ascending.
    """
    inner = p.omega0 * (4.0 * p.omega * lm**2 - p.kappa**2 * p.omega0)
    if inner < 0.0:
        return ()
    roots = []
    for sign in (-1.0, 1.0):
        v = lm**2 + p.omega * p.omega0 + sign * math.sqrt(inner)
        if v >= 0.0:
            roots.append(math.sqrt(v))
    return tuple(sorted(set(roots)))


def saddle_node_quartic(lm, lp, p: SystemParams) -> float:
    """Residual of the quartic condition for saddle-node bifurcations."""
    return (p.kappa**2 * (lm**2 - lp**2) ** 2
            - 4.0 * p.omega**2 * lm**2 * lp**2)


def saddle_node_slopes(p: SystemParams) -> tuple:
    """Slopes of the two saddle-node lines in the positive quadrant.

    Returned ascending: ``(slope of SN-, slope of SN+)``.
    """
    if p.kappa == 0.0:
        raise KappaZero("saddle-node lines require kappa > 0")
    h = math.hypot(p.omega, p.kappa)
    return ((h - p.omega) / p.kappa, (h + p.omega) / p.kappa)


def psn_points(p: SystemParams) -> tuple:
    """The two pitchfork-saddle-node codimension-two points ``(lm, lp)``."""
    h2 = p.omega**2 + p.kappa**2
    h = math.sqrt(h2)
    pts = []
    for sign in (1.0, -1.0):
        lm = math.sqrt(p.omega0 * (h2 + sign * p.omega * h) / (2.0 * p.omega))
        lp = math.sqrt(p.omega0 * (h2 - sign * p.omega * h) / (2.0 * p.omega))
        pts.append((lm, lp))
    return tuple(pts)


def pole_flip_lambda_plus(lm: float, p: SystemParams) -> float:
    """lambda_+ on the pole-flip transition line F at given lambda_-."""
    num = p.kappa**2 + (p.omega + p.omega0) ** 2
    den = p.kappa**2 + (p.omega - p.omega0) ** 2
    return math.sqrt(num / den) * lm


def fp_points(p: SystemParams) -> tuple:
    """Intersections FP1, FP2 of the pole-flip line with the pitchfork curve."""
    k2 = p.kappa**2
    fp1 = tuple(
        0.5 * math.sqrt(p.omega0 * (k2 + (p.omega + s * p.omega0) ** 2) / p.omega)
        for s in (-1.0, 1.0)
    )
    fp2 = tuple(
        0.5 * math.sqrt((k2 + p.omega**2) * (k2 + (p.omega + s * p.omega0) ** 2)
                        / (p.omega * p.omega0))
        for s in (-1.0, 1.0)
    )
    return fp1, fp2


def mu_from_lambda(lm, lp):
    """Natural parameters ``mu_+- = lambda_+ +- lambda_-``."""
    return lp - lm, lp + lm


def lambda_from_mu(mu_minus, mu_plus):
    return (mu_plus - mu_minus) / 2.0, (mu_plus + mu_minus) / 2.0


def mu_pitchfork(mu_minus: float, p: SystemParams) -> float:
    """Pitchfork curve expressed in the natural parameters (positive branch)."""
    ww0 = p.omega * p.omega0
    den = mu_minus**2 - ww0
    if den == 0.0:
        raise MuCurvePole("mu_-^2 = omega*omega0")
    num = ww0 * mu_minus**2 - p.omega0**2 * (p.kappa**2 + p.omega**2)
    val = num / den
    if val < 0.0:
        raise ValueError("no real pitchfork point at this mu_-")
    return math.sqrt(val)


def mu_saddle_node_slope(p: SystemParams) -> float:
    """Slope of the saddle-node line in the natural parameters (small branch).

    The other saddle-node line has the reciprocal slope.
    """
    k2 = p.kappa**2
    return math.sqrt(2.0 * k2 + p.omega**2
                     - 2.0 * p.kappa * math.sqrt(k2 + p.omega**2)) / p.omega


def critical_omega0(p: SystemParams) -> float:
    """Detuning at which the pole-flip line crosses the SN+ line."""
    return math.hypot(p.omega, p.kappa)


def balanced_critical_coupling(p: SystemParams) -> float:
    """Coupling where the diagonal lambda_- = lambda_+ meets the pitchfork curve."""
    return math.sqrt(p.omega0 * (p.omega**2 + p.kappa**2) / (4.0 * p.omega))
