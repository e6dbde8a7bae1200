"""Basins of attraction on the Bloch sphere of initial spin states.

Initial conditions are spin points on the conserved sphere with an empty
cavity; each is integrated in the full five-dimensional system until it
settles onto one of the stable equilibria (or times out).  The grid is an
equal-area latitude-band partition, so cell counts are area fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import find_equilibria
from .integrate import DEFAULT_TOL, _solve
from .model import SystemParams, rhs_full

__all__ = [
    "BasinMap",
    "sphere_grid",
    "basin_map",
    "basin_fractions",
    "UNRESOLVED",
    "CONVERGENCE_RADIUS",
]

UNRESOLVED = "unresolved"
# Full-state distance at which a trajectory counts as settled.
CONVERGENCE_RADIUS = 1e-4


@dataclass
class BasinMap:
    """Classified initial-condition grid at one parameter point."""

    params: SystemParams
    points: np.ndarray        # (n, 3) spin points (b1, b2, gamma)
    labels: list              # one attractor label per point
    equilibria: list          # the EquilibriumRecords used as targets

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("b1,b2,gamma,label\n")
            for (b1, b2, g), lab in zip(self.points, self.labels):
                fh.write("%.17g,%.17g,%.17g,%s\n" % (b1, b2, g, lab))


def sphere_grid(n: int) -> np.ndarray:
    """Equal-area latitude-band grid of ``n`` points on the spin sphere.

    Bands are equally spaced in ``gamma`` (equal area, by Archimedes'
    theorem) and each band carries a point count proportional to its
    circumference, adjusted by largest remainder so the total is exactly
    ``n``.  Points sit at cell centers.
    """
    if n < 1:
        raise ValueError("need at least one grid point")
    nb = max(1, int(round(math.sqrt(n / 2.0))))
    edges = np.linspace(-0.5, 0.5, nb + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    circ = np.sqrt(np.maximum(0.25 - centers**2, 0.0))
    raw = n * circ / np.sum(circ)
    counts = np.floor(raw).astype(int)
    counts = np.maximum(counts, 1)
    rem = n - int(np.sum(counts))
    order = np.argsort(-(raw - np.floor(raw)))
    i = 0
    while rem != 0:
        j = order[i % nb]
        if rem > 0:
            counts[j] += 1
            rem -= 1
        elif counts[j] > 1:
            counts[j] -= 1
            rem += 1
        i += 1
    pts = []
    for g, k in zip(centers, counts):
        r = math.sqrt(max(0.25 - g * g, 0.0))
        phis = 2.0 * math.pi * (np.arange(k) + 0.5) / k
        for phi in phis:
            pts.append((r * math.cos(phi), r * math.sin(phi), g))
    return np.array(pts)


def _target_states(records):
    out = []
    for rec in records:
        if not rec.stable:
            continue
        b1, b2, g = rec.sphere
        # cavity components are chart-independent (the pole reflection
        # underlying the second chart leaves them untouched)
        out.append((rec.label, np.array([rec.state[0], rec.state[1],
                                         b1, b2, g])))
    return out


def basin_map(p: SystemParams, n=256, t_max=2000.0, chunk=100.0,
              tol=1e-8, radius=CONVERGENCE_RADIUS) -> BasinMap:
    """Forward-simulation basin classification on an ``n``-point spin grid.

    Each grid point starts with an empty cavity and is integrated until it
    enters ``radius`` of a stable equilibrium (terminal events on all
    targets) or ``t_max`` elapses, in which case it is labeled unresolved.
    """
    records = find_equilibria(p)
    targets = _target_states(records)
    if not targets:
        raise ValueError(f"no stable equilibrium at {p} to converge to")
    pts = sphere_grid(n)
    labels = []
    for b1, b2, g in pts:
        y = np.array([0.0, 0.0, b1, b2, g])
        labels.append(_settle(p, y, targets, t_max, tol, radius))
    return BasinMap(p, pts, labels, records)


def _settle(p, y, targets, t_max, tol, radius):
    events = []
    for _, ts in targets:
        def ev(t, z, ts=ts):
            return float(np.linalg.norm(z - ts)) - radius
        ev.terminal = True
        events.append(ev)
    res = _solve(lambda t, z: rhs_full(z, p), y, (0.0, t_max), tol,
                 events=events, dense=False)
    if res.status == 1:
        for (label, _), te in zip(targets, res.t_events):
            if len(te):
                return label
    return UNRESOLVED


def basin_fractions(bm: BasinMap) -> dict:
    """Fraction of the sphere converging to each attractor label."""
    out = {}
    for lab in bm.labels:
        out[lab] = out.get(lab, 0) + 1
    return {k: v / len(bm.labels) for k, v in out.items()}
