"""Phase-diagram classification over the coupling plane.

A parameter point is labeled by its stable equilibria first (an equilibrium
census is cheap and deterministic); only when no equilibrium is stable is the
long-time attractor simulated and split into oscillatory and chaotic, with
chaotic attractors further flagged as a localized pair or a merged symmetric
set.  One-dimensional scans refine the transition parameters by bisection on
the label, which is how the ordered regime sequences are produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chaos import classify_attractor
from .equilibria import find_equilibria
from .integrate import IntegrationError
from .model import SystemParams

__all__ = [
    "PhasePoint",
    "classify_point",
    "reflected_label",
    "scan_lambda_plus",
    "collapse_sequence",
    "sweep",
    "DEFAULT_SEED",
]

# Canonical near-North-pole seed, expressed in the projection chart:
# (b1, b2, gamma) = (0.001, 0.001, 0.4999) maps to (x, y) = (10, 10).
DEFAULT_SEED = np.array([0.001, 0.001, 10.0, 10.0])


@dataclass
class PhasePoint:
    """Label and evidence for one parameter point."""

    params: SystemParams
    label: str
    stable_labels: tuple = ()
    lyapunov_max: float = None
    locality: str = None


def _census_label(records) -> str:
    parts = []
    labels = [r.label for r in records if r.stable]
    if any(l.startswith("SR") for l in labels):
        parts.append("SR")
    if any(l.startswith("N_S") for l in labels):
        parts.append("N_down")
    if any(l.startswith("N_N") for l in labels):
        parts.append("N_up")
    return "+".join(parts)


def classify_point(p: SystemParams, s0=None, T_lyap=1000.0, transient=500.0,
                   tol=1e-8, split_chaos=True) -> PhasePoint:
    """Classify one point of the coupling plane.

    Stable-equilibrium labels are ``N_down``/``N_up`` for the polar normal
    phases, ``SR`` for superradiance and sums like ``SR+N_down`` for
    coexistence.  Without a stable equilibrium the seed trajectory decides
    between ``Osc``, ``Chaos_localized`` and ``Chaos_merged``
    (plain ``Chaos`` when ``split_chaos`` is off).
    """
    records = find_equilibria(p)
    stable = tuple(r.label for r in records if r.stable)
    label = _census_label(records)
    if label:
        return PhasePoint(p, label, stable)
    s0 = DEFAULT_SEED if s0 is None else np.asarray(s0, float)
    try:
        rep = classify_attractor(p, s0, transient=transient, T_lyap=T_lyap,
                                 tol=tol, with_locality=split_chaos)
    except IntegrationError:
        return PhasePoint(p, "Indeterminate", stable)
    if rep.kind == "chaotic":
        if not split_chaos:
            return PhasePoint(p, "Chaos", stable, rep.lyapunov_max)
        loc = rep.locality or ""
        if loc.startswith("localized"):
            lab = "Chaos_localized"
        elif loc.startswith("merged"):
            lab = "Chaos_merged"
        else:
            lab = "Chaos"
        return PhasePoint(p, lab, stable, rep.lyapunov_max, rep.locality)
    if rep.kind == "periodic":
        return PhasePoint(p, "Osc", stable, rep.lyapunov_max, rep.locality)
    if rep.kind == "equilibrium":
        # converged somewhere the census called unstable: marginal case
        return PhasePoint(p, "Indeterminate", stable, rep.lyapunov_max)
    return PhasePoint(p, "Indeterminate", stable)


def reflected_label(label: str) -> str:
    """Label under the parameter exchange (couplings swapped): poles flip."""
    return (label.replace("N_down", "@").replace("N_up", "N_down")
            .replace("@", "N_up"))


def _chaos_collapsed(label: str) -> str:
    return "Chaos" if label.startswith("Chaos") else label


def collapse_sequence(labels, merge_chaos=True) -> list:
    """Ordered distinct-regime sequence from pointwise labels."""
    out = []
    for lab in labels:
        if merge_chaos:
            lab = _chaos_collapsed(lab)
        if not out or out[-1] != lab:
            out.append(lab)
    return out


def scan_lambda_plus(lm: float, p: SystemParams, lp_range, n_coarse=28,
                     resolution=0.02, merge_chaos=True, **kw):
    """Regime sequence along ``lambda_+`` at fixed ``lambda_-``.

    A coarse scan is refined by bisection on every label change until the
    boundary is bracketed to ``resolution``; returns
    ``(sequence, samples)`` where ``samples`` is the sorted list of
    ``(lambda_+, label)`` actually computed.
    """
    base = p.with_couplings(lambda_minus=lm)

    cache = {}

    def lab(lp):
        if lp not in cache:
            cache[lp] = classify_point(
                base.with_couplings(lambda_plus=lp), **kw).label
        out = cache[lp]
        return _chaos_collapsed(out) if merge_chaos else out

    lps = list(np.linspace(lp_range[0], lp_range[1], n_coarse))
    for lp in lps:
        lab(lp)
    work = sorted(cache.keys())
    while True:
        refined = False
        for a, b in zip(work, work[1:]):
            if lab(a) != lab(b) and b - a > resolution:
                lab(0.5 * (a + b))
                refined = True
        if not refined:
            break
        work = sorted(cache.keys())
    samples = [(lp, cache[lp]) for lp in sorted(cache.keys())]
    seq = collapse_sequence([s[1] for s in samples], merge_chaos=merge_chaos)
    return seq, samples


def sweep(p: SystemParams, lm_values, lp_values, checkpoint=None, **kw):
    """Label grid over the coupling plane, row by row.

    ``checkpoint(lm, row)`` is called after each completed ``lambda_-`` row,
    so long sweeps can stream their output.  Returns a dict mapping
    ``(lambda_-, lambda_+)`` to labels.
    """
    out = {}
    for lm in lm_values:
        row = {}
        for lp in lp_values:
            pp = p.with_couplings(lambda_minus=lm, lambda_plus=lp)
            row[(lm, lp)] = classify_point(pp, **kw).label
        out.update(row)
        if checkpoint is not None:
            checkpoint(lm, row)
    return out
