"""Branch following and bifurcation detection.

Equilibrium branches are continued in ``lambda_+`` by pseudo-arclength with a
Newton corrector, monitoring ``det J`` (fold/pitchfork test) and
``det(J (.) 2I)`` (Hopf test).  Periodic orbits are found and continued by
single shooting with the monodromy from variational integration; a Floquet
multiplier crossing -1 flags a period doubling, a second multiplier crossing
+1 a fold of periodic orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .equilibria import EquilibriumRecord, newton_equilibrium, find_equilibria
from .integrate import (IntegrationError, flow, integrate, monodromy,
                        poincare_crossings)
from .model import (
    SystemParams,
    bialternate_2i,
    jacobian_proj,
    parity,
    rhs_proj,
)

__all__ = [
    "Branch",
    "BifurcationEvent",
    "PeriodicOrbit",
    "CorrectorDivergence",
    "ShootingDivergence",
    "NotSaddleFocus",
    "continue_equilibrium",
    "track_equilibrium",
    "superradiant_equilibrium",
    "hopf_lambda_plus",
    "find_orbit",
    "orbit_from_attractor",
    "start_orbit_from_hopf",
    "continue_orbit",
    "branch_switch_pd",
    "advance_orbit",
    "period_doubling_lambda",
    "pd_cascade_accumulation",
    "shilnikov_ratio",
    "trace_hopf_curve",
]


class CorrectorDivergence(RuntimeError):
    pass


class ShootingDivergence(RuntimeError):
    pass


class NotSaddleFocus(ValueError):
    pass


@dataclass
class BifurcationEvent:
    kind: str        # "SN" | "P" | "H" | "PD" | "SNP" | "HOM-approach"
    param: float
    state: np.ndarray
    data: dict = field(default_factory=dict)


@dataclass
class Branch:
    """Ordered continuation output along one free parameter."""

    params: list = field(default_factory=list)
    states: list = field(default_factory=list)
    test_detJ: list = field(default_factory=list)
    test_bialt: list = field(default_factory=list)
    periods: list = field(default_factory=list)
    multipliers: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("param,s0,s1,s2,s3,T,test_detJ,test_bialt,event\n")
            ev = {round(e.param, 12): e.kind for e in self.events}
            for i, lam in enumerate(self.params):
                T = self.periods[i] if self.periods else float("nan")
                row = [lam, *self.states[i],
                       T if T is not None else float("nan"),
                       self.test_detJ[i] if self.test_detJ else float("nan"),
                       self.test_bialt[i] if self.test_bialt else float("nan")]
                fh.write(",".join("%.17g" % v for v in row)
                         + "," + ev.get(round(lam, 12), "") + "\n")


def _tests(state, p):
    J = jacobian_proj(state, p)
    return float(np.linalg.det(J)), float(np.linalg.det(bialternate_2i(J)))


def _corrector(p, z_pred, tangent, lam_of, max_iter=12):
    """Newton solve of [rhs; arclength constraint] for z = (state, lambda_+)."""
    z = z_pred.copy()
    for _ in range(max_iter):
        pz = lam_of(z[4])
        r = rhs_proj(z[:4], pz)
        c = float(tangent @ (z - z_pred))
        if np.linalg.norm(r) < 1e-11 and abs(c) < 1e-11:
            return z
        J = jacobian_proj(z[:4], pz)
        dlam = (rhs_proj(z[:4], lam_of(z[4] + 1e-7))
                - rhs_proj(z[:4], lam_of(z[4] - 1e-7))) / 2e-7
        A = np.zeros((5, 5))
        A[:4, :4] = J
        A[:4, 4] = dlam
        A[4] = tangent
        z = z - np.linalg.solve(A, np.concatenate([r, [c]]))
    raise CorrectorDivergence("pseudo-arclength corrector stalled")


def continue_equilibrium(p: SystemParams, state0, lp_range, step=1e-2,
                         step_bounds=(1e-5, 1e-1), max_points=20000) -> Branch:
    """Pseudo-arclength continuation of an equilibrium in ``lambda_+``.

    Fold/pitchfork events come from sign changes of ``det J`` (a pitchfork is
    reported when the continued equilibrium is parity-symmetric, a fold
    otherwise); Hopf events from sign changes of the bialternate determinant
    that carry a purely imaginary pair.  Events are secant-refined in the
    parameter to 1e-8.
    """
    lam_of = lambda lp: p.with_couplings(lambda_plus=max(lp, 0.0))
    lp0, lp1 = lp_range
    z = np.concatenate([newton_equilibrium(lam_of(lp0), state0), [lp0]])
    tangent = np.zeros(5)
    tangent[4] = 1.0 if lp1 > lp0 else -1.0
    br = Branch()

    def push(z):
        d, b = _tests(z[:4], lam_of(z[4]))
        br.params.append(float(z[4]))
        br.states.append(z[:4].copy())
        br.test_detJ.append(d)
        br.test_bialt.append(b)

    push(z)
    h = step
    while len(br.params) < max_points:
        if (lp1 - z[4]) * tangent[4] <= 0:
            break
        z_pred = z + h * tangent
        try:
            z_new = _corrector(p, z_pred, tangent, lam_of)
        except CorrectorDivergence:
            h *= 0.5
            if h < step_bounds[0]:
                break
            continue
        _detect_eq_events(br, z, z_new, lam_of)
        new_tan = z_new - z
        nrm = np.linalg.norm(new_tan)
        if nrm > 0:
            tangent = new_tan / nrm
        z = z_new
        push(z)
        h = min(h * 1.3, step_bounds[1])
    return br


def _detect_eq_events(br, z_a, z_b, lam_of):
    da, ba = _tests(z_a[:4], lam_of(z_a[4]))
    db, bb = _tests(z_b[:4], lam_of(z_b[4]))

    def interp_state(lam):
        w = (lam - z_a[4]) / (z_b[4] - z_a[4]) if z_b[4] != z_a[4] else 0.5
        guess = (1 - w) * z_a[:4] + w * z_b[:4]
        return newton_equilibrium(lam_of(lam), guess)

    if da * db < 0 and z_a[4] != z_b[4]:
        lam = brentq(lambda l: _tests(interp_state(l), lam_of(l))[0],
                     min(z_a[4], z_b[4]), max(z_a[4], z_b[4]), xtol=1e-8)
        s = interp_state(lam)
        kind = "P" if np.linalg.norm(s) < 1e-6 else "SN"
        br.events.append(BifurcationEvent(kind, lam, s))
    if ba * bb < 0 and z_a[4] != z_b[4]:
        lam = brentq(lambda l: _tests(interp_state(l), lam_of(l))[1],
                     min(z_a[4], z_b[4]), max(z_a[4], z_b[4]), xtol=1e-8)
        s = interp_state(lam)
        w = np.linalg.eigvals(jacobian_proj(s, lam_of(lam)))
        i = np.argmin(np.abs(w.real))
        if abs(w[i].imag) > 1e-6:
            br.events.append(BifurcationEvent(
                "H", lam, s, {"omega": abs(w[i].imag), "eigs": w}))


def superradiant_equilibrium(p: SystemParams) -> EquilibriumRecord:
    """One representative superradiant equilibrium (smallest unstable count)."""
    eqs = [e for e in find_equilibria(p) if e.label.startswith("SR")]
    if not eqs:
        raise ValueError(f"no superradiant equilibrium at {p}")
    eqs.sort(key=lambda e: (e.unstable_count, -np.linalg.norm(e.state)))
    return eqs[0]


def track_equilibrium(p: SystemParams, state, lp_values):
    """Newton-track an equilibrium through a sequence of ``lambda_+`` values."""
    out = []
    s = np.asarray(state, float)
    for lp in lp_values:
        s = newton_equilibrium(p.with_couplings(lambda_plus=lp), s)
        out.append(s.copy())
    return out


def hopf_lambda_plus(lm: float, p: SystemParams, bracket, n_scan=20,
                     xtol=1e-8) -> float:
    """Hopf location on the superradiant branch at fixed ``lambda_-``.

    Scans the bialternate determinant along the Newton-tracked superradiant
    equilibrium over ``bracket`` and bisects the first sign change that
    carries an imaginary pair.
    """
    base = p.with_couplings(lambda_minus=lm)
    lps = np.linspace(bracket[0], bracket[1], n_scan)
    s = superradiant_equilibrium(base.with_couplings(lambda_plus=lps[0])).state

    cache = {}

    def tb(lp, s_guess):
        pp = base.with_couplings(lambda_plus=lp)
        st = newton_equilibrium(pp, s_guess)
        cache[lp] = st
        return float(np.linalg.det(bialternate_2i(jacobian_proj(st, pp))))

    prev = tb(lps[0], s)
    for a, b in zip(lps, lps[1:]):
        cur = tb(b, cache[a])
        if prev * cur < 0:
            lam = brentq(lambda l: tb(l, cache[a]), a, b, xtol=xtol)
            st = cache[lam]
            w = np.linalg.eigvals(
                jacobian_proj(st, base.with_couplings(lambda_plus=lam)))
            i = np.argmin(np.abs(w.real))
            if abs(w[i].imag) > 1e-6:
                return lam
        prev = cur
    raise ValueError(f"no Hopf sign change in {bracket} at lambda_-={lm}")


# ---------------------------------------------------------------------------
# periodic orbits


@dataclass
class PeriodicOrbit:
    """A converged periodic orbit of the projected system."""

    params: SystemParams
    state: np.ndarray          # point on the phase section
    period: float
    multipliers: np.ndarray    # Floquet multipliers incl. the trivial one
    section_normal: np.ndarray
    section_anchor: np.ndarray

    @property
    def stable(self) -> bool:
        m = self.nontrivial_multipliers()
        return bool(np.all(np.abs(m) < 1.0 + 1e-6))

    def nontrivial_multipliers(self) -> np.ndarray:
        m = self.multipliers.copy()
        i = int(np.argmin(np.abs(m - 1.0)))
        return np.delete(m, i)

    def trajectory(self, tol=1e-10, cycles=1):
        return integrate(self.params, self.state, (0.0, cycles * self.period),
                         tol=tol)


def find_orbit(p: SystemParams, s_guess, T_guess, normal=None, anchor=None,
               tol=1e-9, newton_tol=1e-8, max_iter=25) -> PeriodicOrbit:
    """Single-shooting Newton solve for a periodic orbit.

    Unknowns are the section point and the period; the phase condition pins
    the point to the hyperplane through ``anchor`` with ``normal``.  Close to
    a Hopf point the trivial and critical multipliers coincide at +1 and the
    Newton matrix is poorly conditioned, so a stalled iteration is still
    accepted when its best residual sits within two decades of ``newton_tol``.
    """
    s = np.asarray(s_guess, float).copy()
    anchor = s.copy() if anchor is None else np.asarray(anchor, float)
    if normal is None:
        normal = rhs_proj(s, p)
    normal = np.asarray(normal, float) / np.linalg.norm(normal)
    T = float(T_guess)
    res_norm = np.inf
    best = (np.inf, s.copy(), T)
    for _ in range(max_iter):
        y_end, M = monodromy(p, s, T, tol=tol)
        R = np.concatenate([y_end - s, [normal @ (s - anchor)]])
        res_norm = np.linalg.norm(R)
        if res_norm < best[0]:
            best = (res_norm, s.copy(), T)
        if res_norm < newton_tol:
            break
        A = np.zeros((5, 5))
        A[:4, :4] = M - np.eye(4)
        A[:4, 4] = rhs_proj(y_end, p)
        A[4, :4] = normal
        try:
            dz = np.linalg.solve(A, R)
        except np.linalg.LinAlgError as exc:
            raise ShootingDivergence(str(exc)) from exc
        step = 1.0
        while step > 1e-3:
            s_new, T_new = s - step * dz[:4], T - step * dz[4]
            if T_new <= 0:
                step *= 0.5
                continue
            y2, _ = monodromy(p, s_new, T_new, tol=tol)
            if np.linalg.norm(y2 - s_new) <= res_norm * 1.5 + 1e-12:
                break
            step *= 0.5
        s, T = s - step * dz[:4], T - step * dz[4]
    else:
        if best[0] < 100.0 * newton_tol:
            _, s, T = best
        else:
            raise ShootingDivergence(
                f"no convergence: residual {best[0]:.2e} at T={T:.3f}")
    _, M = monodromy(p, s, T, tol=min(tol, 1e-10))
    mults = np.linalg.eigvals(M)
    return PeriodicOrbit(p, s, T, mults, normal, anchor)


def orbit_from_attractor(p: SystemParams, s0, transient=500.0, T_observe=200.0,
                         tol=1e-9) -> PeriodicOrbit:
    """Converge the attracting orbit reached from ``s0`` by settling+shooting."""
    y = flow(p, s0, transient, tol=tol)
    traj = integrate(p, y, (0.0, T_observe), tol=tol)
    n = rhs_proj(traj.states[-1], p)
    n /= np.linalg.norm(n)
    ts, xs = poincare_crossings(traj, n, float(n @ traj.states[-1]))
    if len(ts) < 3:
        raise ShootingDivergence("too few section returns to estimate a period")
    # loop count until the return map closes
    k_close = 1
    for kk in range(1, min(9, len(ts) - 1)):
        if np.linalg.norm(xs[kk] - xs[0]) < 1e-3:
            k_close = kk
            break
    T0 = float(ts[k_close] - ts[0])
    return find_orbit(p, xs[0], T0, normal=n, anchor=xs[0], tol=tol)


def start_orbit_from_hopf(p: SystemParams, eq_state, radius=1e-3,
                          tol=1e-9) -> PeriodicOrbit:
    """Seed and converge the small orbit born at a Hopf point just past onset."""
    J = jacobian_proj(eq_state, p)
    w, V = np.linalg.eig(J)
    i = int(np.argmin(np.abs(w.real)))
    if abs(w[i].imag) < 1e-6:
        raise ValueError("critical pair is not oscillatory")
    omega_h = abs(w[i].imag)
    v = V[:, i]
    vr = np.real(v)
    vr /= np.linalg.norm(vr)
    s_guess = np.asarray(eq_state, float) + radius * vr
    n = rhs_proj(s_guess, p)
    return find_orbit(p, s_guess, 2.0 * math.pi / omega_h,
                      normal=n, anchor=s_guess, tol=tol)


def continue_orbit(orbit: PeriodicOrbit, lp_values, tol=1e-9, T_max=500.0,
                   refine_events=True) -> Branch:
    """Re-converge an orbit along a ``lambda_+`` schedule, logging Floquet events.

    Natural-parameter continuation with the previous solution as predictor.
    A real multiplier crossing -1 is logged as PD, a second multiplier
    crossing +1 as SNP; period overflow past ``T_max`` ends the branch with a
    HOM-approach event.
    """
    br = Branch()
    p0 = orbit.params
    cur = orbit

    def push(lp, orb):
        br.params.append(lp)
        br.states.append(orb.state.copy())
        br.periods.append(orb.period)
        br.multipliers.append(orb.multipliers.copy())

    push(float(p0.lambda_plus), cur)
    prev_lp = float(p0.lambda_plus)
    for lp in lp_values:
        pp = p0.with_couplings(lambda_plus=lp)
        try:
            nxt = find_orbit(pp, cur.state, cur.period,
                             normal=cur.section_normal,
                             anchor=cur.state, tol=tol)
        except ShootingDivergence:
            br.events.append(BifurcationEvent(
                "HOM-approach" if cur.period > 0.5 * T_max else "lost",
                lp, cur.state, {"period": cur.period}))
            break
        if nxt.period > T_max:
            br.events.append(BifurcationEvent(
                "HOM-approach", lp, nxt.state, {"period": nxt.period}))
            push(lp, nxt)
            break
        _detect_orbit_events(br, prev_lp, cur, lp, nxt, tol, refine_events)
        push(lp, nxt)
        cur, prev_lp = nxt, lp
    return br


def _pd_test(orb: PeriodicOrbit) -> float:
    m = orb.nontrivial_multipliers()
    real = m[np.abs(m.imag) < 1e-6 * np.maximum(1.0, np.abs(m))]
    if len(real) == 0:
        # complex pair: use distance of |m| from 1 with the sign of Re m
        j = int(np.argmax(np.abs(m)))
        return float(np.abs(m[j]) * np.sign(m[j].real) + 1.0)
    return float(np.min(real.real) + 1.0)


def _snp_test(orb: PeriodicOrbit) -> float:
    m = orb.nontrivial_multipliers()
    real = m[np.abs(m.imag) < 1e-6 * np.maximum(1.0, np.abs(m))]
    if len(real) == 0:
        return 1.0
    return float(np.max(real.real) - 1.0)


def _detect_orbit_events(br, lp_a, orb_a, lp_b, orb_b, tol, refine):
    for kind, test in (("PD", _pd_test), ("SNP", _snp_test)):
        fa, fb = test(orb_a), test(orb_b)
        if fa * fb >= 0 or lp_a == lp_b:
            continue
        if not refine:
            br.events.append(BifurcationEvent(
                kind, 0.5 * (lp_a + lp_b), orb_b.state, {}))
            continue
        lo, hi = sorted((lp_a, lp_b))
        seed = orb_a

        def f(lp):
            nonlocal seed
            orb = find_orbit(seed.params.with_couplings(lambda_plus=lp),
                             seed.state, seed.period,
                             normal=seed.section_normal, anchor=seed.state,
                             tol=tol)
            seed = orb
            return test(orb)

        lam = brentq(f, lo, hi, xtol=1e-6)
        br.events.append(BifurcationEvent(
            kind, lam, seed.state,
            {"period": seed.period, "multipliers": seed.multipliers}))


def branch_switch_pd(orbit: PeriodicOrbit, offset=1e-3, tol=1e-9) -> PeriodicOrbit:
    """Converge the doubled orbit at a period-doubling point.

    ``orbit`` should sit at (or just past) the PD event; the doubled orbit is
    seeded along the Floquet eigenvector of the multiplier near -1 and shot
    over twice the period.
    """
    _, M = monodromy(orbit.params, orbit.state, orbit.period, tol=tol)
    w, V = np.linalg.eig(M)
    i = int(np.argmin(np.abs(w + 1.0)))
    if abs(w[i] + 1.0) > 0.3:
        raise ShootingDivergence(f"no multiplier near -1: {w}")
    v = np.real(V[:, i])
    v /= np.linalg.norm(v)
    s_guess = orbit.state + offset * v
    return find_orbit(orbit.params, s_guess, 2.0 * orbit.period,
                      normal=orbit.section_normal, anchor=s_guess, tol=tol)


def advance_orbit(orbit: PeriodicOrbit, lp_target, tol=1e-9, step0=None,
                  min_step=1e-5) -> PeriodicOrbit:
    """Re-converge ``orbit`` at ``lp_target`` by adaptive natural continuation.

    The orbit amplitude grows like a square root just past a Hopf point, so a
    fixed parameter step fails there; the step is halved on shooting failure
    and grown again on success, re-anchoring the phase section at every
    accepted solution.
    """
    cur = orbit
    lp = float(orbit.params.lambda_plus)
    sgn = 1.0 if lp_target >= lp else -1.0
    h = abs(lp_target - lp) / 8.0 if step0 is None else step0
    while sgn * (lp_target - lp) > 1e-14:
        h = min(h, abs(lp_target - lp))
        try:
            nxt = find_orbit(cur.params.with_couplings(lambda_plus=lp + sgn * h),
                             cur.state, cur.period, normal=cur.section_normal,
                             anchor=cur.state, tol=tol)
        except ShootingDivergence:
            h *= 0.5
            if h < min_step:
                raise
            continue
        cur, lp = nxt, lp + sgn * h
        h *= 1.5
    return cur


def period_doubling_lambda(orbit: PeriodicOrbit, bracket, n_scan=24,
                           tol=1e-9) -> tuple:
    """First PD parameter along a branch continued over ``bracket``.

    Returns ``(lambda_PD, orbit at the event)``.
    """
    lo, hi = bracket
    cur = orbit
    if abs(float(orbit.params.lambda_plus) - lo) > 1e-12:
        cur = advance_orbit(orbit, lo, tol=tol)
    fa = _pd_test(cur)
    lp_a = lo
    # quadratic schedule: small steps first, where the orbit changes fastest
    lps = lo + (hi - lo) * (np.arange(1, n_scan + 1) / n_scan) ** 2
    for lp in lps:
        nxt = advance_orbit(cur, lp, tol=tol)
        fb = _pd_test(nxt)
        if fa * fb < 0:
            seed = cur

            def f(l):
                nonlocal seed
                seed = advance_orbit(seed, l, tol=tol)
                return _pd_test(seed)

            lam = brentq(f, lp_a, lp, xtol=1e-6)
            return lam, seed
        cur, fa, lp_a = nxt, fb, lp
    raise ValueError(f"no PD sign change in {bracket}")


FEIGENBAUM_DELTA = 4.669201609102990


def pd_cascade_accumulation(lm: float, p: SystemParams, bracket, s0=None,
                            tol=1e-8, max_levels=3) -> dict:
    """Estimate the accumulation parameter of the period-doubling cascade.

    The stable primary orbit is obtained by settling onto the attractor at
    the low end of ``bracket`` (the branch born at the Hopf point can fold,
    so it is not followed from the Hopf point itself).  Its first PD is
    bisected on the Floquet test, the doubled branch is taken by
    branch-switching, and further doublings are located the same way; the
    accumulation is extrapolated geometrically with the Feigenbaum ratio
    (Aitken when three doublings are available).
    """
    base = p.with_couplings(lambda_minus=lm)
    lo, hi = bracket
    if s0 is None:
        s0 = np.array([0.1, 0.0, 0.1, 0.1])
    orb = orbit_from_attractor(base.with_couplings(lambda_plus=lo), s0,
                               transient=800.0, tol=max(tol, 1e-9))
    pd = []
    for level in range(max_levels):
        try:
            lam_pd, orb_at = period_doubling_lambda(orb, (lo, hi), tol=tol)
        except (ValueError, ShootingDivergence):
            break
        pd.append(lam_pd)
        # Pick the doubled branch up from the attractor a bit past the
        # doubling; Newton from a perturbed section point tends to fall back
        # onto the double cover of the primary orbit, the settled attractor
        # cannot.  The period-ratio check rejects a pickup taken too close to
        # the doubling for the two loops to have separated.
        nxt = None
        for frac in (0.2, 0.4, 0.7):
            lp_pick = lam_pd + frac * (hi - lam_pd)
            try:
                cand = orbit_from_attractor(
                    base.with_couplings(lambda_plus=lp_pick), s0,
                    transient=1200.0, tol=max(tol, 1e-9))
            except (ShootingDivergence, IntegrationError):
                continue
            if 1.7 < cand.period / orb_at.period < 2.3:
                nxt = cand
                lo = lp_pick
                break
        if nxt is None:
            break
        if len(pd) >= 2:
            hi = lam_pd + max(0.6 * (pd[-1] - pd[-2]), 1.5 * (lo - lam_pd))
        orb = nxt
    if not pd:
        raise ValueError("no period doubling found")
    if len(pd) >= 3:
        d1, d2 = pd[1] - pd[0], pd[2] - pd[1]
        acc = pd[2] + d2 * (d2 / d1) / (1.0 - d2 / d1) if d2 < d1 else pd[2]
    elif len(pd) == 2:
        acc = pd[1] + (pd[1] - pd[0]) / (FEIGENBAUM_DELTA - 1.0)
    else:
        acc = pd[0]
    return {"pd": pd, "accumulation": acc}


def shilnikov_ratio(eigenvalues) -> float:
    """Saddle-focus ratio ``-Re(nu_s)/nu_u``; < 1 signals a wild configuration.

    Requires one real positive eigenvalue and a complex pair with negative
    real part among the given spectrum.
    """
    w = np.asarray(eigenvalues, complex)
    real_pos = w[(np.abs(w.imag) < 1e-9) & (w.real > 0)]
    cplx_neg = w[(w.imag > 1e-9) & (w.real < 0)]
    if len(real_pos) != 1 or len(cplx_neg) == 0:
        raise NotSaddleFocus(f"spectrum {w} is not a saddle focus")
    nu_u = float(real_pos[0].real)
    nu_s = cplx_neg[np.argmax(cplx_neg.real)]
    return float(-nu_s.real / nu_u)


def trace_hopf_curve(p: SystemParams, lm_values, bracket_fn=None,
                     xtol=1e-6) -> list:
    """Hopf curve samples ``(lambda_-, lambda_+)`` by per-slice bisection.

    ``bracket_fn(lm)`` supplies the search bracket in ``lambda_+``; slices
    with no superradiant equilibrium or no sign change are skipped.
    """
    from .equilibria import pitchfork_curve, saddle_node_slopes

    pts = []
    for lm in lm_values:
        if bracket_fn is not None:
            lo, hi = bracket_fn(lm)
        else:
            roots = pitchfork_curve(lm, p)
            lo = roots[0] + 1e-3 if roots else saddle_node_slopes(p)[0] * lm + 1e-3
            hi = (roots[1] - 1e-3) if len(roots) > 1 else lm * 3.0
        try:
            pts.append((lm, hopf_lambda_plus(lm, p, (lo, hi), xtol=xtol)))
        except (ValueError, Exception):
            continue
    return pts
