"""Adaptive Runge-Kutta integration of the model vector fields.

Thin layer over scipy's Dormand-Prince 5(4) stepper (``RK45``), adding the
channels, event location and variational (tangent) propagation the analysis
modules need.  Dense output is kept on every trajectory so that Poincare
crossings can be root-refined and traces resampled uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .model import (
    SystemParams,
    chart_to_sphere,
    energy_full,
    jacobian_proj,
    param_exchange,
    proj_to_full,
    reflect_poles,
    rhs_full,
    rhs_proj,
)

__all__ = [
    "Trajectory",
    "IntegrationError",
    "StepSizeUnderflow",
    "NonFiniteState",
    "NoCrossings",
    "integrate",
    "integrate_full",
    "integrate_variational",
    "monodromy",
    "flow",
    "poincare_crossings",
    "return_times",
    "integrate_bloch",
    "DEFAULT_TOL",
    "DEFAULT_TRANSIENT",
]

DEFAULT_TOL = 1e-9
# Attractor statistics discard this much initial time unless told otherwise.
DEFAULT_TRANSIENT = 500.0


class IntegrationError(RuntimeError):
    pass


class StepSizeUnderflow(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class NoCrossings(IntegrationError):
    pass


@dataclass
class Trajectory:
    """Integrated trajectory with dense output.

    ``states`` has one row per accepted step; ``kind`` is ``"proj"`` for the
    four-dimensional chart variables or ``"full"`` for the five-dimensional
    system.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str
    params: SystemParams
    sol: object = field(default=None, repr=False)

    def __call__(self, t):
        """Dense-output evaluation; returns state(s) at time(s) ``t``."""
        return self.sol(t)

    def to_full(self) -> np.ndarray:
        if self.kind == "full":
            return self.states
        return np.array([proj_to_full(s) for s in self.states])

    @property
    def photon(self) -> np.ndarray:
        return self.states[:, 0] ** 2 + self.states[:, 1] ** 2

    @property
    def gamma(self) -> np.ndarray:
        if self.kind == "full":
            return self.states[:, 4]
        x, y = self.states[:, 2], self.states[:, 3]
        return (x * x + y * y - 1.0) / (2.0 * (x * x + y * y + 1.0))

    @property
    def energy(self) -> np.ndarray:
        return np.array([energy_full(s, self.params) for s in self.to_full()])

    def resample_photon(self, n: int):
        """Uniform resampling of |alpha|^2 over the stored span."""
        t = np.linspace(self.times[0], self.times[-1], n)
        y = self.sol(t)
        return t, y[0] ** 2 + y[1] ** 2

    def write_csv(self, path):
        full = self.to_full()
        if self.kind == "proj":
            xy = self.states[:, 2:4]
        else:
            xy = np.array(
                [(-b1 / (g - 0.5), -b2 / (g - 0.5)) for _, _, b1, b2, g in full]
            )
        with open(path, "w") as fh:
            fh.write("t,a1,a2,x,y,photon,gamma,energy\n")
            for i, t in enumerate(self.times):
                row = (
                    t,
                    full[i, 0],
                    full[i, 1],
                    xy[i, 0],
                    xy[i, 1],
                    full[i, 0] ** 2 + full[i, 1] ** 2,
                    full[i, 4],
                    energy_full(full[i], self.params),
                )
                fh.write(",".join("%.17g" % v for v in row) + "\n")


def _check(res, tol):
    if res.status == -1:
        msg = res.message or ""
        if "step size" in msg.lower():
            raise StepSizeUnderflow(msg)
        raise IntegrationError(msg)
    if not np.all(np.isfinite(res.y)):
        raise NonFiniteState("integration produced non-finite state")


def _solve(fun, y0, t_span, tol, events=None, max_step=np.inf, dense=True):
    if not (1e-13 <= tol <= 1e-3):
        raise ValueError(f"tol must lie in [1e-13, 1e-3], got {tol}")
    res = solve_ivp(
        fun,
        t_span,
        np.asarray(y0, float),
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=dense,
        events=events,
        max_step=max_step,
    )
    _check(res, tol)
    return res


def integrate(p: SystemParams, y0, t_span, tol=DEFAULT_TOL, events=None,
              max_step=np.inf) -> Trajectory:
    """Integrate the projected four-dimensional system."""
    res = _solve(lambda t, y: rhs_proj(y, p), y0, t_span, tol, events, max_step)
    return Trajectory(res.t, res.y.T, "proj", p, res.sol)


def integrate_full(p: SystemParams, y0, t_span, tol=DEFAULT_TOL, events=None,
                   max_step=np.inf) -> Trajectory:
    """Integrate the unprojected five-dimensional system."""
    res = _solve(lambda t, y: rhs_full(y, p), y0, t_span, tol, events, max_step)
    return Trajectory(res.t, res.y.T, "full", p, res.sol)


def flow(p: SystemParams, y0, T, tol=DEFAULT_TOL) -> np.ndarray:
    """End point of the projected flow after time ``T``."""
    res = _solve(lambda t, y: rhs_proj(y, p), y0, (0.0, T), tol, dense=False)
    return res.y[:, -1]


def _variational_rhs(p, k):
    def fun(t, z):
        y = z[:4]
        V = z[4:].reshape(4, k)
        J = jacobian_proj(y, p)
        out = np.empty_like(z)
        out[:4] = rhs_proj(y, p)
        out[4:] = (J @ V).ravel()
        return out

    return fun


def integrate_variational(p: SystemParams, y0, V0, t_span, tol=DEFAULT_TOL):
    """Propagate state and tangent matrix jointly.

    ``V0`` is a ``4 x k`` matrix of tangent directions evolved by the
    linearized flow ``dV/dt = J(y(t)) V``.  Returns ``(y_end, V_end)``.
    """
    V0 = np.atleast_2d(np.asarray(V0, float))
    if V0.shape[0] != 4:
        V0 = V0.T
    k = V0.shape[1]
    z0 = np.concatenate([np.asarray(y0, float), V0.ravel()])
    res = _solve(_variational_rhs(p, k), z0, t_span, tol, dense=False)
    z = res.y[:, -1]
    return z[:4], z[4:].reshape(4, k)


def monodromy(p: SystemParams, y0, T, tol=DEFAULT_TOL):
    """Monodromy matrix of the projected flow over time ``T`` from ``y0``."""
    y_end, M = integrate_variational(p, y0, np.eye(4), (0.0, T), tol)
    return y_end, M


def poincare_crossings(traj: Trajectory, normal, offset=0.0, direction=1,
                       refine_tol=1e-10):
    """Locate one-directional section crossings on a dense trajectory.

    The section is the hyperplane ``normal . y = offset``; only crossings with
    ``d(normal . y)/dt`` of sign ``direction`` are kept.  Crossing times are
    refined on the dense output.  Returns ``(times, states)``.
    """
    n = np.asarray(normal, float)
    g = traj.states @ n - offset
    ts = []
    for i in range(len(g) - 1):
        if g[i] == 0.0 or g[i] * g[i + 1] > 0.0:
            continue
        if direction * (g[i + 1] - g[i]) <= 0.0:
            continue
        f = lambda t: float(np.dot(n, traj.sol(t)) - offset)
        t0, t1 = traj.times[i], traj.times[i + 1]
        fa, fb = f(t0), f(t1)
        if fa == 0.0:
            ts.append(t0)
            continue
        if fa * fb > 0.0:
            # the dense output disagrees with the stored sample at round-off
            # level; the crossing sits at the nearer endpoint
            ts.append(t0 if abs(fa) <= abs(fb) else t1)
            continue
        ts.append(brentq(f, t0, t1, xtol=refine_tol))
    if not ts:
        raise NoCrossings("trajectory does not cross the section")
    ts = np.array(ts)
    return ts, traj.sol(ts).T


def return_times(traj: Trajectory, normal=None, offset=None, anchor=None):
    """Successive differences of section-crossing times.

    By default the section passes through the last state, normal to the flow
    there, which makes it a natural period detector for settled orbits.
    """
    if normal is None:
        anchor = traj.states[-1] if anchor is None else np.asarray(anchor, float)
        normal = rhs_proj(anchor, traj.params)
        normal = normal / np.linalg.norm(normal)
        offset = float(np.dot(normal, anchor))
    ts, _ = poincare_crossings(traj, normal, offset, direction=1)
    return np.diff(ts)


# Chart switching: in either chart the projection point sits at radius
# infinity; |(x, y)|^2 = 3 corresponds to gamma = +1/4 and the image in the
# other chart has radius^2 = 1/3, giving natural hysteresis.
_SWITCH_RADIUS2 = 3.0


def integrate_bloch(p: SystemParams, y0_full, T, tol=DEFAULT_TOL,
                    max_events=1000) -> Trajectory:
    """Integrate on the hypercylinder using two stereographic charts.

    Starts from a five-dimensional state, runs the projected equations in
    whichever chart currently represents the spin state well, and switches
    charts when the trajectory leaves the comfortable band around the current
    projection pole.  The result is stitched and reported in full
    five-dimensional coordinates, so spin conservation holds to round-off.
    """
    y = np.asarray(y0_full, float)
    # chart 1 projects from the North pole, chart 2 from the South pole
    chart = 1 if y[4] < 0.25 else 2
    t = 0.0
    times = [0.0]
    states = [y.copy()]
    for _ in range(max_events):
        if t >= T:
            break
        if chart == 2:
            y = reflect_poles(y)
            pc = param_exchange(p)
        else:
            pc = p
        x = -y[2] / (y[4] - 0.5)
        yy = -y[3] / (y[4] - 0.5)
        z0 = np.array([y[0], y[1], x, yy])

        def leave(tt, z):
            return z[2] * z[2] + z[3] * z[3] - _SWITCH_RADIUS2

        leave.terminal = True
        leave.direction = 1
        res = _solve(lambda tt, z: rhs_proj(z, pc), z0, (t, T), tol,
                     events=[leave])
        seg_t = res.t
        seg = res.y.T
        full = np.empty((len(seg_t), 5))
        full[:, 0] = seg[:, 0]
        full[:, 1] = seg[:, 1]
        sph = np.array([chart_to_sphere(sx, sy) for sx, sy in seg[:, 2:4]])
        full[:, 2:5] = sph
        if chart == 2:
            full = np.array([reflect_poles(f) for f in full])
        times.extend(seg_t[1:])
        states.extend(full[1:])
        t = seg_t[-1]
        y = full[-1]
        if res.status == 1:
            chart = 2 if chart == 1 else 1
        else:
            break
    return Trajectory(np.array(times), np.array(states), "full", p, None)
