"""Core model definitions for the semiclassical unbalanced, open Dicke model.

The five-dimensional system evolves the scaled cavity amplitude
``alpha = a_re + i*a_im``, the collective polarization ``beta = b_re + i*b_im``
and the inversion ``gamma``.  Spin conservation confines ``(beta, gamma)`` to
the Bloch sphere ``|beta|^2 + gamma^2 = 1/4``; a stereographic chart projects
that sphere (minus the North pole) onto the plane, yielding an equivalent
four-dimensional system in ``(a1, a2, x, y)`` on which all bifurcation
analysis is performed.

Everything in this module is a pure function of immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "FullState",
    "ProjState",
    "NorthPoleUnrepresentable",
    "rhs_full",
    "rhs_proj",
    "chart_to_plane",
    "chart_to_sphere",
    "reflect_poles",
    "chart2_to_plane",
    "chart2_to_sphere",
    "parity",
    "param_exchange",
    "spin_residual",
    "energy_full",
    "energy_proj",
    "jacobian_proj",
    "jacobian_fd",
    "bialternate_2i",
    "proj_to_full",
    "full_to_proj",
]


class NorthPoleUnrepresentable(ValueError):
    """The North pole is the projection point and has no chart image."""


@dataclass(frozen=True)
class SystemParams:
    """Physical rates and frequencies of the model.

    Attributes
    ----------
    kappa : float
        Cavity field decay rate (>= 0).
    omega : float
        Effective cavity frequency.
    omega0 : float
        Effective atomic frequency.
    lambda_minus : float
        Co-rotating coupling strength (>= 0).
    lambda_plus : float
        Counter-rotating coupling strength (>= 0).
    """

    kappa: float
    omega: float
    omega0: float
    lambda_minus: float
    lambda_plus: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.lambda_minus < 0 or self.lambda_plus < 0:
            raise ValueError(
                "coupling strengths must be >= 0, got "
                f"({self.lambda_minus}, {self.lambda_plus})"
            )

    def with_couplings(self, lambda_minus=None, lambda_plus=None) -> "SystemParams":
        return SystemParams(
            self.kappa,
            self.omega,
            self.omega0,
            self.lambda_minus if lambda_minus is None else lambda_minus,
            self.lambda_plus if lambda_plus is None else lambda_plus,
        )


@dataclass(frozen=True)
class FullState:
    """State of the unprojected five-dimensional system."""

    a_re: float
    a_im: float
    b_re: float
    b_im: float
    gamma: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a_re, self.a_im, self.b_re, self.b_im, self.gamma])

    @staticmethod
    def from_array(y) -> "FullState":
        return FullState(*(float(v) for v in y))


@dataclass(frozen=True)
class ProjState:
    """State of the stereographically projected four-dimensional system."""

    a1: float
    a2: float
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.x, self.y])

    @staticmethod
    def from_array(y) -> "ProjState":
        return ProjState(*(float(v) for v in y))


def rhs_full(y, p: SystemParams) -> np.ndarray:
    """Time derivative of the five-dimensional system at state ``y``.

    ``y`` is ``(a_re, a_im, b_re, b_im, gamma)``.  Total function; no
    constraint to the spin shell is assumed.
    """
    a1, a2, b1, b2, g = y
    lm, lp = p.lambda_minus, p.lambda_plus
    # d(alpha)/dt = -(kappa + i*omega)*alpha - i*lm*beta - i*lp*conj(beta)
    da1 = -p.kappa * a1 + p.omega * a2 + lm * b2 - lp * b2
    da2 = -p.kappa * a2 - p.omega * a1 - lm * b1 - lp * b1
    # d(beta)/dt = -i*omega0*beta + 2i*g*(lm*alpha + lp*conj(alpha))
    db1 = p.omega0 * b2 - 2.0 * g * (lm * a2 - lp * a2)
    db2 = -p.omega0 * b1 + 2.0 * g * (lm * a1 + lp * a1)
    # d(gamma)/dt = i*lm*(conj(alpha)*beta - alpha*conj(beta))
    #             + i*lp*(alpha*beta - conj(alpha*beta))
    dg = 2.0 * lm * (a2 * b1 - a1 * b2) - 2.0 * lp * (a1 * b2 + a2 * b1)
    return np.array([da1, da2, db1, db2, dg])


def rhs_proj(y, p: SystemParams) -> np.ndarray:
    """Time derivative of the projected system at ``y = (a1, a2, x, y)``."""
    a1, a2, x, yy = y
    d = p.lambda_minus - p.lambda_plus
    s = p.lambda_minus + p.lambda_plus
    r = x * x + yy * yy + 1.0
    da1 = -p.kappa * a1 + p.omega * a2 + d * yy / r
    da2 = -p.omega * a1 - p.kappa * a2 - s * x / r
    dx = d * a2 * x * x - 2.0 * s * a1 * x * yy - d * a2 * yy * yy + d * a2 + p.omega0 * yy
    dy = s * a1 * x * x + 2.0 * d * a2 * x * yy - s * a1 * yy * yy - s * a1 - p.omega0 * x
    return np.array([da1, da2, dx, dy])


def jacobian_proj(y, p: SystemParams) -> np.ndarray:
    """Closed-form Jacobian of :func:`rhs_proj` at ``y``."""
    a1, a2, x, yy = y
    d = p.lambda_minus - p.lambda_plus
    s = p.lambda_minus + p.lambda_plus
    r = x * x + yy * yy + 1.0
    r2 = r * r
    J = np.empty((4, 4))
    J[0] = (-p.kappa, p.omega, -2.0 * d * x * yy / r2, d * (x * x - yy * yy + 1.0) / r2)
    J[1] = (-p.omega, -p.kappa, -s * (yy * yy - x * x + 1.0) / r2, 2.0 * s * x * yy / r2)
    J[2] = (
        -2.0 * s * x * yy,
        d * (x * x - yy * yy + 1.0),
        2.0 * d * a2 * x - 2.0 * s * a1 * yy,
        -2.0 * s * a1 * x - 2.0 * d * a2 * yy + p.omega0,
    )
    J[3] = (
        s * (x * x - yy * yy - 1.0),
        2.0 * d * x * yy,
        2.0 * s * a1 * x + 2.0 * d * a2 * yy - p.omega0,
        2.0 * d * a2 * x - 2.0 * s * a1 * yy,
    )
    return J


def jacobian_fd(y, p: SystemParams, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of the projected field (test oracle)."""
    y = np.asarray(y, float)
    J = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        J[:, j] = (rhs_proj(y + e, p) - rhs_proj(y - e, p)) / (2.0 * h)
    return J


def chart_to_plane(b1: float, b2: float, gamma: float, pole_tol: float = 1e-12):
    """Stereographic chart: Bloch-sphere point to plane coordinates ``(x, y)``.

    Raises
    ------
    NorthPoleUnrepresentable
        If the point is (numerically) the projection point at the North pole.
    """
    den = gamma - 0.5
    if gamma >= 0.5 - pole_tol and abs(b1) < pole_tol and abs(b2) < pole_tol:
        raise NorthPoleUnrepresentable(
            f"({b1}, {b2}, {gamma}) is at the projection point"
        )
    return -b1 / den, -b2 / den


def chart_to_sphere(x: float, y: float):
    """Inverse chart: plane coordinates to a point on the spin shell."""
    r = x * x + y * y + 1.0
    return x / r, y / r, (x * x + y * y - 1.0) / (2.0 * r)


def reflect_poles(y_full) -> np.ndarray:
    """Pole reflection ``(alpha, beta, gamma) -> (alpha, conj(beta), -gamma)``.

    Conjugates trajectories of ``p`` into trajectories of
    :func:`param_exchange` of ``p``, exchanging the roles of the two poles.
    """
    a1, a2, b1, b2, g = y_full
    return np.array([a1, a2, b1, -b2, -g])


def chart2_to_plane(b1: float, b2: float, gamma: float, pole_tol: float = 1e-12):
    """Second chart, projecting from the South pole.

    The North pole maps to the origin; the dynamics in this chart obey
    :func:`rhs_proj` with exchanged parameters (see :func:`param_exchange`).
    """
    return chart_to_plane(b1, -b2, -gamma, pole_tol)


def chart2_to_sphere(x: float, y: float):
    b1, b2, g = chart_to_sphere(x, y)
    return b1, -b2, -g


def parity(y) -> np.ndarray:
    """Point reflection in the origin of the projected state space."""
    return -np.asarray(y, float)


def param_exchange(p: SystemParams) -> SystemParams:
    """Parameter exchange ``(omega0, lm, lp) -> (-omega0, lp, lm)``.

    Leaves the dynamics invariant up to the pole reflection
    :func:`reflect_poles`.
    """
    return SystemParams(p.kappa, p.omega, -p.omega0, p.lambda_plus, p.lambda_minus)


def spin_residual(y_full) -> float:
    """Deviation ``|beta|^2 + gamma^2 - 1/4`` from the spin shell."""
    _, _, b1, b2, g = y_full
    return b1 * b1 + b2 * b2 + g * g - 0.25


def energy_full(y_full, p: SystemParams) -> float:
    """Semiclassical energy per atom, conserved on the pole-flip foliation."""
    a1, a2, b1, b2, g = y_full
    lm, lp = p.lambda_minus, p.lambda_plus
    return (
        p.omega * (a1 * a1 + a2 * a2)
        + p.omega0 * g
        + 2.0 * (lp + lm) * a1 * b1
        - 2.0 * (lp - lm) * a2 * b2
    )


def energy_proj(y_proj, p: SystemParams) -> float:
    """Energy of a projected state (spin part lifted back to the sphere)."""
    a1, a2, x, yy = y_proj
    b1, b2, g = chart_to_sphere(x, yy)
    return energy_full((a1, a2, b1, b2, g), p)


def proj_to_full(y_proj) -> np.ndarray:
    a1, a2, x, yy = y_proj
    b1, b2, g = chart_to_sphere(x, yy)
    return np.array([a1, a2, b1, b2, g])


def full_to_proj(y_full) -> np.ndarray:
    a1, a2, b1, b2, g = y_full
    x, yy = chart_to_plane(b1, b2, g)
    return np.array([a1, a2, x, yy])


# Index pairs (p < q) of the antisymmetric basis used for the bialternate
# product; only determinants/eigenvalues of the result are meaningful outside.
_WEDGE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def bialternate_2i(J) -> np.ndarray:
    """Bialternate sum ``J (.) 2I`` of a 4x4 matrix.

    The 6x6 result has eigenvalues equal to the pairwise sums of the
    eigenvalues of ``J``; its determinant vanishes exactly when two
    eigenvalues of ``J`` sum to zero, which is the test function used to
    locate Hopf bifurcations and the pole-flip transition.
    """
    J = np.asarray(J, float)
    if J.shape != (4, 4):
        raise ValueError(f"expected 4x4 matrix, got {J.shape}")
    B = np.empty((6, 6))
    for c, (r, s) in enumerate(_WEDGE_PAIRS):
        # image of the basis bivector e_r ^ e_s: (J e_r) ^ e_s + e_r ^ (J e_s)
        for rr, (pp, qq) in enumerate(_WEDGE_PAIRS):
            B[rr, c] = (
                J[pp, r] * (1.0 if qq == s else 0.0)
                - J[qq, r] * (1.0 if pp == s else 0.0)
                + (1.0 if pp == r else 0.0) * J[qq, s]
                - (1.0 if qq == r else 0.0) * J[pp, s]
            )
    return B
