"""Kepler and rotating-Kepler mechanics in units with unit gravitational
parameter and unit frame rotation.

The rotating Hamiltonian is ``H = E + a*L`` with ``E`` the inertial Kepler
energy and ``L`` the angular momentum; the Jacobi parameter is ``c = -H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import CollisionStateError

COLLISION_RADIUS = 1e-13
CRITICAL_C = 1.5
ECCENTRICITY_CLAMP = 1e-12


@dataclass(frozen=True)
class CartesianState:
    """Phase-space point ``(q, p)`` of the planar problem."""

    q: tuple[float, float]
    p: tuple[float, float]

    def __post_init__(self):
        q = (float(self.q[0]), float(self.q[1]))
        p = (float(self.p[0]), float(self.p[1]))
        if math.hypot(*q) < COLLISION_RADIUS:
            raise CollisionStateError(f"collision state, |q| < {COLLISION_RADIUS:g}: q={q}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def radius(self) -> float:
        return math.hypot(*self.q)

    def as_array(self) -> np.ndarray:
        return np.array([*self.q, *self.p])


@dataclass(frozen=True)
class PolarState:
    """Polar position ``(x, y)`` with conjugate momenta ``(r, t)``.

    ``x`` is the radius, ``y`` the (unreduced) angle, ``r`` the radial
    momentum and ``t`` the angular momentum.
    """

    x: float
    y: float
    r: float
    t: float

    def __post_init__(self):
        if not self.x > COLLISION_RADIUS:
            raise CollisionStateError(f"polar radius must be positive, got x={self.x}")

    @property
    def display_angle(self) -> float:
        return self.y % (2.0 * math.pi)


@dataclass(frozen=True)
class EnergyTriple:
    kepler_energy: float
    angular_momentum: float

    @property
    def jacobi_param(self) -> float:
        return -self.kepler_energy - self.angular_momentum

    @property
    def hamiltonian(self) -> float:
        return self.kepler_energy + self.angular_momentum


def kepler_energy(s: CartesianState) -> float:
    p1, p2 = s.p
    return 0.5 * (p1 * p1 + p2 * p2) - 1.0 / s.radius


def angular_momentum(s: CartesianState) -> float:
    (q1, q2), (p1, p2) = s.q, s.p
    return q1 * p2 - q2 * p1


def energies(s: CartesianState) -> EnergyTriple:
    return EnergyTriple(kepler_energy(s), angular_momentum(s))


def eccentricity(E: float, L: float) -> float:
    """Eccentricity of the Kepler conic with energy ``E`` and angular momentum ``L``."""
    e2 = 2.0 * E * L * L + 1.0
    if e2 < -ECCENTRICITY_CLAMP:
        raise ValueError(f"inconsistent (E, L) pair: 2*E*L^2 + 1 = {e2:.3e} < 0")
    return math.sqrt(max(0.0, e2))


def kepler_period(E: float) -> float:
    """Sidereal period ``2*pi / (-2E)^(3/2)`` from Kepler's third law."""
    if not E < 0.0:
        raise ValueError(f"bounded Kepler motion needs E < 0, got {E}")
    return 2.0 * math.pi / (-2.0 * E) ** 1.5


def rotating_hamiltonian(s: CartesianState, a: float = 1.0) -> float:
    return kepler_energy(s) + a * angular_momentum(s)


def effective_potential(radius: float) -> float:
    if not radius > 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    return -1.0 / radius - 0.5 * radius * radius


def mechanical_hamiltonian(s: CartesianState) -> float:
    """``H`` written as a magnetic kinetic term plus the effective potential (a=1)."""
    (q1, q2), (p1, p2) = s.q, s.p
    return 0.5 * (p1 - q2) ** 2 + 0.5 * (p2 + q1) ** 2 + effective_potential(s.radius)


def hill_radii(c: float) -> tuple[float, float]:
    """Inner and outer radii where ``U(rho) = -c``; requires ``c > 3/2``."""
    if not c > CRITICAL_C:
        raise ValueError(f"Hill's region splits only for c > 3/2, got c={c}")

    def g(rho):
        return effective_potential(rho) + c

    # U <= -1/rho and U <= -rho^2/2 give explicit brackets
    inner = brentq(g, 1.0 / (c + 1.0), 1.0, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    outer = brentq(g, 1.0, math.sqrt(2.0 * c) + 1.0, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    return inner, outer


def hill_region_classify(c: float, radius: float) -> str:
    """Label a radius as ``bounded``, ``forbidden``, ``unbounded`` or
    ``allowed-everywhere`` (for ``c <= 3/2``)."""
    if not radius > 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if c <= CRITICAL_C:
        return "allowed-everywhere"
    inner, outer = hill_radii(c)
    if radius <= inner:
        return "bounded"
    if radius >= outer:
        return "unbounded"
    return "forbidden"


def moser_energy(s: CartesianState, k: float) -> float:
    """Moser-regularised energy ``|q| (E + k) + 1 = (|p|^2 + 2k) |q| / 2``."""
    if not k > 0.0:
        raise ValueError(f"k must be positive, got {k}")
    p1, p2 = s.p
    return 0.5 * (p1 * p1 + p2 * p2 + 2.0 * k) * s.radius


def to_polar(s: CartesianState) -> PolarState:
    (q1, q2), (p1, p2) = s.q, s.p
    x = s.radius
    y = math.atan2(q2, q1)
    r = (q1 * p1 + q2 * p2) / x
    t = q1 * p2 - q2 * p1
    return PolarState(x, y, r, t)


def from_polar(s: PolarState) -> CartesianState:
    cy, sy = math.cos(s.y), math.sin(s.y)
    w = s.t / s.x
    return CartesianState(
        (s.x * cy, s.x * sy),
        (s.r * cy - w * sy, s.r * sy + w * cy),
    )


def polar_hamiltonian(s: PolarState, a: float = 1.0) -> float:
    return 0.5 * (s.r ** 2 + s.t ** 2 / s.x ** 2) - 1.0 / s.x + a * s.t


def hamiltonian_vector_field_polar(s: PolarState, a: float = 1.0) -> np.ndarray:
    """Return ``(r', t', x', y')`` for ``H_a`` in polar coordinates."""
    x, r, t = s.x, s.r, s.t
    return np.array([(t * t - x) / x ** 3, 0.0, r, t / x ** 2 + a])


def cartesian_vector_field(state, a: float = 1.0) -> np.ndarray:
    """Hamilton's equations of ``H_a`` for ``state = (q1, q2, p1, p2)``."""
    q1, q2, p1, p2 = state
    r3 = (q1 * q1 + q2 * q2) ** 1.5
    return np.array([p1 - a * q2, p2 + a * q1, -q1 / r3 - a * p2, -q2 / r3 + a * p1])


def integrate_rotating(s: CartesianState, duration: float, a: float = 1.0,
                       n_samples: int = 201, rtol: float = 1e-13, atol: float = 1e-13):
    """Integrate the rotating flow with DOP853 and return ``(times, states)``.

    A test harness for conservation laws, not a general integrator: no
    regularisation, so trajectories must stay clear of the origin.
    """
    times = np.linspace(0.0, duration, n_samples)
    sol = solve_ivp(lambda _t, z: cartesian_vector_field(z, a), (0.0, duration),
                    s.as_array(), method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.t, sol.y.T
