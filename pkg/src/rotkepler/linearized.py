"""Linearised rotating-Kepler flow along circular orbits.

Coordinates are ordered ``(r, t, x, y)`` throughout: radial momentum,
angular momentum, radius, angle.  The contact structure ``ker(lambda)`` with
``lambda = -x dr + t dy`` is trivialised by the frame ``(X1, X2)``; along a
circular orbit the linearised flow in this frame is a rotation-like 2x2 path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrameSingularError, RotKeplerError, StepUnderflowError
from .maslov import ExponentialPath, SampledPath, SymplecticPath
from .mechanics import PolarState, hamiltonian_vector_field_polar

R, T, X, Y = range(4)
FRAME_TOL = 1e-10


class GeneratorMismatchError(RotKeplerError):
    """The projected generator disagrees with its closed form."""


@dataclass(frozen=True)
class CircularOrbitSeed:
    """Circular orbit of radius ``x0``; ``sign=+1`` retrograde, ``-1`` direct."""

    x0: float
    sign: int
    a: float = 1.0

    def __post_init__(self):
        if not self.x0 > 0.0:
            raise ValueError(f"radius must be positive, got {self.x0}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 (retrograde) or -1 (direct), got {self.sign}")

    @classmethod
    def from_energy(cls, E: float, sign: int, a: float = 1.0) -> "CircularOrbitSeed":
        if not E < 0.0:
            raise ValueError(f"circular orbits need E < 0, got {E}")
        return cls(-1.0 / (2.0 * E), sign, a)

    @classmethod
    def from_t0(cls, t0: float, a: float = 1.0) -> "CircularOrbitSeed":
        if t0 == 0.0:
            raise ValueError("t0 must be nonzero")
        return cls(t0 * t0, 1 if t0 > 0 else -1, a)

    @property
    def t0(self) -> float:
        return self.sign * math.sqrt(self.x0)

    @property
    def kepler_energy(self) -> float:
        return -1.0 / (2.0 * self.x0)

    @property
    def angular_speed(self) -> float:
        return self.t0 / self.x0 ** 2 + self.a

    @property
    def synodical_period(self) -> float:
        w = self.angular_speed
        return math.inf if w == 0.0 else 2.0 * math.pi / abs(w)

    def state(self, y: float = 0.0) -> PolarState:
        return PolarState(self.x0, y, 0.0, self.t0)


def linearized_matrix(seed: CircularOrbitSeed) -> np.ndarray:
    x0, t0 = seed.x0, seed.t0
    m = np.zeros((4, 4))
    m[R, T] = 2.0 * t0 / x0 ** 3
    m[R, X] = -1.0 / x0 ** 3
    m[X, R] = 1.0
    m[Y, T] = 1.0 / x0 ** 2
    m[Y, X] = -2.0 * t0 / x0 ** 3
    return m


def contact_form(state: PolarState, vec) -> float:
    """``lambda = -x dr + t dy`` applied to ``vec``."""
    return -state.x * vec[R] + state.t * vec[Y]


def dcontact_form(u, w) -> float:
    """``d lambda = -dx ^ dr + dt ^ dy``."""
    return -(u[X] * w[R] - u[R] * w[X]) + (u[T] * w[Y] - u[Y] * w[T])


def hamiltonian_differential(state: PolarState, a: float = 1.0) -> np.ndarray:
    x, r, t = state.x, state.r, state.t
    return np.array([r, t / x ** 2 + a, -t * t / x ** 3 + 1.0 / x ** 2, 0.0])


@dataclass(frozen=True)
class TrivializationFrame:
    X1: np.ndarray
    X2: np.ndarray
    XH: np.ndarray

    def basis(self) -> np.ndarray:
        """4x3 matrix with columns ``X1, X2, XH``."""
        return np.column_stack([self.X1, self.X2, self.XH])


def trivialization_frame(state: PolarState, a: float = 1.0) -> TrivializationFrame:
    """Contact-plane frame at ``state``.

    ``X1`` and ``X2`` annihilate ``lambda`` everywhere and are tangent to the
    level sets of ``H_a`` for the rotation rate ``a = 1`` they were built for.
    """
    x, r, t = state.x, state.r, state.t
    d = t * x + 1.0
    if abs(d) < FRAME_TOL:
        raise FrameSingularError(f"t*x + 1 = {d:.3e} at x={x}, t={t}")
    x1 = np.array([t / x, -r * x / d, r * x ** 3 / d, 1.0])
    x2 = np.array([0.0, -(x - t * t) / (x * d), (x * x + t) / d, 0.0])
    return TrivializationFrame(x1, x2, hamiltonian_vector_field_polar(state, a)[[R, T, X, Y]])


def frame_generator(seed: CircularOrbitSeed) -> np.ndarray:
    """The linearised flow expressed in the frame ``(X1, X2, XH)`` (3x3)."""
    if seed.a != 1.0:
        raise ValueError("the contact frame is adapted to rotation rate a = 1")
    f = trivialization_frame(seed.state(), seed.a).basis()
    mf = linearized_matrix(seed) @ f
    coeffs, *_ = np.linalg.lstsq(f, mf, rcond=None)
    residual = np.abs(f @ coeffs - mf).max()
    if residual > 1e-10 * max(1.0, np.abs(mf).max()):
        raise GeneratorMismatchError(f"linearised flow leaves the frame span (residual {residual:.2e})")
    return coeffs


def reduced_generator(seed: CircularOrbitSeed) -> np.ndarray:
    """Top-left 2x2 block of :func:`frame_generator`, checked against
    ``[[0, -1/t0^4], [1/t0^2, 0]]``."""
    block = frame_generator(seed)[:2, :2]
    t0 = seed.t0
    expected = np.array([[0.0, -1.0 / t0 ** 4], [1.0 / t0 ** 2, 0.0]])
    if np.abs(block - expected).max() > 1e-10 * np.abs(expected).max():
        raise GeneratorMismatchError(f"projected generator {block.tolist()} != {expected.tolist()}")
    return block


class RotationBlockPath(SymplecticPath):
    """``[[cos(s/t0^3), -sin(s/t0^3)/t0], [t0 sin(s/t0^3), cos(s/t0^3)]]``."""

    def __init__(self, t0: float, duration: float):
        super().__init__(duration)
        if t0 == 0.0:
            raise ValueError("t0 must be nonzero")
        self.t0 = float(t0)

    def _matrix(self, s):
        t0 = self.t0
        c, sn = np.cos(s / t0 ** 3), np.sin(s / t0 ** 3)
        return np.stack([np.stack([c, -sn / t0], -1), np.stack([t0 * sn, c], -1)], -2)

    def _derivative(self, s):
        t0 = self.t0
        c, sn = np.cos(s / t0 ** 3), np.sin(s / t0 ** 3)
        w = 1.0 / t0 ** 3
        return w * np.stack([np.stack([-sn, -c / t0], -1), np.stack([t0 * c, -sn], -1)], -2)


def closed_form_path(seed: CircularOrbitSeed, duration: float) -> RotationBlockPath:
    return RotationBlockPath(seed.t0, duration)


def generator_path(seed: CircularOrbitSeed, duration: float) -> ExponentialPath:
    """``exp(s * reduced_generator)``, the same path by a different route."""
    return ExponentialPath(reduced_generator(seed), duration)


def _rk4_propagator(m: np.ndarray, h: float) -> np.ndarray:
    # one classical RK4 step of a constant-coefficient linear system
    z = h * m
    z2 = z @ z
    z3 = z2 @ z
    return np.eye(len(m)) + z + z2 / 2.0 + z3 / 6.0 + z3 @ z / 24.0


def numeric_monodromy_path(seed: CircularOrbitSeed, duration: float,
                           step_control: float = 1e-10) -> SampledPath:
    """Integrate the variational equations with fixed-step RK4 and project
    each sample onto the contact frame.

    The step is halved until the step-doubling estimate of the local error
    falls below ``step_control``.
    """
    if not duration > 0.0:
        raise ValueError(f"duration must be positive, got {duration}")
    if not step_control > 0.0:
        raise ValueError(f"step_control must be positive, got {step_control}")
    m = linearized_matrix(seed)
    n = max(1, math.ceil(duration * np.abs(m).max()))
    while True:
        h = duration / n
        if h < 1e-9 * duration:
            raise StepUnderflowError(f"step {h:.3e} below 1e-9 * duration")
        full = _rk4_propagator(m, h)
        half = _rk4_propagator(m, h / 2.0)
        # the estimate is meaningless below the roundoff of one step
        estimate = max(np.abs(full - half @ half).max() * 16.0 / 15.0, np.finfo(float).eps * np.abs(full).max())
        if estimate < step_control:
            break
        n *= 2

    basis = trivialization_frame(seed.state(), seed.a).basis()
    rows = [R, X, Y]  # the t-component of every frame vector is zero here
    frame_sq = basis[rows]
    phi = np.eye(4)
    times = np.linspace(0.0, duration, n + 1)
    mats = np.empty((n + 1, 2, 2))
    dmats = np.empty((n + 1, 2, 2))
    for i in range(n + 1):
        if i:
            phi = full @ phi
        moved = phi @ basis[:, :2]
        mats[i] = np.linalg.solve(frame_sq, moved[rows])[:2]
        # the variational equation itself supplies the derivative at each sample
        dmats[i] = np.linalg.solve(frame_sq, (m @ moved)[rows])[:2]
    return SampledPath(times, mats, dmats)
