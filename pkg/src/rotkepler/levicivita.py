"""Levi-Civita regularised rotating Kepler problem and convexity tests.

With ``q = 2 v^2`` and ``p = u / conj(v)`` the level ``H = -c`` becomes the
zero set of the quartic

    K_c(u, v) = |u|^2 / 2 + c |v|^2 + 2 |v|^2 <u, i v> - 1/2

on ``C^2 = R^4``, ordered ``(u1, u2, v1, v2)``.  ``<., .>`` is the real inner
product and ``i`` the counterclockwise quarter turn.  A negative eigenvalue
of the Hessian restricted to the tangent space of ``{K_c = 0}`` shows that
the hypersurface is not convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GradientVanishesError, RayMissError

I2 = np.array([[0.0, -1.0], [1.0, 0.0]])
RAY_BRACKET = 10.0
GRADIENT_FLOOR = 1e-10

SQRT5 = math.sqrt(5.0)
WITNESS_A = (1.0 + SQRT5) / 4.0
WITNESS_U2 = 9.0 * SQRT5 / 10.0 - 1.5
WITNESS_VALUE = 1.5 * (11.0 / 5.0 - SQRT5)


@dataclass(frozen=True)
class LCPoint:
    u: tuple[float, float]
    v: tuple[float, float]

    def as_array(self) -> np.ndarray:
        return np.array([*self.u, *self.v], dtype=float)

    @classmethod
    def from_array(cls, z) -> "LCPoint":
        z = [float(a) for a in z]
        return cls((z[0], z[1]), (z[2], z[3]))


@dataclass(frozen=True)
class ConvexityReport:
    c: float
    samples: int
    min_eigenvalue: float
    argmin_point: LCPoint
    argmin_direction: np.ndarray
    ray_misses: int = 0
    witness_injected: bool = False

    @property
    def verdict(self) -> str:
        if self.min_eigenvalue < 0.0:
            return "not convex (negative tangential curvature found)"
        return f"no counterexample found at {self.samples} samples"


def _split(z):
    z = np.asarray(z, dtype=float)
    return z[..., :2], z[..., 2:]


def _rot(w):
    # multiplication by i on the last axis
    return np.stack([-w[..., 1], w[..., 0]], axis=-1)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def lc_energy_array(z, c: float):
    u, v = _split(z)
    v2 = _dot(v, v)
    return 0.5 * _dot(u, u) + c * v2 + 2.0 * v2 * _dot(u, _rot(v)) - 0.5


def lc_energy(p: LCPoint, c: float) -> float:
    return float(lc_energy_array(p.as_array(), c))


def lc_gradient_array(z, c: float):
    u, v = _split(z)
    v2 = _dot(v, v)[..., None]
    uiv = _dot(u, _rot(v))[..., None]
    du = u + 2.0 * v2 * _rot(v)
    dv = 2.0 * c * v + 4.0 * uiv * v - 2.0 * v2 * _rot(u)
    return np.concatenate([du, dv], axis=-1)


def lc_gradient(p: LCPoint, c: float) -> np.ndarray:
    """Coefficients of ``DK_c(u, v)`` as a covector on ``R^4``."""
    return lc_gradient_array(p.as_array(), c)


def lc_hessian_array(z, c: float):
    u, v = _split(z)
    shape = u.shape[:-1]
    v2 = _dot(v, v)[..., None, None]
    uiv = _dot(u, _rot(v))[..., None, None]
    eye = np.broadcast_to(np.eye(2), shape + (2, 2))
    iv, iu = _rot(v), _rot(u)
    outer = lambda a, b: a[..., :, None] * b[..., None, :]  # noqa: E731
    huv = 4.0 * outer(iv, v) + 2.0 * v2 * I2
    hvv = (2.0 * c + 4.0 * uiv) * eye - 4.0 * (outer(v, iu) + outer(iu, v))
    top = np.concatenate([eye, huv], axis=-1)
    bottom = np.concatenate([np.swapaxes(huv, -1, -2), hvv], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def lc_hessian(p: LCPoint, c: float) -> np.ndarray:
    return lc_hessian_array(p.as_array(), c)


def hessian_form(p: LCPoint, c: float, direction) -> float:
    """The quadratic form ``D^2 K_c`` written term by term, as a cross-check
    on the assembled matrix."""
    u, v = np.asarray(p.u), np.asarray(p.v)
    uh, vh = _split(direction)
    return float(_dot(uh, uh) + 2 * c * _dot(vh, vh) + 4 * _dot(u, _rot(v)) * _dot(vh, vh)
                 + 8 * _dot(v, vh) * _dot(u, _rot(vh)) + 8 * _dot(v, vh) * _dot(uh, _rot(v))
                 + 4 * _dot(v, v) * _dot(uh, _rot(vh)))


def convexity_witness():
    """Point, tangent direction and negative Hessian value at ``c = 3/2``.

    The point is ``(u, v) = (-i a, 1/2)`` with ``a = (1 + sqrt 5)/4`` and the
    direction ``(i u2, 1)`` with ``u2 = 9 sqrt(5)/10 - 3/2``.  All three
    values are evaluated through the energy, gradient and Hessian.
    """
    c = 1.5
    point = LCPoint((0.0, -WITNESS_A), (0.5, 0.0))
    direction = np.array([0.0, WITNESS_U2, 1.0, 0.0])
    residual = lc_energy(point, c)
    tangency = float(lc_gradient(point, c) @ direction)
    value = float(direction @ lc_hessian(point, c) @ direction)
    if abs(residual) > 1e-14 or abs(tangency) > 1e-14 or not value < 0.0:
        raise AssertionError(
            f"witness failed: K={residual:.3e}, DK(dir)={tangency:.3e}, D2K(dir,dir)={value:.6g}")
    return point, direction, value


def _unit_directions(rng, n):
    d = rng.standard_normal((n, 4))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def _ray_coefficients(d, c):
    # along the ray: K = alpha rho^2 + beta rho^4 - 1/2
    u, v = _split(d)
    alpha = 0.5 * _dot(u, u) + c * _dot(v, v)
    beta = 2.0 * _dot(v, v) * _dot(u, _rot(v))
    upper = np.full(np.shape(alpha), RAY_BRACKET)
    falling = beta < 0.0
    upper[falling] = np.minimum(RAY_BRACKET, np.sqrt(-alpha[falling] / (2.0 * beta[falling])))
    return alpha, beta, upper


def _bisect_rays(d, c):
    """Vectorised bisection for the first zero on each ray; NaN marks a miss."""
    alpha, beta, hi = _ray_coefficients(d, c)
    g = lambda rho: alpha * rho ** 2 + beta * rho ** 4 - 0.5  # noqa: E731
    hit = g(hi) >= 0.0
    lo = np.zeros_like(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        below = g(mid) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(hit, 0.5 * (lo + hi), np.nan)


def ray_hit(direction, c: float) -> float:
    """Smallest ``rho > 0`` with ``K_c(rho * direction) = 0``.

    The bracket is ``[0, 10]``, cut at the maximum of ``K`` along the ray
    when the quartic term is negative.
    """
    rho = float(_bisect_rays(np.atleast_2d(np.asarray(direction, dtype=float)), c)[0])
    if math.isnan(rho):
        raise RayMissError(f"ray {list(direction)} misses the compact component at c={c}")
    return rho


def sample_hypersurface(c: float, n: int, seed: int = 0) -> tuple[list[LCPoint], int]:
    """Draw ``n`` points of ``{K_c = 0}`` along uniformly random rays.

    Returns the points and the number of re-drawn rays that missed.
    """
    pts, misses, _ = _sample_array(c, n, seed)
    return pts, misses


def _sample_array(c, n, seed):
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    chunks, have, misses = [], 0, 0
    while have < n:
        d = _unit_directions(rng, n - have)
        z = _bisect_rays(d, c)[:, None] * d
        ok = ~np.isnan(z[:, 0])
        ok[ok] = np.linalg.norm(lc_gradient_array(z[ok], c), axis=1) >= GRADIENT_FLOOR
        misses += int(np.sum(~ok))
        chunks.append(z[ok])
        have += int(np.sum(ok))
    z = np.concatenate(chunks)
    return [LCPoint.from_array(row) for row in z], misses, z


def tangential_hessian(z, c: float):
    """Restricted Hessians ``B H B^T`` with ``B`` an orthonormal basis (3x4)
    of ``ker DK_c`` at each point; returns ``(restricted, B)``."""
    z = np.atleast_2d(z)
    grad = lc_gradient_array(z, c)
    norms = np.linalg.norm(grad, axis=1)
    if np.any(norms < GRADIENT_FLOOR):
        raise GradientVanishesError(f"|DK_c| < {GRADIENT_FLOOR:g} at a sample")
    _, _, vt = np.linalg.svd(grad[:, None, :])
    basis = vt[:, 1:, :]
    hess = lc_hessian_array(z, c)
    restricted = basis @ hess @ np.swapaxes(basis, 1, 2)
    return 0.5 * (restricted + np.swapaxes(restricted, 1, 2)), basis


def convexity_scan(c: float, n: int, seed: int = 0, inject_witness: bool = False) -> ConvexityReport:
    """Minimum tangential-Hessian eigenvalue over ``n`` random samples.

    A negative minimum certifies non-convexity; a nonnegative one only means
    no counterexample was found.  ``inject_witness`` (``c = 3/2`` only)
    appends the analytic witness point to the sample set.
    """
    _, misses, z = _sample_array(c, n, seed)
    if inject_witness:
        if c != 1.5:
            raise ValueError("the analytic witness lives on c = 3/2")
        point, _, _ = convexity_witness()
        z = np.vstack([z, point.as_array()])
    restricted, basis = tangential_hessian(z, c)
    eigval, eigvec = np.linalg.eigh(restricted)
    i = int(np.argmin(eigval[:, 0]))
    direction = eigvec[i, :, 0] @ basis[i]
    return ConvexityReport(c, len(z), float(eigval[i, 0]), LCPoint.from_array(z[i]),
                           direction, misses, inject_witness)
