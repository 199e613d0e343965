"""Robbin-Salamon Maslov index of paths in Sp(2) via crossing forms.

A crossing of ``psi: [0, T] -> Sp(2)`` is a time where ``psi(s)`` has
eigenvalue one.  On ``ker(psi(s) - 1)`` the crossing form is
``Q(v) = omega0(v, psi'(s) v)`` with ``omega0(u, w) = u1*w2 - u2*w1``, and

    mu(psi) = sgn Q_0 / 2 + sum_{0 < s < T} sgn Q_s + sgn Q_T / 2.

Half-integers are returned as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import brentq

from .errors import DegenerateCrossingError, UnresolvedCrossingError

J = np.array([[0.0, -1.0], [1.0, 0.0]])
IDENTITY = np.eye(2)

DEFAULT_GRID = 10_000
SYMPLECTIC_TOL = 5e-10
SIGNATURE_ZERO_TOL = 1e-10
PERTURBATION_EPS = (1e-8, 1e-6)


def omega0(u, w) -> float:
    """Standard area form ``u1*w2 - u2*w1``."""
    return float(u[0] * w[1] - u[1] * w[0])


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


class SymplecticPath:
    """A path ``[0, duration] -> Sp(2)``.

    Subclasses implement ``_matrix`` and ``_derivative`` for 1-d arrays of
    times.  ``crossing_tol`` is the relative smallest-singular-value threshold
    below which ``psi(s) - 1`` counts as singular.
    """

    crossing_tol = 1e-9

    def __init__(self, duration: float):
        if not duration > 0.0:
            raise ValueError(f"duration must be positive, got {duration}")
        self.duration = float(duration)

    def matrix(self, s):
        s_arr = np.asarray(s, dtype=float)
        out = self._matrix(np.atleast_1d(s_arr).ravel())
        return out.reshape(s_arr.shape + (2, 2))

    def derivative(self, s):
        s_arr = np.asarray(s, dtype=float)
        out = self._derivative(np.atleast_1d(s_arr).ravel())
        return out.reshape(s_arr.shape + (2, 2))

    def _matrix(self, s):
        raise NotImplementedError

    def _derivative(self, s):
        raise NotImplementedError

    def restrict(self, start: float, end: float) -> "SymplecticPath":
        return RestrictedPath(self, start, end)

    def max_symplectic_defect(self, n: int = 1001) -> float:
        s = np.linspace(0.0, self.duration, n)
        return float(np.max(np.abs(_det2(self.matrix(s)) - 1.0)))


class ExponentialPath(SymplecticPath):
    """``psi(s) = exp(s A)`` for a fixed traceless 2x2 generator ``A``."""

    def __init__(self, generator, duration: float):
        super().__init__(duration)
        a = np.array(generator, dtype=float)
        if a.shape != (2, 2):
            raise ValueError(f"generator must be 2x2, got shape {a.shape}")
        if abs(np.trace(a)) > 1e-12 * max(1.0, np.abs(a).max()):
            raise ValueError("generator must be traceless to generate symplectic matrices")
        self.generator = a
        self._det = float(_det2(a))

    def _scalars(self, s):
        d = self._det
        if d > 0.0:
            w = math.sqrt(d)
            return np.cos(w * s), np.sin(w * s) / w
        if d < 0.0:
            w = math.sqrt(-d)
            return np.cosh(w * s), np.sinh(w * s) / w
        return np.ones_like(s), s.copy()

    def _matrix(self, s):
        c, sn = self._scalars(s)
        return c[:, None, None] * IDENTITY + sn[:, None, None] * self.generator

    def _derivative(self, s):
        return self.generator @ self._matrix(s)


class SampledPath(SymplecticPath):
    """Path given by matrices on a time grid.

    With ``derivatives`` the samples are joined by cubic Hermite pieces,
    otherwise by a cubic spline whose derivative stands in for the path's.
    Either way interpolation error is present, so ``crossing_tol`` is looser.
    """

    crossing_tol = 1e-6

    def __init__(self, times, matrices, derivatives=None):
        times = np.asarray(times, dtype=float)
        matrices = np.asarray(matrices, dtype=float)
        if times.ndim != 1 or matrices.shape != (times.size, 2, 2):
            raise ValueError("need times of shape (m,) and matrices of shape (m, 2, 2)")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        defect = np.max(np.abs(_det2(matrices) - 1.0))
        if defect > SYMPLECTIC_TOL:
            raise ValueError(f"sampled matrices are not symplectic: max |det - 1| = {defect:.2e}")
        super().__init__(times[-1])
        self.times = times
        self.matrices = matrices
        if derivatives is None:
            self._spline = CubicSpline(times, matrices, axis=0)
        else:
            self._spline = CubicHermiteSpline(times, matrices, np.asarray(derivatives, dtype=float), axis=0)
        self._dspline = self._spline.derivative()

    def _matrix(self, s):
        return self._spline(s)

    def _derivative(self, s):
        return self._dspline(s)


class RestrictedPath(SymplecticPath):
    """``s -> base(start + s)`` on ``[0, end - start]``."""

    def __init__(self, base: SymplecticPath, start: float, end: float):
        if not 0.0 <= start < end <= base.duration:
            raise ValueError(f"invalid sub-interval [{start}, {end}] of [0, {base.duration}]")
        super().__init__(end - start)
        self.base, self.start = base, float(start)
        self.crossing_tol = base.crossing_tol

    def _matrix(self, s):
        return self.base.matrix(s + self.start)

    def _derivative(self, s):
        return self.base.derivative(s + self.start)


class PerturbedPath(SymplecticPath):
    """``exp(eps * bump(s) * J) @ base(s)`` with ``bump = sin^2(pi s / T)``.

    The bump vanishes to second order at both ends, so endpoints (and their
    crossing forms) are untouched.
    """

    def __init__(self, base: SymplecticPath, eps: float):
        super().__init__(base.duration)
        self.base, self.eps = base, float(eps)
        self.crossing_tol = base.crossing_tol

    def _rotation(self, s):
        angle = self.eps * np.sin(np.pi * s / self.duration) ** 2
        c, sn = np.cos(angle), np.sin(angle)
        rot = np.empty(s.shape + (2, 2))
        rot[:, 0, 0], rot[:, 0, 1], rot[:, 1, 0], rot[:, 1, 1] = c, -sn, sn, c
        return rot

    def _matrix(self, s):
        return self._rotation(s) @ self.base.matrix(s)

    def _derivative(self, s):
        dangle = self.eps * (np.pi / self.duration) * np.sin(2.0 * np.pi * s / self.duration)
        rot = self._rotation(s)
        return (dangle[:, None, None] * (J @ rot)) @ self.base.matrix(s) + rot @ self.base.derivative(s)


@dataclass(frozen=True)
class Crossing:
    time: float
    kernel_dim: int
    signature: int | None
    is_endpoint: bool
    degenerate: bool = False


def _singular_values(m):
    return np.linalg.svd(m - IDENTITY, compute_uv=False)


def _is_crossing(path, s, tol=None):
    tol = path.crossing_tol if tol is None else tol
    m = path.matrix(s)
    return _singular_values(m)[-1] <= tol * max(1.0, np.abs(m).max())


def kernel_basis(path: SymplecticPath, s: float) -> np.ndarray:
    """Orthonormal basis (as rows) of the numerical kernel of ``psi(s) - 1``."""
    m = path.matrix(s)
    _, sv, vt = np.linalg.svd(m - IDENTITY)
    scale = max(1.0, np.abs(m).max())
    if sv[-1] > path.crossing_tol * scale:
        raise ValueError(f"s={s} is not a crossing (smallest singular value {sv[-1]:.3e})")
    # both singular values vanish together at psi = 1; a looser bound keeps that case 2-d
    dim = 2 if sv[0] <= max(1e-6, path.crossing_tol) * scale else 1
    return vt[2 - dim:]


def crossing_form(path: SymplecticPath, s: float, v) -> float:
    """Evaluate ``omega0(v, psi'(s) v)`` for ``v`` in ``ker(psi(s) - 1)``."""
    v = np.asarray(v, dtype=float)
    residual = np.linalg.norm((path.matrix(s) - IDENTITY) @ v)
    if residual > max(1e-8, path.crossing_tol) * np.linalg.norm(v):
        raise ValueError(f"v is not in ker(psi(s) - 1): residual {residual:.3e}")
    return omega0(v, path.derivative(s) @ v)


def crossing_form_matrix(path: SymplecticPath, s: float) -> np.ndarray:
    """Symmetric matrix of the crossing form in an orthonormal kernel basis."""
    basis = kernel_basis(path, s)
    dpsi = path.derivative(s)
    q = np.array([[omega0(vi, dpsi @ vj) for vj in basis] for vi in basis])
    return 0.5 * (q + q.T)


def crossing_signature(path: SymplecticPath, s: float, allow_degenerate: bool = False) -> int:
    """Signature of the crossing form at the crossing ``s``.

    Raises :class:`DegenerateCrossingError` when an eigenvalue is numerically
    zero, unless ``allow_degenerate`` is set, in which case zero eigenvalues
    are simply not counted.
    """
    q = crossing_form_matrix(path, s)
    eig = np.linalg.eigvalsh(q)
    scale = max(np.abs(eig).max(), np.abs(path.derivative(s)).max())
    zero = np.abs(eig) <= SIGNATURE_ZERO_TOL * scale
    if zero.any() and not allow_degenerate:
        raise DegenerateCrossingError(f"degenerate crossing form at s={s}: eigenvalues {eig}", time=s)
    return int(np.sum(eig[~zero] > 0) - np.sum(eig[~zero] < 0))


def _det_minus_one(m, dm):
    """``det(M - 1)`` and its derivative along the path."""
    f = _det2(m) - m[:, 0, 0] - m[:, 1, 1] + 1.0
    ddet = dm[:, 0, 0] * m[:, 1, 1] + m[:, 0, 0] * dm[:, 1, 1] - dm[:, 0, 1] * m[:, 1, 0] - m[:, 0, 1] * dm[:, 1, 0]
    return f, ddet - dm[:, 0, 0] - dm[:, 1, 1]


def _crossing_times(path: SymplecticPath, n: int) -> list[float]:
    T = path.duration
    s = np.linspace(0.0, T, n + 1)
    f, fp = _det_minus_one(path.matrix(s), path.derivative(s))

    def f_at(x):
        return float(_det_minus_one(path.matrix(np.array([x])), path.derivative(np.array([x])))[0][0])

    def fp_at(x):
        return float(_det_minus_one(path.matrix(np.array([x])), path.derivative(np.array([x])))[1][0])

    xtol = 1e-12 * max(1.0, T)
    candidates = [brentq(f_at, s[i], s[i + 1], xtol=xtol)
                  for i in np.flatnonzero(f[:-1] * f[1:] < 0.0)]
    # tangential zeros of det(psi - 1) show up as sign changes of its derivative
    candidates += [brentq(fp_at, s[i], s[i + 1], xtol=xtol)
                   for i in np.flatnonzero(fp[:-1] * fp[1:] < 0.0)]
    candidates += list(s[1:-1][(f[1:-1] == 0.0) | (fp[1:-1] == 0.0)])

    sep = 1e-9 * max(1.0, T)
    accepted = [x for x in sorted(candidates) if sep < x < T - sep and _is_crossing(path, x)]

    def sigma(x):
        return _singular_values(path.matrix(x))[-1]

    # neighbours that stay singular in between are one (flat) crossing
    clusters = []
    for x in accepted:
        if clusters and (x - clusters[-1][-1] <= sep or _is_crossing(path, 0.5 * (x + clusters[-1][-1]))):
            clusters[-1].append(x)
        else:
            clusters.append([x])
    times = [min(cl, key=sigma) for cl in clusters]
    # drop an outermost representative glued to a singular endpoint
    if times and _is_crossing(path, 0.0) and _is_crossing(path, 0.5 * times[0]):
        times.pop(0)
    if times and _is_crossing(path, T) and _is_crossing(path, 0.5 * (times[-1] + T)):
        times.pop()
    return times


def find_crossings(path: SymplecticPath, grid: int = DEFAULT_GRID) -> list[Crossing]:
    """Locate all crossings of ``path`` on ``[0, T]``.

    Interior crossings are bracketed on a uniform grid and refined to 1e-12;
    the search is repeated on a twice-finer grid and accepted once two
    consecutive grids agree.  Two failed refinements raise
    :class:`UnresolvedCrossingError`.
    """
    T = path.duration
    prev = _crossing_times(path, grid)
    for k in (2, 4):
        cur = _crossing_times(path, grid * k)
        if len(cur) == len(prev) and np.allclose(cur, prev, rtol=0.0, atol=1e-9 * max(1.0, T)):
            break
        prev = cur
    else:
        raise UnresolvedCrossingError(
            f"crossing count did not stabilise under refinement ({len(prev)} vs {len(cur)})")

    out = []
    times = [(0.0, True)] if _is_crossing(path, 0.0) else []
    times += [(x, False) for x in cur]
    if _is_crossing(path, T):
        times.append((T, True))
    for x, endpoint in times:
        dim = len(kernel_basis(path, x))
        try:
            sig, degenerate = crossing_signature(path, x), False
        except DegenerateCrossingError:
            sig, degenerate = None, True
        out.append(Crossing(x, dim, sig, endpoint, degenerate))
    return out


def _weighted_sum(crossings) -> Fraction:
    total = Fraction(0)
    for c in crossings:
        total += Fraction(c.signature, 2) if c.is_endpoint else Fraction(c.signature)
    return total


def maslov_index(path: SymplecticPath, grid: int = DEFAULT_GRID,
                 reject_terminal_crossing: bool = False) -> Fraction:
    """Robbin-Salamon index as an exact half-integer.

    With ``reject_terminal_crossing`` a crossing at ``s = T`` (a degenerate
    periodic orbit) raises :class:`DegenerateCrossingError` instead of being
    weighted by one half.  Degenerate interior crossings are removed by a
    rotation bump that fixes both endpoints; two failed attempts abort.
    """
    crossings = find_crossings(path, grid)
    T = path.duration
    if reject_terminal_crossing and any(c.is_endpoint and c.time == T for c in crossings):
        raise DegenerateCrossingError(f"terminal matrix has eigenvalue 1 at T={T}", time=T)
    for c in crossings:
        if c.is_endpoint and c.degenerate:
            raise DegenerateCrossingError(f"degenerate endpoint crossing at s={c.time}", time=c.time)
    if not any(c.degenerate for c in crossings):
        return _weighted_sum(crossings)
    for eps in PERTURBATION_EPS:
        perturbed = find_crossings(PerturbedPath(path, eps), grid)
        if not any(c.degenerate for c in perturbed):
            return _weighted_sum(perturbed)
    raise DegenerateCrossingError("degenerate crossings persist after perturbation")
