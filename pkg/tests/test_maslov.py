import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rotkepler.errors import DegenerateCrossingError, UnresolvedCrossingError
from rotkepler.maslov import (
    ExponentialPath,
    PerturbedPath,
    SampledPath,
    SymplecticPath,
    crossing_form,
    crossing_form_matrix,
    crossing_signature,
    find_crossings,
    kernel_basis,
    maslov_index,
)

ROT = [[0.0, -1.0], [1.0, 0.0]]
CLOCKWISE = [[0.0, 1.0], [-1.0, 0.0]]
SHEAR = [[0.0, 1.0], [0.0, 0.0]]


def contact_generator(t0):
    return [[0.0, -1.0 / t0 ** 4], [1.0 / t0 ** 2, 0.0]]


class AnglePath(SymplecticPath):
    """Rotation by a prescribed angle function."""

    def __init__(self, theta, dtheta, duration):
        super().__init__(duration)
        self.theta, self.dtheta = theta, dtheta

    def _matrix(self, s):
        a = self.theta(s)
        return np.stack([np.stack([np.cos(a), -np.sin(a)], -1), np.stack([np.sin(a), np.cos(a)], -1)], -2)

    def _derivative(self, s):
        return self.dtheta(s)[:, None, None] * (np.array(ROT) @ self._matrix(s))


def test_full_rotation_has_endpoint_crossings_only():
    crossings = find_crossings(ExponentialPath(ROT, 2 * math.pi))
    assert [c.time for c in crossings] == [0.0, 2 * math.pi]
    assert all(c.kernel_dim == 2 and c.is_endpoint and c.signature == 2 for c in crossings)


def test_half_rotation_crosses_only_at_start():
    crossings = find_crossings(ExponentialPath(ROT, math.pi))
    assert [c.time for c in crossings] == [0.0]


def test_contact_generator_crossings():
    t0 = 0.5
    crossings = find_crossings(ExponentialPath(contact_generator(t0), 3 * math.pi / 8))
    assert len(crossings) == 2
    assert crossings[0].time == 0.0
    assert crossings[1].time == pytest.approx(math.pi / 4, abs=1e-11)
    assert not crossings[1].is_endpoint
    assert [c.signature for c in crossings] == [2, 2]


@pytest.mark.parametrize("t0", [0.5, 0.8, 1.0, 1.7])
@pytest.mark.parametrize("v,expected", [((1.0, 0.0), lambda t0: 1 / t0 ** 2), ((0.0, 1.0), lambda t0: 1 / t0 ** 4)])
def test_crossing_form_of_contact_generator(t0, v, expected):
    assert crossing_form(ExponentialPath(contact_generator(t0), 1.0), 0.0, v) == pytest.approx(expected(t0), rel=1e-14)


def test_crossing_form_matches_symbolic_expansion():
    sympy = pytest.importorskip("sympy")
    t0, v1, v2 = sympy.symbols("t0 v1 v2", positive=True)
    a = sympy.Matrix([[0, -1 / t0 ** 4], [1 / t0 ** 2, 0]])
    v = sympy.Matrix([v1, v2])
    w = a * v
    q = sympy.expand(v[0] * w[1] - v[1] * w[0])
    assert sympy.simplify(q - (v1 ** 2 / t0 ** 2 + v2 ** 2 / t0 ** 4)) == 0
    path = ExponentialPath(contact_generator(0.7), 1.0)
    num = crossing_form(path, 0.0, (0.3, -1.2))
    assert num == pytest.approx(float(q.subs({t0: 0.7, v1: 0.3, v2: -1.2})), rel=1e-13)
    with pytest.raises(ValueError):
        crossing_form(path, 0.1, (1.0, 0.0))


def test_clockwise_rotation_flips_the_form():
    path = ExponentialPath(CLOCKWISE, 1.0)
    assert crossing_form(path, 0.0, (1.0, 0.0)) == -1.0
    assert crossing_signature(path, 0.0) == -2


def test_shear_crossing_form_is_degenerate():
    path = ExponentialPath(SHEAR, 1.0)
    assert len(kernel_basis(path, 0.0)) == 2
    # Q(v) = omega0(v, (v2, 0)) = -v2^2: rank one
    np.testing.assert_allclose(crossing_form_matrix(path, 0.0), [[0.0, 0.0], [0.0, -1.0]], atol=1e-15)
    with pytest.raises(DegenerateCrossingError):
        crossing_signature(path, 0.0)
    assert crossing_signature(path, 0.0, allow_degenerate=True) == -1


@pytest.mark.parametrize("periods,expected", [(1.0, 2), (0.9, 1), (2.5, 5), (0.5, 1), (3.0, 6)])
def test_rotation_indices(periods, expected):
    mu = maslov_index(ExponentialPath(ROT, 2 * math.pi * periods))
    assert mu == expected and isinstance(mu, Fraction)


def test_hyperbolic_generator_has_index_zero():
    # Q = -2 v1 v2 at s = 0 is indefinite and no other crossing occurs
    assert maslov_index(ExponentialPath([[1.0, 0.0], [0.0, -1.0]], 3.0)) == 0


class ShiftedRotation(SymplecticPath):
    """``exp(sJ) @ [[1, 1], [0, 1]]``: eigenvalue one at s = 0 with a 1-d kernel."""

    shear = np.array([[1.0, 1.0], [0.0, 1.0]])

    def _matrix(self, s):
        return ExponentialPath(ROT, 1.0)._matrix(s) @ self.shear

    def _derivative(self, s):
        return np.array(ROT) @ self._matrix(s)


def test_half_integer_index():
    # next crossing only at s = 2 atan(1/2)
    path = ShiftedRotation(0.5)
    [crossing] = find_crossings(path)
    assert crossing.kernel_dim == 1 and crossing.signature == 1
    assert maslov_index(path) == Fraction(1, 2)
    assert find_crossings(ShiftedRotation(1.5))[1].time == pytest.approx(2 * math.atan(0.5), abs=1e-11)


def test_terminal_crossing_rejected_on_request():
    path = ExponentialPath(ROT, 2 * math.pi)
    with pytest.raises(DegenerateCrossingError):
        maslov_index(path, reject_terminal_crossing=True)


def test_degenerate_interior_crossing_is_perturbed_away():
    # angle (s-1)^3 stalls at the crossing s = 1, so its form vanishes there
    path = AnglePath(lambda s: (s - 1) ** 3, lambda s: 3 * (s - 1) ** 2, 2.0)
    crossings = find_crossings(path)
    assert [c.degenerate for c in crossings] == [True]
    assert crossings[0].time == pytest.approx(1.0, abs=1e-4)
    assert maslov_index(path) == 2


def test_perturbation_keeps_endpoints():
    base = ExponentialPath(ROT, 2 * math.pi)
    pert = PerturbedPath(base, 1e-6)
    for s in (0.0, base.duration):
        np.testing.assert_allclose(pert.matrix(s), base.matrix(s), atol=1e-15)
        np.testing.assert_allclose(pert.derivative(s), base.derivative(s), atol=1e-12)


def test_unresolvable_grid_raises():
    with pytest.raises(UnresolvedCrossingError):
        maslov_index(ExponentialPath(ROT, 2 * math.pi * 10.25), grid=2)


def _rotation_type(a, b):
    return [[0.0, -b], [a, 0.0]]


def _clear_of_crossings(s, period):
    frac = (s / period) % 1.0
    return min(frac, 1 - frac) > 1e-3


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.3, 25.0), st.floats(0.05, 0.95))
def test_catenation(a, b, T, split):
    period = 2 * math.pi / math.sqrt(a * b)
    s_star = split * T
    assume(_clear_of_crossings(T, period) and _clear_of_crossings(s_star, period))
    path = ExponentialPath(_rotation_type(a, b), T)
    whole = maslov_index(path, grid=2000)
    parts = maslov_index(path.restrict(0.0, s_star), grid=2000) + maslov_index(path.restrict(s_star, T), grid=2000)
    assert whole == parts


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.3, 25.0), st.floats(-1e-6, 1e-6))
def test_perturbation_stability(a, b, T, delta):
    period = 2 * math.pi / math.sqrt(a * b)
    assume(_clear_of_crossings(T, period) and _clear_of_crossings(T * (1 + delta), period))
    gen = np.array(_rotation_type(a, b))
    base = find_crossings(ExponentialPath(gen, T), grid=2000)
    moved = find_crossings(ExponentialPath((1 + delta) * gen, T), grid=2000)
    assert [c.signature for c in base] == [c.signature for c in moved]
    assert maslov_index(ExponentialPath(gen, T), grid=2000) == maslov_index(ExponentialPath((1 + delta) * gen, T), grid=2000)


@pytest.mark.parametrize("gen", [ROT, CLOCKWISE, SHEAR, contact_generator(0.5), [[0.5, 2.0], [-1.0, -0.5]], [[1.0, 0.0], [0.0, -1.0]]])
def test_exponential_paths_are_symplectic(gen):
    path = ExponentialPath(gen, 4.0)
    assert path.max_symplectic_defect() < 5e-10
    # the closed form agrees with scipy's matrix exponential
    from scipy.linalg import expm
    for s in (0.3, 1.7, 4.0):
        np.testing.assert_allclose(path.matrix(s), expm(s * np.array(gen)), rtol=1e-12, atol=1e-12)


def test_exponential_path_rejects_trace():
    with pytest.raises(ValueError):
        ExponentialPath([[1.0, 0.0], [0.0, 0.0]], 1.0)


def test_sampled_path_reproduces_rotation_index():
    times = np.linspace(0.0, 2 * math.pi * 2.5, 4001)
    exact = ExponentialPath(ROT, times[-1])
    sampled = SampledPath(times, exact.matrix(times), exact.derivative(times))
    assert maslov_index(sampled) == 5
    spline_only = SampledPath(times, exact.matrix(times))
    assert maslov_index(spline_only) == 5


def test_sampled_path_rejects_non_symplectic_samples():
    times = np.linspace(0.0, 1.0, 5)
    mats = np.repeat(np.eye(2)[None] * 1.01, 5, axis=0)
    with pytest.raises(ValueError):
        SampledPath(times, mats)
