import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotkepler.errors import CollisionStateError
from rotkepler.mechanics import (
    CartesianState,
    EnergyTriple,
    PolarState,
    angular_momentum,
    cartesian_vector_field,
    eccentricity,
    effective_potential,
    energies,
    from_polar,
    hamiltonian_vector_field_polar,
    hill_radii,
    hill_region_classify,
    integrate_rotating,
    kepler_energy,
    kepler_period,
    mechanical_hamiltonian,
    moser_energy,
    rotating_hamiltonian,
    to_polar,
)

coord = st.floats(-3.0, 3.0, allow_nan=False)


def states():
    return st.tuples(coord, coord, coord, coord).filter(lambda z: math.hypot(z[0], z[1]) > 1e-2).map(
        lambda z: CartesianState((z[0], z[1]), (z[2], z[3])))


@pytest.mark.parametrize("q,p,E", [((1, 0), (0, 1), -0.5), ((2, 0), (0, 0), -0.5), ((0.25, 0), (0, 2), -2.0)])
def test_kepler_energy(q, p, E):
    assert kepler_energy(CartesianState(q, p)) == pytest.approx(E, abs=1e-15)


@pytest.mark.parametrize("q,p,L", [((1, 0), (0, 1), 1.0), ((1, 0), (1, 0), 0.0), ((0.25, 0), (0, -2), -0.5)])
def test_angular_momentum(q, p, L):
    assert angular_momentum(CartesianState(q, p)) == L


@pytest.mark.parametrize("q", [(0.0, 0.0), (1e-14, 0.0), (0.0, -5e-14)])
def test_collision_states_rejected(q):
    with pytest.raises(CollisionStateError):
        CartesianState(q, (1.0, 0.0))


def test_energy_triple_relation():
    triple = energies(CartesianState((0.25, 0.0), (0.0, 2.0)))
    assert isinstance(triple, EnergyTriple)
    assert triple.hamiltonian == triple.kepler_energy + triple.angular_momentum == -1.5
    assert triple.jacobi_param == 1.5


@pytest.mark.parametrize("E,L,eps", [(-0.5, 1.0, 0.0), (-0.5, 0.0, 1.0), (-2.0, 0.5, 0.0), (-1.0, 0.5, math.sqrt(0.5))])
def test_eccentricity(E, L, eps):
    assert eccentricity(E, L) == pytest.approx(eps, abs=1e-15)


def test_eccentricity_clamps_tiny_negatives_and_rejects_large_ones():
    assert eccentricity(-0.5 * (1 + 1e-13), 1.0) == 0.0
    with pytest.raises(ValueError):
        eccentricity(-1.0, 1.0)


@given(st.floats(-5.0, -0.05), st.floats(-3.0, 3.0))
def test_eccentricity_vanishes_exactly_on_circular_locus(E, L):
    eps2 = 2 * E * L * L + 1
    if eps2 < -1e-12:
        with pytest.raises(ValueError):
            eccentricity(E, L)
    else:
        assert eccentricity(E, L) == pytest.approx(math.sqrt(max(eps2, 0.0)), abs=1e-6)


@pytest.mark.parametrize("E,T", [(-0.5, 2 * math.pi), (-2.0, math.pi / 4), (-0.5 * 2 ** (2 / 3), math.pi)])
def test_kepler_period(E, T):
    assert kepler_period(E) == pytest.approx(T, rel=1e-14)


@pytest.mark.parametrize("E", [0.0, 0.3])
def test_kepler_period_rejects_nonnegative_energy(E):
    with pytest.raises(ValueError):
        kepler_period(E)


@pytest.mark.parametrize("q,p,H", [((1, 0), (0, 1), 0.5), ((0.25, 0), (0, 2), -1.5), ((1, 0), (0, 0), -1.0)])
def test_rotating_hamiltonian(q, p, H):
    assert rotating_hamiltonian(CartesianState(q, p)) == pytest.approx(H, abs=1e-15)


@settings(max_examples=200)
@given(states())
def test_mechanical_form_matches_E_plus_L(s):
    assert mechanical_hamiltonian(s) == pytest.approx(rotating_hamiltonian(s), abs=1e-12 * max(1, abs(kepler_energy(s))))


@pytest.mark.parametrize("radius,U", [(1.0, -1.5), (2.0, -2.5), (0.5, -17 / 8)])
def test_effective_potential(radius, U):
    assert effective_potential(radius) == U


def test_effective_potential_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        effective_potential(0.0)


@pytest.mark.parametrize("c", [1.5001, 1.6, 2.0, 5.0, 50.0])
def test_hill_radii_solve_U_equals_minus_c(c):
    inner, outer = hill_radii(c)
    assert 0 < inner < 1 < outer
    assert effective_potential(inner) == pytest.approx(-c, abs=1e-11)
    assert effective_potential(outer) == pytest.approx(-c, abs=1e-11)


@pytest.mark.parametrize("c,radius,label", [
    (2.0, 0.2, "bounded"), (2.0, 1.0, "forbidden"), (2.0, 3.0, "unbounded"),
    (1.0, 1.0, "allowed-everywhere"), (1.5, 0.3, "allowed-everywhere"),
])
def test_hill_region_classify(c, radius, label):
    assert hill_region_classify(c, radius) == label


@pytest.mark.parametrize("q,p,k,K", [((1, 0), (0, 1), 0.5, 1.0), ((2, 0), (0, 0), 0.5, 1.0)])
def test_moser_energy(q, p, k, K):
    assert moser_energy(CartesianState(q, p), k) == K


def test_moser_scaling_example():
    k = 2.0
    w = math.sqrt(2 * k)
    lhs = moser_energy(CartesianState((1 / w, 0.0), (0.0, w)), k)
    assert lhs == pytest.approx(2.0, abs=1e-15)
    assert lhs == pytest.approx(w * moser_energy(CartesianState((1, 0), (0, 1)), 0.5), abs=1e-15)


@given(states(), st.floats(0.05, 5.0))
def test_moser_scaling_identity(s, k):
    w = math.sqrt(2 * k)
    q, p = np.array(s.q), np.array(s.p)
    lhs = moser_energy(CartesianState(tuple(q / w), tuple(w * p)), k)
    rhs = w * moser_energy(s, 0.5)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


def test_moser_energy_matches_definition():
    s = CartesianState((0.3, -0.7), (1.1, 0.4))
    k = 0.8
    assert moser_energy(s, k) == pytest.approx(s.radius * (kepler_energy(s) + k) + 1, abs=1e-14)


def test_polar_examples():
    assert to_polar(CartesianState((1, 0), (0, 1))) == PolarState(1.0, 0.0, 0.0, 1.0)
    back = from_polar(PolarState(1.0, math.pi / 2, 0.0, 1.0))
    np.testing.assert_allclose(back.as_array(), [0, 1, -1, 0], atol=1e-15)


@settings(max_examples=200)
@given(states())
def test_polar_round_trip_preserves_invariants(s):
    polar = to_polar(s)
    assert polar.t == angular_momentum(s)
    back = from_polar(polar)
    np.testing.assert_allclose(back.as_array(), s.as_array(), atol=1e-12 * max(1.0, np.abs(s.as_array()).max()))
    for fn in (kepler_energy, angular_momentum, rotating_hamiltonian):
        assert fn(back) == pytest.approx(fn(s), abs=1e-12 * max(1.0, abs(fn(s)), 1 / s.radius))


@pytest.mark.parametrize("x,r,t,expected", [(0.25, 0.0, 0.5, (0.0, 0.0, 0.0, 9.0)), (1.0, 0.0, -1.0, (0.0, 0.0, 0.0, 0.0))])
def test_polar_vector_field_examples(x, r, t, expected):
    np.testing.assert_allclose(hamiltonian_vector_field_polar(PolarState(x, 0.0, r, t), 1.0), expected, atol=1e-14)


@settings(max_examples=100)
@given(states(), st.sampled_from([0.0, 1.0, -0.7]))
def test_polar_field_is_the_cartesian_field_in_polar_coordinates(s, a):
    # chain rule applied to x = |q|, y = arg q, r = <q,p>/|q|, t = q x p
    q, p = np.array(s.q), np.array(s.p)
    dq, dp = np.split(cartesian_vector_field(s.as_array(), a), 2)
    x = np.linalg.norm(q)
    dx = q @ dq / x
    dy = (q[0] * dq[1] - q[1] * dq[0]) / x ** 2
    dr = (dq @ p + q @ dp) / x - (q @ p) * dx / x ** 2
    dt = dq[0] * p[1] + q[0] * dp[1] - dq[1] * p[0] - q[1] * dp[0]
    got = hamiltonian_vector_field_polar(to_polar(s), a)
    scale = max(1.0, np.abs(np.r_[dq, dp]).max(), 1 / x ** 2)
    np.testing.assert_allclose(got, [dr, dt, dx, dy], atol=1e-11 * scale)
    assert got[1] == 0.0


def test_integration_conserves_E_L_H():
    s = CartesianState((0.5, 0.0), (0.0, 1.2))
    E, L = kepler_energy(s), angular_momentum(s)
    _, traj = integrate_rotating(s, 10 * 2 * math.pi / ((-2 * E) ** 1.5 + 1))
    for z in traj:
        zs = CartesianState(z[:2], z[2:])
        assert abs(kepler_energy(zs) - E) < 1e-8
        assert abs(angular_momentum(zs) - L) < 1e-8


def test_circular_orbit_stays_circular():
    # retrograde circular orbit at E=-2: radius 1/4, synodical period 2*pi/9
    s = CartesianState((0.25, 0.0), (0.0, 2.0))
    times, traj = integrate_rotating(s, 2 * math.pi / 9, n_samples=11)
    np.testing.assert_allclose(np.hypot(traj[:, 0], traj[:, 1]), 0.25, atol=1e-12)
    np.testing.assert_allclose(traj[-1], s.as_array(), atol=1e-10)
