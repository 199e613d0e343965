"""Periodic orbits of the rotating Kepler problem and their Conley-Zehnder indices.

Circular orbits come from the cubic ``2E(c + E)^2 + 1 = 0``; torus families
``T(k, l)`` are k-fold covered Kepler ellipses closing after l turns of the
frame.  Indices of circular orbits use the closed-form iterate formula, with
a crossing-form computation available as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import (BookkeepingMismatchError, CatalogAssertionError,
                     DegenerateCrossingError, NonIntegerCoveringError)
from .linearized import CircularOrbitSeed, closed_form_path
from .maslov import DEFAULT_GRID, maslov_index
from .mechanics import CRITICAL_C, kepler_period

RESONANT = "RESONANT"
RETROGRADE, DIRECT, UNBOUNDED = "retrograde", "direct", "unbounded-branch"
RESONANCE_TOL = 1e-10
BOOKKEEPING_EPS = 1e-4

TORUS_NAMES = {(2, 1): "Hekuba", (3, 2): "Hilda", (4, 3): "Thule", (3, 1): "Hestia", (7, 4): "Cybele"}

Index = Union[int, str]


def _sign(sign) -> int:
    if sign in (RETROGRADE, "+", 1):
        return 1
    if sign in (DIRECT, "-", -1):
        return -1
    raise ValueError(f"sign must be 'retrograde' or 'direct', got {sign!r}")


def _check_covering(N) -> int:
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ValueError(f"covering number must be a positive integer, got {N!r}")
    return int(N)


@dataclass(frozen=True)
class CircularOrbit:
    E: float
    L: float
    c: float
    branch: str
    synodical_period: float
    covering: int = 1
    multiplicity: int = 1

    @property
    def contractible(self) -> bool:
        return self.covering % 2 == 0


@dataclass(frozen=True)
class TorusFamily:
    k: int
    l: int
    E_kl: float
    c_minus: float
    c_plus: float
    birth_covering: int
    death_covering: int
    cz_index: int
    name: str | None = None

    @property
    def is_iterate(self) -> bool:
        return math.gcd(self.k, self.l) > 1

    @property
    def contractible(self) -> bool:
        return self.birth_covering % 2 == 0

    def alive_at(self, c: float) -> bool:
        return self.c_plus < c < self.c_minus


@dataclass(frozen=True)
class OrbitRecord:
    kind: str
    cz_index: Index | None
    contractible: bool
    covering: int
    payload: CircularOrbit | TorusFamily
    bounded: bool = True

    @property
    def label(self) -> str:
        p = self.payload
        if self.kind == "circular":
            return f"{p.branch} x{self.covering}"
        return f"T({p.k},{p.l})" + (f" {p.name}" if p.name else "")


# ---------------------------------------------------------------- circular orbits

def _cubic_roots(c: float) -> list[tuple[float, int]]:
    """Real roots of ``E^3 + 2c E^2 + c^2 E + 1/2`` with multiplicities."""
    shift = -2.0 * c / 3.0
    p = -c * c / 3.0
    q = 0.5 - 2.0 * c ** 3 / 27.0
    disc = 4.0 * p ** 3 + 27.0 * q * q
    if abs(disc) <= 1e-12 * max(abs(4.0 * p ** 3), 27.0 * q * q, 1e-300):
        if p == 0.0:
            return [(shift, 3)]
        return sorted([(3.0 * q / p + shift, 1), (-1.5 * q / p + shift, 2)])
    if disc < 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        theta = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m))))
        ts = [m * math.cos((theta - 2.0 * math.pi * j) / 3.0) for j in range(3)]
        return sorted((t + shift, 1) for t in ts)
    d = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    t = math.copysign(abs(-q / 2.0 + d) ** (1 / 3), -q / 2.0 + d) + \
        math.copysign(abs(-q / 2.0 - d) ** (1 / 3), -q / 2.0 - d)
    return [(t + shift, 1)]


def cubic_residual(E: float, c: float) -> float:
    return 2.0 * E * (c + E) ** 2 + 1.0


def _newton(E: float, c: float) -> float:
    dfdE = 2.0 * (c + E) ** 2 + 4.0 * E * (c + E)
    return E if dfdE == 0.0 else E - cubic_residual(E, c) / dfdE


def synodical_period(E: float, sign) -> float:
    """Rotating-frame period ``2 pi / ((-2E)^(3/2) +- 1)``.

    Returns ``math.inf`` for the direct orbit at ``E = -1/2``, which is at
    rest in the rotating frame; the magnitude is returned on the unbounded
    branch where the direct denominator is negative.
    """
    if not E < 0.0:
        raise ValueError(f"circular orbits need E < 0, got {E}")
    denom = (-2.0 * E) ** 1.5 + _sign(sign)
    if abs(denom) <= 1e-12:
        return math.inf
    return 2.0 * math.pi / abs(denom)


def circular_energies(c: float) -> list[CircularOrbit]:
    """All simple circular orbits on the level ``H = -c``, sorted by energy.

    A double root is returned once with ``multiplicity=2``.
    """
    out = []
    for E, mult in _cubic_roots(c):
        if mult == 1:
            E = _newton(E, c)
        if not E < 0.0:
            continue
        L = -c - E
        if E > -0.5:
            branch = UNBOUNDED
        else:
            branch = RETROGRADE if L > 0.0 else DIRECT
        sign = RETROGRADE if L > 0.0 else DIRECT
        out.append(CircularOrbit(E, L, c, branch, synodical_period(E, sign), 1, mult))
    return out


def jacobi_from_energy(E: float, sign) -> float:
    """Inverse of the cubic along one branch: ``c = -E -+ 1/sqrt(-2E)``."""
    return -E - _sign(sign) / math.sqrt(-2.0 * E)


def _iterate_ratio(E: float, sign: int, N: int) -> float:
    # N * synodical period / Kepler period
    x = (-2.0 * E) ** 1.5
    return N * x / (x + sign)


def circular_cz_index(E: float, sign, N: int) -> Index:
    """Conley-Zehnder index ``1 + 2 max{j : j K < N S}`` of the N-th iterate,
    with ``K`` the Kepler period and ``S`` the synodical period.

    Returns :data:`RESONANT` when ``N S`` is an integer multiple of ``K``.
    """
    s = _sign(sign)
    N = _check_covering(N)
    if not E < 0.0:
        raise ValueError(f"circular orbits need E < 0, got {E}")
    if s < 0 and E >= -0.5:
        raise ValueError(f"direct circular orbits in the bounded component need E < -1/2, got {E}")
    ratio = _iterate_ratio(E, s, N)
    if abs(ratio - round(ratio)) <= RESONANCE_TOL * max(1.0, ratio):
        return RESONANT
    return 2 * math.ceil(ratio) - 1


def resonance_distance(E: float, sign, N: int) -> float:
    """Distance of ``N S / K`` from the nearest integer."""
    ratio = _iterate_ratio(E, _sign(sign), _check_covering(N))
    return abs(ratio - round(ratio))


def cz_index_oracle(E: float, sign, N: int, grid: int = DEFAULT_GRID) -> Index:
    """Index of the N-th iterate from crossing forms of the linearised flow."""
    s = _sign(sign)
    N = _check_covering(N)
    if not E < 0.0:
        raise ValueError(f"circular orbits need E < 0, got {E}")
    if s < 0 and E >= -0.5:
        raise ValueError(f"direct circular orbits in the bounded component need E < -1/2, got {E}")
    seed = CircularOrbitSeed.from_energy(E, s)
    path = closed_form_path(seed, N * synodical_period(E, s))
    try:
        mu = maslov_index(path, grid=grid, reject_terminal_crossing=True)
    except DegenerateCrossingError:
        return RESONANT
    return int(mu) if mu.denominator == 1 else mu


# ---------------------------------------------------------------- torus families

def _check_pair(k, l) -> tuple[int, int]:
    if int(k) != k or int(l) != l:
        raise ValueError(f"k and l must be integers, got {k!r}, {l!r}")
    k, l = int(k), int(l)
    if not (l >= 1 and k > l):
        raise ValueError(f"torus families need k > l >= 1, got k={k}, l={l}")
    return k, l


def torus_energy(k: int, l: int) -> float:
    k, l = _check_pair(k, l)
    return -0.5 * (k / l) ** (2.0 / 3.0)


def torus_family(k: int, l: int) -> TorusFamily:
    k, l = _check_pair(k, l)
    E = torus_energy(k, l)
    root = math.sqrt(1.0 / (-2.0 * E))
    return TorusFamily(k, l, E, -E + root, -E - root, k - l, k + l, 2 * k - 1, TORUS_NAMES.get((k, l)))


def _solve_covering(k: int, l: int, sign: int) -> int:
    E = torus_energy(k, l)
    value = 2.0 * math.pi * l / synodical_period(E, sign)
    nearest = round(value)
    if abs(value - nearest) > 1e-6:
        raise NonIntegerCoveringError(f"covering for T({k},{l}) solves to {value!r}")
    return int(nearest)


def birth_covering_check(k: int, l: int) -> int:
    """Cover of the direct circular orbit whose period matches ``2 pi l`` at ``E_kl``."""
    k, l = _check_pair(k, l)
    return _solve_covering(k, l, -1)


def death_covering_check(k: int, l: int) -> int:
    """Cover of the retrograde circular orbit whose period matches ``2 pi l`` at ``E_kl``."""
    k, l = _check_pair(k, l)
    return _solve_covering(k, l, 1)


def index_bookkeeping(k: int, l: int, eps: float = BOOKKEEPING_EPS) -> int:
    """Index of the (k-l)-fold direct orbit just before it gives birth to T(k, l).

    Two routes must agree: the iterate formula evaluated at ``E_kl - eps``
    (larger c, before the birth), and the large-c value ``2(k-l) + 1`` raised
    by 2 for each earlier birth on the same branch.
    """
    k, l = _check_pair(k, l)
    N = k - l
    E = torus_energy(k, l) - eps
    if resonance_distance(E, DIRECT, N) < 1e-6:
        raise BookkeepingMismatchError(f"E_kl - eps lies within 1e-6 of a resonance for T({k},{l})")
    direct = circular_cz_index(E, DIRECT, N)

    births = 0
    lp = 1
    while torus_energy(N + lp, lp) < E:
        births += 1
        lp += 1
    counted = 2 * N + 1 + 2 * births
    if direct != counted or counted != 2 * k - 1:
        raise BookkeepingMismatchError(
            f"T({k},{l}): iterate formula {direct}, birth count {counted}, expected {2 * k - 1}")
    return counted


# ---------------------------------------------------------------- convexity report

@dataclass
class CatalogReport:
    c: float
    N_max: int
    k_max: int
    records: list[OrbitRecord] = field(default_factory=list)
    assertions: dict[str, bool] = field(default_factory=dict)
    violations: list[tuple[str, OrbitRecord | None]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())


def _circular_records(c: float, N_max: int) -> list[OrbitRecord]:
    records = []
    for orbit in circular_energies(c):
        bounded = orbit.branch != UNBOUNDED
        for N in range(1, N_max + 1):
            payload = CircularOrbit(orbit.E, orbit.L, c, orbit.branch,
                                    orbit.synodical_period, N, orbit.multiplicity)
            idx = circular_cz_index(orbit.E, orbit.branch, N) if bounded else None
            records.append(OrbitRecord("circular", idx, N % 2 == 0, N, payload, bounded))
    return records


def _torus_records(c: float, k_max: int, e_floor: float | None) -> list[OrbitRecord]:
    records = []
    for k in range(2, k_max + 1):
        for l in range(1, k):
            fam = torus_family(k, l)
            if e_floor is not None and fam.E_kl < e_floor:
                continue
            if fam.alive_at(c):
                records.append(OrbitRecord("torus", fam.cz_index, fam.contractible, fam.birth_covering, fam))
    return records


def dynamical_convexity_report(c: float, N_max: int = 20, k_max: int = 20,
                               e_floor: float | None = None, strict: bool = False) -> CatalogReport:
    """Enumerate circular iterates (N <= N_max) and living tori (k <= k_max) at
    level ``c`` and test the index claims on the bounded component:

    * every contractible orbit has index >= 3;
    * the only contractible orbit of index 3 is the doubly covered retrograde;
    * the only orbit of index 1 is the simple retrograde.

    The orbit set is infinite; results hold for the stated truncation only.
    ``e_floor`` optionally drops torus families with ``E_kl < e_floor``.
    With ``strict`` a failed claim raises :class:`CatalogAssertionError`.
    """
    if not c > CRITICAL_C:
        raise ValueError(f"need c > 3/2 for a bounded component, got c={c}")
    N_max, k_max = _check_covering(N_max), int(k_max)
    report = CatalogReport(c, N_max, k_max)
    report.records = _circular_records(c, N_max) + _torus_records(c, k_max, e_floor)

    checked = [r for r in report.records if r.bounded and isinstance(r.cz_index, int)]

    def is_double_retrograde(r):
        return r.kind == "circular" and r.payload.branch == RETROGRADE and r.covering == 2

    def is_simple_retrograde(r):
        return r.kind == "circular" and r.payload.branch == RETROGRADE and r.covering == 1

    low = [r for r in checked if r.contractible and r.cz_index < 3]
    report.violations += [("contractible index < 3", r) for r in low]
    report.assertions["contractible_index_at_least_3"] = not low

    three = [r for r in checked if r.contractible and r.cz_index == 3]
    ok = len(three) == 1 and is_double_retrograde(three[0])
    report.assertions["unique_contractible_index_3_is_double_retrograde"] = ok
    if not ok:
        report.violations += [("contractible index 3", r) for r in three] or [("no contractible index-3 orbit", None)]

    one = [r for r in checked if r.cz_index == 1]
    ok = len(one) == 1 and is_simple_retrograde(one[0]) and not one[0].contractible
    report.assertions["unique_index_1_is_simple_retrograde"] = ok
    if not ok:
        report.violations += [("index 1", r) for r in one] or [("no index-1 orbit", None)]

    if strict and report.violations:
        what, rec = report.violations[0]
        raise CatalogAssertionError(f"{what}: {rec}", record=rec)
    return report


def life_of_tori(k_max: int) -> list[TorusFamily]:
    return [torus_family(k, l) for k in range(2, k_max + 1) for l in range(1, k)]


def as_half_integer(value) -> Fraction:
    return Fraction(value)
