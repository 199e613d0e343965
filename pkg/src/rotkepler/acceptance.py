"""The acceptance suite: each check returns a :class:`CriterionResult`.

Used by ``rotkepler verify`` and by ``tests/test_acceptance.py``.  Expected
values are closed forms computed here, never read back from the code under
test.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .catalog import (birth_covering_check, circular_cz_index, circular_energies,
                      cz_index_oracle, death_covering_check, dynamical_convexity_report,
                      index_bookkeeping, resonance_distance, synodical_period, torus_family)
from .levicivita import (LCPoint, convexity_scan, convexity_witness, lc_energy_array,
                         lc_gradient_array, lc_hessian_array)
from .linearized import CircularOrbitSeed, closed_form_path, numeric_monodromy_path
from .mechanics import (CartesianState, angular_momentum, integrate_rotating, kepler_energy,
                        moser_energy, rotating_hamiltonian)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _timed(number, name, fn):
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported with its message
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - start)


# 1 ------------------------------------------------------------------------

def check_witness():
    sqrt5 = math.sqrt(5.0)
    a = (1.0 + sqrt5) / 4.0
    u2 = 9.0 * sqrt5 / 10.0 - 1.5
    expected = 1.5 * (11.0 / 5.0 - sqrt5)
    point, direction, value = convexity_witness()
    best = math.inf
    for _ in range(20):
        t0 = time.perf_counter()
        convexity_witness()
        best = min(best, time.perf_counter() - t0)
    ok = (abs(value - expected) <= 1e-12
          and point == LCPoint((0.0, -a), (0.5, 0.0))
          and np.array_equal(direction, [0.0, u2, 1.0, 0.0])
          and best < 1e-3)
    return ok, f"value={value:.15f} expected={expected:.15f} runtime={best * 1e6:.0f}us"


# 2 ------------------------------------------------------------------------

def check_hekuba_birth():
    c_minus = torus_family(2, 1).c_minus
    closed = 2.0 * 2.0 ** (-1.0 / 3.0)
    ok = abs(c_minus - closed) <= 1e-12 and abs(c_minus - 1.59) <= 0.005
    return ok, f"c_minus={c_minus:.13f} closed form={closed:.13f}"


# 3 ------------------------------------------------------------------------

ORACLE_GRID_SEED = 20240611
ORACLE_GRID_SIZE = 200
ORACLE_RESONANCE_MARGIN = 1e-6


def oracle_grid(size=ORACLE_GRID_SIZE, seed=ORACLE_GRID_SEED):
    """Deterministic non-resonant ``(E, sign, N)`` tuples."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < size:
        E = float(rng.uniform(-5.0, -0.55))
        sign = "retrograde" if rng.integers(2) else "direct"
        N = int(rng.integers(1, 9))
        if resonance_distance(E, sign, N) > ORACLE_RESONANCE_MARGIN:
            out.append((E, sign, N))
    return out


def check_oracle_grid():
    start = time.perf_counter()
    mismatches = [(E, s, N) for E, s, N in oracle_grid()
                  if circular_cz_index(E, s, N) != cz_index_oracle(E, s, N)]
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 30.0
    return ok, f"{ORACLE_GRID_SIZE} tuples, {len(mismatches)} mismatches, {elapsed:.1f}s"


# 4 ------------------------------------------------------------------------

LANDMARKS = [(-2.0, "retrograde", 1, 1), (-2.0, "retrograde", 2, 3),
             (-2.0, "direct", 1, 3), (-0.7, "direct", 1, 5)]


def check_landmarks():
    got = [(circular_cz_index(E, s, N), cz_index_oracle(E, s, N)) for E, s, N, _ in LANDMARKS]
    ok = all(a == b == want for (a, b), (*_, want) in zip(got, LANDMARKS))
    return ok, "closed/oracle " + ", ".join(f"{a}/{b}" for a, b in got)


# 5 ------------------------------------------------------------------------

NAMED_TORI = {"Hekuba": (2, 1, 3), "Hilda": (3, 2, 5), "Thule": (4, 3, 7),
              "Hestia": (3, 1, 5), "Cybele": (7, 4, 13)}


def check_torus_indices():
    bad = []
    for k in range(2, 13):
        for l in range(1, k):
            fam = torus_family(k, l)
            if fam.cz_index != 2 * k - 1 or index_bookkeeping(k, l) != 2 * k - 1:
                bad.append((k, l))
    for name, (k, l, want) in NAMED_TORI.items():
        fam = torus_family(k, l)
        if fam.name != name or fam.cz_index != want:
            bad.append((k, l, name))
    return not bad, f"k<=12: {len(bad)} mismatches" + (f" {bad[:5]}" if bad else "")


# 6 ------------------------------------------------------------------------

def check_coverings():
    bad = [(k, l) for k in range(2, 13) for l in range(1, k)
           if birth_covering_check(k, l) != k - l or death_covering_check(k, l) != k + l]
    return not bad, f"k<=12: {len(bad)} mismatches"


# 7 ------------------------------------------------------------------------

CONVEXITY_LEVELS = (1.55, 1.7, 2.0, 3.0, 5.0, 10.0)


def check_dynamical_convexity():
    failed = []
    records = 0
    for c in CONVEXITY_LEVELS:
        report = dynamical_convexity_report(c, N_max=20, k_max=20)
        records += len(report.records)
        if not report.passed or report.violations:
            failed.append(c)
    return not failed, f"{len(CONVEXITY_LEVELS)} levels, {records} orbits, failing levels: {failed or 'none'}"


# 8 ------------------------------------------------------------------------

def check_cubic_degeneration():
    roots = sorted(circular_energies(1.5), key=lambda o: o.E)
    energies = [o.E for o in roots]
    mult = [o.multiplicity for o in roots]
    # 2E(E + 3/2)^2 + 1 = 2(E + 2)(E + 1/2)^2 at c = 3/2
    factor = max(abs(2 * E * (E + 1.5) ** 2 + 1 - 2 * (E + 2) * (E + 0.5) ** 2) for E in np.linspace(-3, 1, 41))
    ok = (len(roots) == 2 and abs(energies[0] + 2.0) <= 1e-10 and abs(energies[1] + 0.5) <= 1e-10
          and mult == [1, 2] and factor <= 1e-12)
    return ok, f"roots={energies} multiplicities={mult}"


# 9 ------------------------------------------------------------------------

FIDELITY_T0 = (0.4, 0.5, 1.0, 1.5)


def check_oracle_fidelity():
    worst = 0.0
    for t0 in FIDELITY_T0:
        seed = CircularOrbitSeed.from_t0(t0)
        T = seed.synodical_period
        numeric = numeric_monodromy_path(seed, T)
        closed = closed_form_path(seed, T)
        s = np.linspace(0.0, T, 5001)
        worst = max(worst, float(np.abs(numeric.matrix(s) - closed.matrix(s)).max()))
    return worst < 1e-8, f"max deviation {worst:.2e}"


# 10 -----------------------------------------------------------------------

def check_scan_sanity():
    start = time.perf_counter()
    critical = convexity_scan(1.5, 10_000, seed=7, inject_witness=True)
    below = convexity_scan(1.45, 100_000, seed=7)
    elapsed = time.perf_counter() - start
    ok = critical.min_eigenvalue < 0.0 and below.min_eigenvalue < 0.0 and elapsed < 60.0
    return ok, (f"min at c=1.5: {critical.min_eigenvalue:.4g}, at c=1.45: {below.min_eigenvalue:.4g}, "
                f"{elapsed:.1f}s")


# 11 -----------------------------------------------------------------------

DRIFT_ORBITS = [((0.5, 0.0), (0.0, 1.2)), ((0.8, 0.1), (0.2, -1.0)), ((1.5, 0.0), (0.1, 0.5)),
                ((0.3, 0.2), (-0.9, 1.4))]


def _drift():
    worst = 0.0
    for q, p in DRIFT_ORBITS:
        s = CartesianState(q, p)
        E, L = kepler_energy(s), angular_momentum(s)
        duration = 10.0 * synodical_period(E, 1 if L > 0 else -1)
        _, states = integrate_rotating(s, duration)
        traj = [CartesianState(z[:2], z[2:]) for z in states]
        for fn, ref in ((kepler_energy, E), (angular_momentum, L), (rotating_hamiltonian, E + L)):
            worst = max(worst, max(abs(fn(z) - ref) for z in traj))
    return worst


def _finite_differences(n=1000, seed=11):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, (n, 4))
    c = rng.uniform(1.4, 10.0, (n, 1))
    eye = np.eye(4)
    h1, h2 = 1e-5, 1e-4
    fd_grad = np.stack([(lc_energy_array(z + h1 * e, c[:, 0]) - lc_energy_array(z - h1 * e, c[:, 0])) / (2 * h1)
                        for e in eye], axis=-1)
    grad = lc_gradient_array(z, c)
    f0 = lc_energy_array(z, c[:, 0])
    fd_hess = np.empty((n, 4, 4))
    for i, ei in enumerate(eye):
        for j, ej in enumerate(eye):
            f = lambda d: lc_energy_array(z + d, c[:, 0])  # noqa: E731
            if i == j:
                fd_hess[:, i, i] = (f(h2 * ei) - 2 * f0 + f(-h2 * ei)) / h2 ** 2
            else:
                fd_hess[:, i, j] = (f(h2 * (ei + ej)) - f(h2 * (ei - ej)) - f(h2 * (ej - ei))
                                    + f(-h2 * (ei + ej))) / (4 * h2 ** 2)
    hess = np.stack([lc_hessian_array(z[k], c[k, 0]) for k in range(n)])
    g_err = np.linalg.norm(fd_grad - grad, axis=1) / np.maximum(np.linalg.norm(grad, axis=1), 1.0)
    h_err = np.linalg.norm(fd_hess - hess, axis=(1, 2)) / np.maximum(np.linalg.norm(hess, axis=(1, 2)), 1.0)
    return float(g_err.max()), float(h_err.max())


def _moser_scaling(n=1000, seed=13):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        q = rng.uniform(-2.0, 2.0, 2)
        while np.hypot(*q) < 1e-3:
            q = rng.uniform(-2.0, 2.0, 2)
        p = rng.uniform(-2.0, 2.0, 2)
        k = float(rng.uniform(0.05, 5.0))
        w = math.sqrt(2.0 * k)
        lhs = moser_energy(CartesianState(tuple(q / w), tuple(w * p)), k)
        rhs = w * moser_energy(CartesianState(tuple(q), tuple(p)), 0.5)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def check_conservation_and_calculus():
    drift = _drift()
    g_err, h_err = _finite_differences()
    moser = _moser_scaling()
    ok = drift < 1e-8 and g_err < 1e-7 and h_err < 1e-5 and moser <= 1e-12
    return ok, f"drift={drift:.1e} grad={g_err:.1e} hess={h_err:.1e} moser={moser:.1e}"


CRITERIA = [
    (1, "witness reproduction", check_witness),
    (2, "Hekuba birth energy", check_hekuba_birth),
    (3, "closed form vs crossing-form oracle grid", check_oracle_grid),
    (4, "index landmarks", check_landmarks),
    (5, "torus indices", check_torus_indices),
    (6, "covering numbers", check_coverings),
    (7, "dynamical convexity on truncations", check_dynamical_convexity),
    (8, "cubic degeneration at c = 3/2", check_cubic_degeneration),
    (9, "numerical oracle fidelity", check_oracle_fidelity),
    (10, "convexity scan sanity", check_scan_sanity),
    (11, "conservation and calculus", check_conservation_and_calculus),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            return _timed(num, name, fn)
    raise KeyError(number)


def run_all() -> list[CriterionResult]:
    return [_timed(num, name, fn) for num, name, fn in CRITERIA]


def format_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'#':>2}  {'criterion':<{width}}  result  {'time':>7}  detail"]
    for r in results:
        lines.append(f"{r.number:>2}  {r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  "
                     f"{r.seconds:>6.2f}s  {r.detail}")
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)


__all__ = ["CRITERIA", "CriterionResult", "format_table", "oracle_grid", "run_all", "run_criterion"]
