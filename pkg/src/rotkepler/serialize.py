"""JSON/CSV emitters for catalogs, diagrams and convexity reports.

Reals are written with 17 significant digits so every double round-trips;
non-finite values are written as the strings ``inf``, ``-inf`` and ``nan``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from .catalog import (DIRECT, RETROGRADE, UNBOUNDED, CatalogReport, OrbitRecord,
                      TorusFamily, circular_energies, life_of_tori)
from .levicivita import ConvexityReport

ENERGY_JACOBI_COLUMNS = ["c", "E_root", "branch"]
LIFE_OF_TORI_COLUMNS = ["k", "l", "name", "E_kl", "c_minus", "c_plus", "cz_index"]
CATALOG_COLUMNS = ["kind", "label", "branch", "k", "l", "E", "covering", "contractible", "cz_index", "bounded", "iterate"]


def format_real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else format_real(x)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    return value


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_real(value)
    return str(value)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def parse_csv(text: str, types: dict | None = None) -> list[dict]:
    """Inverse of :func:`to_csv`; ``types`` maps column names to converters."""
    types = types or {}
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for key, raw in row.items():
            if raw == "":
                parsed[key] = None
            elif key in types:
                parsed[key] = types[key](raw)
            else:
                parsed[key] = raw
        out.append(parsed)
    return out


def _parse_bool(raw: str) -> bool:
    return raw == "true"


def _parse_index(raw: str):
    try:
        return int(raw)
    except ValueError:
        return raw


ENERGY_JACOBI_TYPES = {"c": float, "E_root": float}
LIFE_OF_TORI_TYPES = {"k": int, "l": int, "E_kl": float, "c_minus": float, "c_plus": float, "cz_index": int}
CATALOG_TYPES = {"k": int, "l": int, "E": float, "covering": int, "contractible": _parse_bool,
                 "cz_index": _parse_index, "bounded": _parse_bool, "iterate": _parse_bool}


def _branch_label(branch: str) -> str:
    return "unbounded" if branch == UNBOUNDED else branch


def energy_jacobi_rows(c_values) -> list[dict]:
    """Rows ``(c, E_root, branch)``; a double root is listed once per branch it joins."""
    rows = []
    for c in c_values:
        for orbit in circular_energies(float(c)):
            if orbit.multiplicity == 2 and orbit.E == -0.5:
                branches = [DIRECT, "unbounded"]
            else:
                branches = [_branch_label(orbit.branch)]
            rows += [{"c": float(c), "E_root": orbit.E, "branch": b} for b in branches]
    return rows


def torus_row(fam: TorusFamily) -> dict:
    return {"k": fam.k, "l": fam.l, "name": fam.name, "E_kl": fam.E_kl,
            "c_minus": fam.c_minus, "c_plus": fam.c_plus, "cz_index": fam.cz_index}


def life_of_tori_rows(k_max: int) -> list[dict]:
    return [torus_row(f) for f in life_of_tori(k_max)]


def record_row(rec: OrbitRecord) -> dict:
    p = rec.payload
    row = {"kind": rec.kind, "label": rec.label, "covering": rec.covering,
           "contractible": rec.contractible, "cz_index": rec.cz_index, "bounded": rec.bounded}
    if rec.kind == "circular":
        row.update(branch=_branch_label(p.branch), E=p.E, iterate=False)
    else:
        row.update(branch=None, k=p.k, l=p.l, E=p.E_kl, iterate=p.is_iterate)
    return row


def catalog_dict(report: CatalogReport) -> dict:
    return {
        "c": report.c,
        "N_max": report.N_max,
        "k_max": report.k_max,
        "passed": report.passed,
        "assertions": report.assertions,
        "violations": [{"claim": what, "record": record_row(r) if r else None} for what, r in report.violations],
        "orbits": [record_row(r) for r in report.records],
    }


def convexity_dict(report: ConvexityReport, witness=None) -> dict:
    out = {
        "c": report.c,
        "samples": report.samples,
        "ray_misses": report.ray_misses,
        "witness_injected": report.witness_injected,
        "min_eigenvalue": report.min_eigenvalue,
        "verdict": report.verdict,
        "argmin_point": [*report.argmin_point.u, *report.argmin_point.v],
        "argmin_direction": list(report.argmin_direction),
    }
    if witness is not None:
        point, direction, value = witness
        out["analytic_witness"] = {"point": [*point.u, *point.v], "direction": list(direction),
                                   "hessian_value": value}
    return out


CONVEXITY_COLUMNS = ["c", "samples", "ray_misses", "witness_injected", "min_eigenvalue", "verdict",
                     "point_u1", "point_u2", "point_v1", "point_v2", "dir_u1", "dir_u2", "dir_v1", "dir_v2"]


def convexity_row(report: ConvexityReport) -> dict:
    d = convexity_dict(report)
    row = {k: d[k] for k in CONVEXITY_COLUMNS[:6]}
    row.update(zip(CONVEXITY_COLUMNS[6:10], d["argmin_point"]))
    row.update(zip(CONVEXITY_COLUMNS[10:], d["argmin_direction"]))
    return row


__all__ = [
    "CATALOG_COLUMNS", "CATALOG_TYPES", "CONVEXITY_COLUMNS", "ENERGY_JACOBI_COLUMNS", "ENERGY_JACOBI_TYPES",
    "LIFE_OF_TORI_COLUMNS", "LIFE_OF_TORI_TYPES", "RETROGRADE", "catalog_dict", "convexity_dict",
    "convexity_row", "energy_jacobi_rows", "format_real", "life_of_tori_rows", "parse_csv",
    "record_row", "to_csv", "to_json", "torus_row",
]
