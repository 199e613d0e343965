"""Periodic orbits, Conley-Zehnder indices and convexity of the rotating Kepler problem."""

from .catalog import (circular_cz_index, circular_energies, cz_index_oracle,
                      dynamical_convexity_report, torus_family)
from .levicivita import convexity_scan, convexity_witness
from .linearized import CircularOrbitSeed, closed_form_path, numeric_monodromy_path
from .maslov import find_crossings, maslov_index
from .mechanics import CartesianState, PolarState

__version__ = "0.1.0"

__all__ = [
    "CartesianState", "CircularOrbitSeed", "PolarState", "circular_cz_index", "circular_energies",
    "closed_form_path", "convexity_scan", "convexity_witness", "cz_index_oracle",
    "dynamical_convexity_report", "find_crossings", "maslov_index", "numeric_monodromy_path",
    "torus_family",
]
