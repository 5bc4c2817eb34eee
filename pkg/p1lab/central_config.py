"""
Project Configuration — version, tolerances, report thresholds
===============================================================

Single home for every numeric threshold used by the library and by the
verification battery.  The report thresholds can be overridden with a JSON
file named by the ``P1LAB_TOL`` environment variable.
"""

import json
import os
import re
from dataclasses import dataclass, field, replace
from importlib.metadata import version, PackageNotFoundError
from pathlib import Path
from types import MappingProxyType

# Version: single source of truth is pyproject.toml
try:
    PROJECT_VERSION = version("p1lab")
except PackageNotFoundError:
    # Dev / CI: package not installed, read pyproject.toml directly
    _toml = Path(__file__).resolve().parent.parent / "pyproject.toml"
    _m = (
        re.search(r'version\s*=\s*"([^"]+)"', _toml.read_text())
        if _toml.exists()
        else None
    )
    PROJECT_VERSION = _m.group(1) if _m else "0.0.0-dev"
PROJECT_NAME = "p1lab"

TOLERANCE_ENV = "P1LAB_TOL"

# Report thresholds, one per row of the verification battery
DEFAULT_THRESHOLDS = MappingProxyType(
    {
        # algebra
        "poly_mul_eval": 1e-12,
        "dual_vs_fd": 1e-6,
        "pole_eval": 1e-12,
        # symfun
        "newton_identity": 1e-10,
        "eh_orthogonality": 1e-10,
        "bell_power_sums": 1e-9,
        "elem_deleted": 1e-11,
        "vandermonde_column": 1e-10,
        "lagrange_interpolation": 1e-10,
        # times
        "time_round_trip": 1e-11,
        "trivial_times_table": 1e-9,
        "tau_duality": 1e-9,
        "p2_reduced": 1e-12,
        # coeffs
        "toeplitz_residual": 1e-11,
        "closed_forms": 1e-9,
        "reduction_table": 1e-10,
        # lax
        "check_polynomiality": 1e-9,
        "trace_law": 1e-10,
        "normalization": 1e-9,
        "symmetric_pipeline": 1e-9,
        "on_curve": 1e-10,
        # ham
        "hamilton_gradient": 1e-8,
        "ham_two_forms": 1e-10,
        "trivial_invariance": 1e-8,
        "symplectic": 1e-9,
        "ham_symmetric": 1e-9,
        # flow
        "zero_curvature": 1e-8,
        "painleve_exact": 1e-12,
        "painleve_numeric": 1e-4,
        "flow_commutativity": 1e-8,
        "energy_balance": 1e-7,
    }
)


@dataclass(frozen=True)
class Tolerances:
    """Numeric guards shared by all modules."""

    # Two q_i closer than this (absolute) raise PoleCollision
    COLLISION: float = 1e-10

    # Relative trim threshold for polynomial coefficients
    TRIM: float = 1e-13

    # Vandermonde / Jacobian condition-number guard
    MAX_CONDITION: float = 1e12

    # Pole parts that must cancel (relative)
    RESIDUE: float = 1e-9

    # Public API genus cap
    MAX_GENUS: int = 12

    # Integrator blow-up norm
    BLOWUP_NORM: float = 1e8

    DEFAULT_HBAR: complex = 1.0 + 0.0j
    DEFAULT_SEED: int = 7

    thresholds: MappingProxyType = field(
        default_factory=lambda: DEFAULT_THRESHOLDS
    )

    def threshold(self, name: str) -> float:
        """Report threshold for a named check."""
        return self.thresholds[name]


def load_tolerances(path: str | None = None) -> Tolerances:
    """Defaults, overridden by the JSON object at ``path`` or ``$P1LAB_TOL``.

    Unknown keys raise ``KeyError``; non-numeric values raise ``ValueError``.
    """
    path = path or os.environ.get(TOLERANCE_ENV)
    if not path:
        return Tolerances()
    overrides = json.loads(Path(path).read_text())
    if not isinstance(overrides, dict):
        raise ValueError(f"{TOLERANCE_ENV} file must hold a JSON object")
    merged = dict(DEFAULT_THRESHOLDS)
    for name, value in overrides.items():
        if name not in merged:
            raise KeyError(f"unknown tolerance '{name}'")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"tolerance '{name}' must be a number")
        merged[name] = float(value)
    return replace(Tolerances(), thresholds=MappingProxyType(merged))


# Global instance
config = Tolerances()
