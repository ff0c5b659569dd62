"""Numeric tolerances and truncation constants, defaulted in one place."""

from dataclasses import dataclass, fields, replace, asdict
from typing import Any, Dict, Mapping

from utils.error_utils import ValidationError


@dataclass(frozen=True)
class NumericSettings:
    """Every tolerance the solvers use. Override through the flat JSON run config."""

    # tail series of the busy-period products and of the boundary visit counts
    series_rel_tol: float = 1e-14
    series_abs_floor: float = 1e-30
    series_max_terms: int = 1_000_000
    # boundary cost series of the SMDP (relative), past the decay onset
    boundary_tol: float = 1e-15
    boundary_onset_spread: float = 10.0
    # linear programming
    feasibility_tol: float = 1e-9
    optimality_tol: float = 1e-9
    pivot_tol: float = 1e-9
    support_threshold: float = 1e-9
    stall_threshold: int = 50
    max_simplex_iterations: int = 20_000
    # truncation of the birth-death chain for the exact and discounted oracles
    truncation_margin: int = 40
    truncation_spread: float = 12.0
    sensitivity_tol: float = 1e-8
    # discounted criterion
    discounted_tol: float = 1e-9
    discounted_max_iterations: int = 1_000_000
    policy_iteration_cap: int = 1_000

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any], base: "NumericSettings" = None) -> "NumericSettings":
        """
        Build settings from a flat mapping; keys that are not settings are ignored.

        Args:
            mapping: flat key-value document (usually the JSON run config)
            base: settings to start from (defaults when None)

        Returns:
            NumericSettings with the overrides applied
        """
        base = base or DEFAULTS
        overrides: Dict[str, Any] = {}
        for f in fields(cls):
            if f.name not in mapping or mapping[f.name] is None:
                continue
            raw = mapping[f.name]
            kind = type(getattr(base, f.name))
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ValidationError(f.name, f"expected a number, got {raw!r}")
            if kind is int and float(raw) != int(raw):
                raise ValidationError(f.name, f"expected an integer, got {raw!r}")
            if raw <= 0:
                raise ValidationError(f.name, "must be positive")
            overrides[f.name] = kind(raw)
        return replace(base, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULTS = NumericSettings()
