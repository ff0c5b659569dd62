"""Rate and cost parameters of the controlled M/M/inf instance."""

import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping

from utils.error_utils import ValidationError

# flat config keys in field order; "lambda" is a keyword so the attribute is ``lam``
PARAM_KEYS = ("lambda", "mu", "h", "c", "s0", "s1")


@dataclass(frozen=True)
class ModelParams:
    """
    One problem instance.

    Attributes:
        lam: arrival rate
        mu: per-server service rate
        h: holding cost rate per customer
        c: running cost rate, already net of the idling cost
        s0: switch-off cost
        s1: switch-on cost
    """

    lam: float
    mu: float
    h: float
    c: float
    s0: float
    s1: float

    @property
    def rho(self) -> float:
        return self.lam / self.mu

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ModelParams":
        """
        Build validated parameters from a flat key-value document.

        Raises:
            ValidationError: missing key, non-numeric value or a violated sign condition
        """
        values = []
        for key in PARAM_KEYS:
            raw = mapping.get(key)
            if raw is None:
                raise ValidationError(key, "required parameter is missing")
            try:
                values.append(float(raw))
            except (TypeError, ValueError):
                raise ValidationError(key, f"not a number: {raw!r}") from None
        return validate_params(cls(*values))

    def to_dict(self) -> Dict[str, float]:
        return {"lambda": self.lam, "mu": self.mu, "h": self.h, "c": self.c, "s0": self.s0, "s1": self.s1}

    def replace(self, **changes: float) -> "ModelParams":
        """Copy with some fields changed, accepting flat config keys ("lambda") or attribute names."""
        data = {("lam" if k == "lambda" else k): v for k, v in changes.items()}
        current = {"lam": self.lam, "mu": self.mu, "h": self.h, "c": self.c, "s0": self.s0, "s1": self.s1}
        unknown = set(data) - set(current)
        if unknown:
            raise ValidationError(sorted(unknown)[0], "not a model parameter")
        current.update(data)
        return validate_params(ModelParams(**current))


def validate_params(p: ModelParams) -> ModelParams:
    """
    Check the sign conditions of the model.

    Args:
        p: parameters to check

    Returns:
        p unchanged

    Raises:
        ValidationError: naming the first field that violates its condition
    """
    for key, value in zip(PARAM_KEYS, (p.lam, p.mu, p.h, p.c, p.s0, p.s1)):
        if not math.isfinite(value):
            raise ValidationError(key, f"must be finite, got {value}")
    for key, value in (("lambda", p.lam), ("mu", p.mu), ("h", p.h), ("c", p.c)):
        if value <= 0:
            raise ValidationError(key, f"must be > 0, got {value}")
    for key, value in (("s0", p.s0), ("s1", p.s1)):
        if value < 0:
            raise ValidationError(key, f"must be >= 0, got {value}")
    if p.s0 + p.s1 <= 0:
        raise ValidationError("s0", "s0 + s1 must be > 0")
    return p


# Reference instance: lambda=2, mu=1, h=1, c=100, s0=s1=100
REFERENCE_INSTANCE = ModelParams(lam=2.0, mu=1.0, h=1.0, c=100.0, s0=100.0, s1=100.0)
