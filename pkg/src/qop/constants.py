from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class Constants:
    """Physical constants; the defaults hbar = m = a = 1, alpha = 0 remove units from tests."""

    hbar: float = 1.0
    mass: float = 1.0
    a: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "mass", "a"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be finite and positive, got {v!r}")
        if not math.isfinite(self.alpha):
            raise InputError(f"alpha must be finite, got {self.alpha!r}")


DEFAULT = Constants()
