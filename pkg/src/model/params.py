import math
from dataclasses import dataclass

from src.errors import InvalidInputError


@dataclass(frozen=True)
class Parameters:
    """Material constants of the two-layer model.

    alpha is the critical slope, beta the mobility of the rolling layer and
    gamma the collision (exchange) rate.
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")
