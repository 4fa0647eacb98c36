from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInputError


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LayerState:
    """Standing layer u and rolling layer v at time t, one value per node."""

    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        u, v = _frozen(self.u), _frozen(self.v)
        if u.shape != v.shape:
            raise InvalidInputError(f"u and v shapes differ: {u.shape} vs {v.shape}")
        if not np.all(np.isfinite(u)) or not np.all(np.isfinite(v)):
            raise InvalidInputError("layer state holds non-finite values")
        if np.any(v < 0):
            raise InvalidInputError(f"rolling layer is negative (min {v.min():.3e})")
        if self.t < 0:
            raise InvalidInputError(f"time must be >= 0, got {self.t!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def empty(cls, shape, u0=None) -> "LayerState":
        u = np.zeros(shape) if u0 is None else np.broadcast_to(np.asarray(u0, dtype=float), shape)
        return cls(u, np.zeros(shape), 0.0)


@dataclass(frozen=True)
class SimilarityPair:
    """Profiles (U, V) growing as u = U + ct, v = V, with min U = 0."""

    U: np.ndarray
    V: np.ndarray
    c: float

    def __post_init__(self):
        U, V = _frozen(self.U), _frozen(self.V)
        if U.shape != V.shape:
            raise InvalidInputError(f"U and V shapes differ: {U.shape} vs {V.shape}")
        if U.size and U.min() != 0.0:
            raise InvalidInputError(f"U must be normalized to min 0, got min {U.min():.3e}")
        if self.c < 0:
            raise InvalidInputError(f"growth velocity must be >= 0, got {self.c!r}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @classmethod
    def normalized(cls, U, V, c: float) -> "SimilarityPair":
        U = np.asarray(U, dtype=float)
        return cls(U - U.min(), V, float(c))
