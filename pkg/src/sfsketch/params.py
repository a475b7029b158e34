"""Shared sketch configuration.

Every sketch in the package is shaped by the same handful of numbers: d
arrays, w buckets per array on the query side, and (for the slim-fat
variants) a fat side that is either z counters per bucket or a flat array of
w_prime buckets. Error-bound targets (epsilon, delta) can stand in for d and
w directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class SketchParams:
    """Dimensions and seed for one sketch.

    ``w_prime`` defaults to ``z * w`` so the flat-fat variants match the
    bucketed ones in total fat counters unless told otherwise.
    """

    d: int
    w: int
    z: int = 1
    w_prime: int | None = None
    master_seed: int = 0
    epsilon: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ConfigurationError(f"d must be >= 1, got {self.d}")
        if self.w < 1:
            raise ConfigurationError(f"w must be >= 1, got {self.w}")
        if self.z < 1:
            raise ConfigurationError(f"z must be >= 1, got {self.z}")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be a 64-bit unsigned value")
        if self.w_prime is None:
            object.__setattr__(self, "w_prime", self.z * self.w)
        if self.w_prime < self.w:
            raise ConfigurationError(
                f"w_prime must be >= w, got w_prime={self.w_prime} w={self.w}"
            )
        if (self.epsilon is None) != (self.delta is None):
            raise ConfigurationError("epsilon and delta must be given together")
        if self.epsilon is not None:
            if not 0.0 < self.epsilon < 1.0 or not 0.0 < self.delta < 1.0:
                raise ConfigurationError("epsilon and delta must lie in (0, 1)")
            want_d = math.ceil(math.log(1.0 / self.delta))
            want_w = math.ceil(math.e / self.epsilon)
            if self.d != want_d or self.w != want_w:
                raise ConfigurationError(
                    f"(epsilon, delta) = ({self.epsilon}, {self.delta}) require "
                    f"d={want_d}, w={want_w}; got d={self.d}, w={self.w}"
                )

    @classmethod
    def from_error_bounds(cls, epsilon, delta, *, z=1, w_prime=None, master_seed=0):
        """Derive (d, w) from an over-estimation bound target.

        d = ceil(ln(1/delta)) arrays and w = ceil(e/epsilon) buckets give
        Pr[estimate >= true + epsilon * alpha * N] <= delta, with alpha the
        measured per-insert update rate (1 for a plain count-min sketch).
        """
        if not 0.0 < epsilon < 1.0 or not 0.0 < delta < 1.0:
            raise ConfigurationError("epsilon and delta must lie in (0, 1)")
        d = math.ceil(math.log(1.0 / delta))
        w = math.ceil(math.e / epsilon)
        return cls(
            d=d, w=w, z=z, w_prime=w_prime, master_seed=master_seed,
            epsilon=epsilon, delta=delta,
        )
