"""Brownian drivers, bounded noise and Ornstein-Uhlenbeck colored noise.

Per step two standard normals are consumed, always in the order
``(z1, z2)``: ``z1`` drives ``B1`` and ``z2`` drives both ``B2`` and the
exact OU transition of ``v2``. Paths get independent Philox streams keyed on
``(master_seed, path_index)`` so results do not depend on scheduling.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidArgument


class BoundedFamily(enum.Enum):
    SIN_AFFINE = "sin_affine"
    COS_AFFINE = "cos_affine"
    # amplitude * cos(t_coeff * t), Brownian argument ignored
    DETERMINISTIC_ONLY = "deterministic_only"


@dataclass(frozen=True)
class NoiseConfig:
    """Bounded noise ``v1 = amplitude * trig(t_coeff t + b_coeff B1)`` and OU parameters.

    ``sigma`` optionally replaces the built-in family with a callable
    ``sigma(t, b1) -> float``; such configs run on the reference stepper only.
    """

    bounded_family: BoundedFamily = BoundedFamily.COS_AFFINE
    amplitude: float = 1.5
    t_coeff: float = 2.5
    b_coeff: float = 2.5
    alpha1: float = 2.0
    alpha2: float = 2.0
    v2_init: float = 0.0
    sigma: Optional[Callable[[float, float], float]] = None

    def __post_init__(self):
        object.__setattr__(self, "bounded_family", BoundedFamily(self.bounded_family))
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise InvalidArgument("alpha1 and alpha2 must be positive")
        for name in ("amplitude", "t_coeff", "b_coeff", "v2_init"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")

    @property
    def stationary_variance(self) -> float:
        return self.alpha1 * self.alpha2


@dataclass(frozen=True)
class NoiseState:
    t: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    v2: float = 0.0


def initial_state(config: NoiseConfig) -> NoiseState:
    return NoiseState(0.0, 0.0, 0.0, config.v2_init)


def path_generator(master_seed: int, path_index: int) -> np.random.Generator:
    """Counter-based generator for one Monte Carlo path."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(path_index),))
    return np.random.Generator(np.random.Philox(ss))


def ou_coefficients(h: float, config: NoiseConfig) -> tuple[float, float]:
    """Decay factor and innovation standard deviation of the exact OU step."""
    decay = math.exp(-config.alpha1 * h)
    sd = math.sqrt(config.alpha1 * config.alpha2 * -math.expm1(-2.0 * config.alpha1 * h))
    return decay, sd


def advance_with_draws(state: NoiseState, h: float, config: NoiseConfig, z1: float, z2: float) -> NoiseState:
    """Advance one step given the two standard normal draws."""
    if not h > 0:
        raise InvalidArgument(f"step size must be positive, got {h}")
    decay, sd = ou_coefficients(h, config)
    sq = math.sqrt(h)
    return NoiseState(
        t=state.t + h,
        b1=state.b1 + sq * z1,
        b2=state.b2 + sq * z2,
        v2=decay * state.v2 + sd * z2,
    )


def advance(state: NoiseState, h: float, config: NoiseConfig, rng: np.random.Generator) -> NoiseState:
    if not h > 0:
        raise InvalidArgument(f"step size must be positive, got {h}")
    z1, z2 = rng.standard_normal(2)
    return advance_with_draws(state, h, config, float(z1), float(z2))


def bounded_eval(config: NoiseConfig, t: float, b1: float) -> float:
    if config.sigma is not None:
        return float(config.sigma(t, b1))
    fam = config.bounded_family
    if fam is BoundedFamily.SIN_AFFINE:
        return config.amplitude * math.sin(config.t_coeff * t + config.b_coeff * b1)
    if fam is BoundedFamily.COS_AFFINE:
        return config.amplitude * math.cos(config.t_coeff * t + config.b_coeff * b1)
    return config.amplitude * math.cos(config.t_coeff * t)


def simulate_ou(config: NoiseConfig, h: float, steps: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorised recursion of ``v2`` alone, sharing the per-step draw layout."""
    decay, sd = ou_coefficients(h, config)
    z = rng.standard_normal((steps, 2))[:, 1]
    v, _ = lfilter([sd], [1.0, -decay], z, zi=[decay * config.v2_init])
    return v

