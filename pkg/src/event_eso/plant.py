"""Integrator-chain plant with a lumped stochastic total disturbance."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument
from .noise import BoundedFamily, NoiseConfig

SANITY_BOUND = 1e6


class DisturbanceKind(enum.Enum):
    SECTION_IV = "section_iv"
    CONSTANT = "constant"
    ZERO = "zero"
    CUSTOM = "custom"


class InputKind(enum.Enum):
    COS = "cos"
    ZERO = "zero"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DisturbanceSpec:
    """Total disturbance ``f(t, x, v1, v2)``.

    For ``SECTION_IV`` the vector ``b`` holds ``b1..b9``::

        f = -b1 x1 - b2 x2 + b3 sin(b4 x1 + b5 x2) + v1 + b9 v2

    ``v1`` arrives already scaled: ``b6`` is its amplitude in the noise
    config, and ``b7``, ``b8`` its time and Brownian coefficients (see
    :func:`section_iv_noise`).
    """

    kind: DisturbanceKind = DisturbanceKind.ZERO
    b: tuple = ()
    c: float = 0.0
    hook: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        kind = DisturbanceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if kind is DisturbanceKind.SECTION_IV:
            if len(self.b) != 9:
                raise InvalidArgument(f"section_iv disturbance needs 9 coefficients, got {len(self.b)}")
            if not (self.b[0] > 0 and self.b[1] > 0):
                raise InvalidArgument("section_iv disturbance requires b1 > 0 and b2 > 0")
        if kind is DisturbanceKind.CUSTOM and self.hook is None:
            raise InvalidArgument("custom disturbance needs a hook")

    @classmethod
    def section_iv(cls, b) -> "DisturbanceSpec":
        return cls(DisturbanceKind.SECTION_IV, b=tuple(b))

    @classmethod
    def constant(cls, c) -> "DisturbanceSpec":
        return cls(DisturbanceKind.CONSTANT, c=float(c))

    @classmethod
    def zero(cls) -> "DisturbanceSpec":
        return cls(DisturbanceKind.ZERO)

    @classmethod
    def custom(cls, hook) -> "DisturbanceSpec":
        return cls(DisturbanceKind.CUSTOM, hook=hook)


@dataclass(frozen=True)
class PlantConfig:
    n: int
    x_init: tuple
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec.zero)
    input_kind: InputKind = InputKind.ZERO
    b10: float = 0.0
    input_hook: Optional[Callable[[float], float]] = field(default=None, compare=False)
    sanity_bound: float = SANITY_BOUND

    def __post_init__(self):
        object.__setattr__(self, "input_kind", InputKind(self.input_kind))
        x0 = tuple(float(v) for v in self.x_init)
        object.__setattr__(self, "x_init", x0)
        if self.n < 1:
            raise InvalidArgument(f"plant order must be >= 1, got {self.n}")
        if len(x0) != self.n:
            raise InvalidArgument(f"x_init has length {len(x0)}, expected {self.n}")
        if self.disturbance.kind is DisturbanceKind.SECTION_IV and self.n != 2:
            raise InvalidArgument("section_iv disturbance is defined for n = 2")
        if self.input_kind is InputKind.CUSTOM and self.input_hook is None:
            raise InvalidArgument("custom input needs a hook")

    @property
    def uses_hooks(self) -> bool:
        return self.disturbance.kind is DisturbanceKind.CUSTOM or self.input_kind is InputKind.CUSTOM


def _check_dim(x, n=None):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or (n is not None and x.size != n):
        raise InvalidArgument(f"state has shape {x.shape}, expected ({n},)")
    return x


def disturbance_eval(spec: DisturbanceSpec, t, x, v1, v2, n=None) -> float:
    x = _check_dim(x, n)
    kind = spec.kind
    if kind is DisturbanceKind.ZERO:
        return 0.0
    if kind is DisturbanceKind.CONSTANT:
        return spec.c
    if kind is DisturbanceKind.CUSTOM:
        return float(spec.hook(t, x, v1, v2))
    if x.size != 2:
        raise InvalidArgument("section_iv disturbance expects a 2-dimensional state")
    b = spec.b
    x1, x2 = x
    return -b[0] * x1 - b[1] * x2 + b[2] * math.sin(b[3] * x1 + b[4] * x2) + v1 + b[8] * v2


def input_eval(config: PlantConfig, t) -> float:
    kind = config.input_kind
    if kind is InputKind.ZERO:
        return 0.0
    if kind is InputKind.COS:
        return math.cos(config.b10 * t)
    return float(config.input_hook(t))


def extended_state(config: PlantConfig, t, x, v1, v2) -> float:
    """Ground truth for the observer's last component."""
    return disturbance_eval(config.disturbance, t, x, v1, v2, config.n)


def plant_derivative(config: PlantConfig, t, x, v1, v2) -> np.ndarray:
    x = _check_dim(x, config.n)
    dx = np.empty(config.n)
    dx[:-1] = x[1:]
    dx[-1] = extended_state(config, t, x, v1, v2) + input_eval(config, t)
    return dx


def output(x) -> float:
    return float(np.asarray(x)[0])


SECTION_IV_B = (2.0, 2.0, 1.5, 1.5, 1.5, 1.5, 2.5, 2.5, 2.5, 2.5)


def section_iv_plant(b=SECTION_IV_B, x_init=(1.0, -1.0)) -> PlantConfig:
    """Second-order example plant; ``b`` holds ``b1..b10``."""
    b = tuple(float(v) for v in b)
    if len(b) != 10:
        raise InvalidArgument("expected 10 coefficients b1..b10")
    return PlantConfig(
        n=2,
        x_init=x_init,
        disturbance=DisturbanceSpec.section_iv(b[:9]),
        input_kind=InputKind.COS,
        b10=b[9],
    )


def section_iv_noise(b=SECTION_IV_B, alpha1=2.0, alpha2=2.0, v2_init=0.0) -> NoiseConfig:
    """Noise config whose bounded term is ``b6 cos(b7 t + b8 B1)``."""
    return NoiseConfig(
        bounded_family=BoundedFamily.COS_AFFINE,
        amplitude=float(b[5]),
        t_coeff=float(b[6]),
        b_coeff=float(b[7]),
        alpha1=alpha1,
        alpha2=alpha2,
        v2_init=v2_init,
    )
