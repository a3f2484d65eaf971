"""Linear and homogeneous extended state observers and their event triggers."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NumericOverflow
from .gains import LinearDesign, NonlinearDesign, signed_power

__all__ = [
    "signed_power",
    "eso_derivative",
    "linear_eso_derivative",
    "nonlinear_eso_derivative",
    "EtmState",
    "etm_poll",
]


def linear_eso_derivative(a, r, xhat, held_output, u=0.0):
    a = np.asarray(a, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    e = held_output - xhat[0]
    gain = a * float(r) ** np.arange(1, a.size + 1)
    d = gain * e
    d[:-1] += xhat[1:]
    d[-2] += u
    return d


def nonlinear_eso_derivative(a, r, nu, xhat, held_output, u=0.0):
    """Right-hand side of the homogeneous observer.

    Component ``i`` uses the signed power ``i nu - (i-1)`` of ``r^n e`` with
    prefactor ``a_i / r^(n-i)``; the last component carries ``a_{n+1} r``.
    """
    a = np.asarray(a, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    n = a.size - 1
    r = float(r)
    s = r**n * (held_output - xhat[0])
    d = np.empty(n + 1)
    for i in range(1, n + 2):
        d[i - 1] = a[i - 1] * r ** (i - n) * signed_power(s, i * nu - (i - 1))
    d[:-1] += xhat[1:]
    d[-2] += u
    return d


def eso_derivative(design, xhat, held_output, u=0.0, t=None):
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape != (design.n + 1,):
        raise InvalidArgument(f"observer state has shape {xhat.shape}, expected ({design.n + 1},)")
    e = held_output - xhat[0]
    if not np.isfinite(e):
        raise NumericOverflow("non-finite output error", time=t)
    if isinstance(design, LinearDesign):
        return linear_eso_derivative(design.a, design.r, xhat, held_output, u)
    if isinstance(design, NonlinearDesign):
        return nonlinear_eso_derivative(design.a, design.r, design.nu, xhat, held_output, u)
    raise InvalidArgument(f"not a design: {type(design).__name__}")


@dataclass
class EtmState:
    """Dwell-gated deviation trigger with zero-order hold of the output.

    ``trigger_log`` holds ``(time, held value)`` pairs, starting with the
    trigger at ``t = 0``.
    """

    dwell: float
    threshold: float
    last_trigger_time: float = 0.0
    held_output: float = 0.0
    trigger_count: int = 1
    trigger_log: list = field(default_factory=list)

    @classmethod
    def start(cls, y0, dwell, threshold, t0=0.0):
        if not (dwell > 0 and threshold > 0):
            raise InvalidArgument("dwell and threshold must be positive")
        return cls(dwell, threshold, t0, float(y0), 1, [(t0, float(y0))])

    @classmethod
    def for_design(cls, design, y0, t0=0.0):
        return cls.start(y0, design.dwell, design.threshold, t0)

    def poll(self, t, y) -> bool:
        """Check the trigger at time ``t``; updates in place and returns whether it fired."""
        elapsed = t - self.last_trigger_time
        if elapsed < 0:
            raise InvalidArgument(f"poll time {t} precedes last trigger {self.last_trigger_time}")
        if elapsed < self.dwell:
            return False
        if abs(y - self.held_output) >= self.threshold:
            self.last_trigger_time = t
            self.held_output = float(y)
            self.trigger_count += 1
            self.trigger_log.append((t, float(y)))
            return True
        return False

    def inter_event_times(self) -> np.ndarray:
        times = np.array([tk for tk, _ in self.trigger_log])
        return times[1:] - times[:-1]


def etm_poll(etm: EtmState, t, y):
    """Functional form of :meth:`EtmState.poll`; the input state is left untouched."""
    new = copy.deepcopy(etm)
    fired = new.poll(t, y)
    return fired, (new if fired else etm)
