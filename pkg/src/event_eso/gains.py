"""Design-time quantities for the linear and homogeneous observers.

Everything here is a pure function of its inputs. The two design records,
:class:`LinearDesign` and :class:`NonlinearDesign`, compute their derived
fields (Lyapunov matrix, dwell time, trigger threshold, weights) once at
construction and are immutable afterwards.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InfeasibleDesign, InvalidArgument

TOL_HURWITZ = 1e-9
TOL_LYAPUNOV = 1e-10
DEFAULT_ZETA = 0.9


class BelowRStarWarning(UserWarning):
    """Tuning gain is below the sufficient threshold of the linear guarantee."""


def build_companion(a) -> np.ndarray:
    """Companion matrix with ``-a`` in the first column and ones on the superdiagonal.

    >>> build_companion([2, 1])
    array([[-2.,  1.],
           [-1.,  0.]])
    """
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise InvalidArgument("gain vector must be non-empty")
    m = a.size
    G = np.zeros((m, m))
    G[:, 0] = -a
    G[np.arange(m - 1), np.arange(1, m)] = 1.0
    return G


def _square(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgument(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidArgument(f"{name} has non-finite entries")
    return M


def is_hurwitz(G, tol=TOL_HURWITZ) -> bool:
    """True iff every eigenvalue of ``G`` has real part below ``-tol``."""
    G = _square(G)
    return bool(np.all(np.linalg.eigvals(G).real < -tol))


def solve_lyapunov(G) -> np.ndarray:
    """Solve ``Q G + G^T Q = -I`` for symmetric positive-definite ``Q``.

    Uses the Kronecker-vectorised form. Row-major ``vec`` gives
    ``vec(Q G) = (I kron G^T) vec(Q)`` and ``vec(G^T Q) = (G^T kron I) vec(Q)``.
    """
    G = _square(G)
    if not is_hurwitz(G):
        raise InfeasibleDesign("companion matrix not Hurwitz")
    m = G.shape[0]
    eye = np.eye(m)
    K = np.kron(eye, G.T) + np.kron(G.T, eye)
    Q = np.linalg.solve(K, -eye.ravel()).reshape(m, m)
    Q = 0.5 * (Q + Q.T)
    resid = lyapunov_residual(Q, G)
    if resid > TOL_LYAPUNOV * max(1.0, np.abs(Q).max()):
        raise InfeasibleDesign(f"Lyapunov residual {resid:.3e} too large")
    return Q


def lyapunov_residual(Q, G) -> float:
    """Infinity norm of ``Q G + G^T Q + I``."""
    Q = np.asarray(Q, dtype=float)
    G = np.asarray(G, dtype=float)
    R = Q @ G + G.T @ Q + np.eye(G.shape[0])
    return float(np.abs(R).sum(axis=1).max())


def linear_r_star(Q, zeta=DEFAULT_ZETA) -> float:
    """Smallest tuning gain covered by the linear convergence guarantee."""
    if not 0.0 < zeta < 1.0:
        raise InvalidArgument(f"zeta must lie in (0, 1), got {zeta}")
    lam_max = np.linalg.eigvalsh(np.asarray(Q, dtype=float)).max()
    return max(1.0, lam_max**2 / zeta)


def nu_interval(n: int, p: float) -> tuple[float, float]:
    """Open interval of admissible homogeneity powers for plant order ``n``."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if not p > 2.0:
        raise InvalidArgument(f"moment order p must exceed 2, got {p}")
    lo = max(1.0 - (p - 2.0) / ((p - 2.0) * n + p + 1.0), 1.0 - 1.0 / (2 * n - 1))
    return lo, 1.0


def mu_interval(n: int, nu: float) -> tuple[float, float]:
    """Open interval for the analysis exponent used in the homogeneous rates."""
    lo = max(1.0, 2.0 * (n * nu - (n - 1)))
    hi = (2 * n - 1) * nu - 2 * n + 3
    if not lo < hi:
        raise InfeasibleDesign(f"mu interval ({lo}, {hi}) is empty for n={n}, nu={nu}")
    return lo, hi


def homogeneity_weights(n: int, nu: float) -> np.ndarray:
    """Weights ``(l-1) nu - (l-2)`` for ``l = 1..n+1``."""
    l = np.arange(1, n + 2)
    return (l - 1) * nu - (l - 2)


def signed_power(x, s):
    """``sign(x) |x|**s``; zero maps to zero.

    .. doctest::

        >>> signed_power(-8.0, 1 / 3)
        -2.0
    """
    if not s > 0:
        raise InvalidArgument(f"exponent must be positive, got {s}")
    if np.ndim(x) == 0:
        x = float(x)
        if x == 0.0:
            return 0.0
        return float(np.copysign(np.exp(s * np.log(abs(x))), x))
    x = np.asarray(x, dtype=float)
    mag = np.abs(x)
    out = np.zeros_like(x)
    nz = mag > 0
    out[nz] = np.copysign(np.exp(s * np.log(mag[nz])), x[nz])
    return out


@dataclass(frozen=True)
class CompanionGains:
    """Observer coefficients ``a_1..a_{n+1}`` for a plant of order ``n``."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in np.asarray(self.a, dtype=float).ravel())
        if len(a) < 2:
            raise InvalidArgument("need n+1 >= 2 coefficients")
        object.__setattr__(self, "a", a)
        if not is_hurwitz(self.G):
            raise InfeasibleDesign("companion matrix not Hurwitz")

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def G(self) -> np.ndarray:
        return build_companion(self.a)


def _as_gains(gains) -> CompanionGains:
    return gains if isinstance(gains, CompanionGains) else CompanionGains(tuple(gains))


@dataclass(frozen=True)
class LinearDesign:
    """Linear observer with its event trigger.

    ``r < r_star`` is accepted (the guarantee is sufficient, not necessary)
    and flagged through :attr:`meets_r_star`; pass ``strict=True`` to reject it.
    """

    gains: CompanionGains
    r: float
    zeta: float = DEFAULT_ZETA
    theta: float = 1.0
    epsilon: float = 1.0
    strict: bool = False
    Q: np.ndarray = field(init=False, repr=False, compare=False)
    r_star: float = field(init=False)
    tau: float = field(init=False)
    threshold: float = field(init=False)

    def __post_init__(self):
        gains = _as_gains(self.gains)
        object.__setattr__(self, "gains", gains)
        if not self.r >= 1.0:
            raise InvalidArgument(f"tuning gain r must be >= 1, got {self.r}")
        if not (self.theta > 0 and self.epsilon > 0):
            raise InvalidArgument("theta and epsilon must be positive")
        Q = solve_lyapunov(gains.G)
        Q.setflags(write=False)
        r_star = linear_r_star(Q, self.zeta)
        if self.r < r_star:
            msg = f"r={self.r} is below r*={r_star:.6g}; convergence guarantee does not apply"
            if self.strict:
                raise InfeasibleDesign(msg)
            warnings.warn(msg, BelowRStarWarning, stacklevel=3)
        scale = self.r ** -(self.n + 0.5)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "r_star", r_star)
        object.__setattr__(self, "tau", self.epsilon * scale)
        object.__setattr__(self, "threshold", self.theta * scale)

    kind = "linear"

    @property
    def n(self) -> int:
        return self.gains.n

    @property
    def a(self) -> tuple:
        return self.gains.a

    @property
    def dwell(self) -> float:
        return self.tau

    @property
    def meets_r_star(self) -> bool:
        return self.r >= self.r_star

    def with_r(self, r) -> "LinearDesign":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BelowRStarWarning)
            return replace(self, r=float(r))

    def predicted_mse_exponents(self) -> np.ndarray:
        """Decay exponents ``2n+3-2i`` of the mean-square error bound, per state."""
        i = np.arange(1, self.n + 2)
        return (2 * self.n + 3 - 2 * i).astype(float)

    def predicted_pathwise_exponents(self) -> np.ndarray:
        i = np.arange(1, self.n + 2)
        return self.n + 1.5 - i


@dataclass(frozen=True)
class NonlinearDesign:
    """Homogeneous observer with its event trigger.

    ``mu`` never enters the dynamics; it only sets the reported rate
    exponents. It defaults to the midpoint of :func:`mu_interval`.
    """

    gains: CompanionGains
    r: float
    nu: float
    p: float = 3.0
    mu: float | None = None
    theta_star: float = 1.0
    epsilon_star: float = 1.0
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    tau_star: float = field(init=False)
    threshold_star: float = field(init=False)

    def __post_init__(self):
        gains = _as_gains(self.gains)
        object.__setattr__(self, "gains", gains)
        n = gains.n
        if not self.r >= 1.0:
            raise InvalidArgument(f"tuning gain r must be >= 1, got {self.r}")
        if not (self.theta_star > 0 and self.epsilon_star > 0):
            raise InvalidArgument("theta_star and epsilon_star must be positive")
        lo, hi = nu_interval(n, self.p)
        if not lo < self.nu < hi:
            raise InfeasibleDesign(f"nu={self.nu} outside nu interval ({lo}, {hi}) for n={n}, p={self.p}")
        mlo, mhi = mu_interval(n, self.nu)
        mu = 0.5 * (mlo + mhi) if self.mu is None else float(self.mu)
        if not mlo < mu < mhi:
            raise InfeasibleDesign(f"mu={mu} outside mu interval ({mlo}, {mhi})")
        w = homogeneity_weights(n, self.nu)
        if not np.all(w > 0):
            raise InfeasibleDesign("homogeneity weights must be positive")
        w.setflags(write=False)
        scale = self.r ** -self.trigger_exponent_of(n, self.nu)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "tau_star", self.epsilon_star * scale)
        object.__setattr__(self, "threshold_star", self.theta_star * scale)

    kind = "nonlinear"

    @staticmethod
    def trigger_exponent_of(n, nu):
        return n + 1.0 / (n * nu - (n - 1))

    @property
    def n(self) -> int:
        return self.gains.n

    @property
    def a(self) -> tuple:
        return self.gains.a

    @property
    def dwell(self) -> float:
        return self.tau_star

    @property
    def threshold(self) -> float:
        return self.threshold_star

    def with_r(self, r) -> "NonlinearDesign":
        return replace(self, r=float(r))

    def predicted_pathwise_exponents(self) -> np.ndarray:
        """Exponents ``n+1 + w_i/(mu-1+nu) - i`` of the almost-sure error bound."""
        i = np.arange(1, self.n + 2)
        return self.n + 1 + self.weights / (self.mu - 1 + self.nu) - i

    def predicted_mse_exponents(self) -> np.ndarray:
        # squared pathwise bound
        return 2.0 * self.predicted_pathwise_exponents()


def dwell_and_threshold(design) -> tuple[float, float]:
    if isinstance(design, LinearDesign):
        return design.tau, design.threshold
    if isinstance(design, NonlinearDesign):
        return design.tau_star, design.threshold_star
    raise InvalidArgument(f"not a design: {type(design).__name__}")


def homogeneous_field(a, nu, theta) -> np.ndarray:
    """Evaluate the finite-time stable vector field at ``theta`` (shape ``(..., n+1)``)."""
    a = np.asarray(a, dtype=float)
    n = a.size - 1
    theta = np.asarray(theta, dtype=float)
    lead = theta[..., 0]
    out = np.empty_like(theta)
    for l in range(1, n + 2):
        term = -a[l - 1] * signed_power(lead, l * nu - (l - 1))
        out[..., l - 1] = term + theta[..., l] if l <= n else term
    return out


def homogeneity_residual(gains, nu, samples=1000, lambda_range=(0.1, 10.0), rng_seed=0) -> float:
    """Largest relative violation of the weighted homogeneity identity.

    Draws ``samples`` random points and scalings and compares
    ``Phi_l(lambda^w . theta)`` with ``lambda^(nu-1+w_l) Phi_l(theta)``.
    """
    gains = _as_gains(gains)
    n = gains.n
    if not 1.0 - 1.0 / n < nu < 1.0:
        raise InvalidArgument(f"nu={nu} outside (1-1/n, 1) for n={n}")
    if not (n + 1) * nu - n > 0:
        raise InvalidArgument(f"nu={nu} gives a non-positive top exponent for n={n}")
    lo, hi = lambda_range
    if not 0 < lo <= hi:
        raise InvalidArgument("lambda_range must be positive and ordered")
    rng = np.random.default_rng(rng_seed)
    w = homogeneity_weights(n, nu)
    pts = rng.uniform(-10.0, 10.0, size=(samples, n + 1))
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(samples, 1)))
    lhs = homogeneous_field(gains.a, nu, lam**w * pts)
    rhs = lam ** (nu - 1 + w) * homogeneous_field(gains.a, nu, pts)
    return float((np.abs(lhs - rhs) / (np.abs(rhs) + 1e-300)).max())
