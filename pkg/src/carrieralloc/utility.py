"""Normalized utility families and their log-marginal transforms.

Two families model user applications: a sigmoidal curve for real-time
traffic (steepness ``a``, inflection at rate ``b``) and a logarithmic curve
for delay-tolerant traffic (slope ``k``, full utilization at ``r_max``).
Both are normalized so U(0) = 0 and the top of the scale is 1 (reached
asymptotically by the sigmoid, at r_max by the log curve).

The allocation solvers never consume U directly. They work with the
log-marginal U'(r)/U(r), which is strictly decreasing on (0, inf), and with
its inverse: for a posted price p, the rate maximizing
``log U(r + c) - p*r`` is found by bisecting the log-marginal. All numeric
work is delegated to the selected kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from ._backend import kernels

# Rate floor: log U diverges at r = 0, so every solver query stays at or
# above this. Well below any rate scale used by the allocation protocol.
EPS_RATE = 1e-9
# Absolute bisection tolerance on rates; far below the protocol's
# convergence threshold so inner-solve error never drives outer behavior.
TOL_RATE = 1e-9
BISECT_MAX_ITERS = 200


@dataclass(frozen=True)
class Sigmoidal:
    """Sigmoid utility c*(1/(1+e^(-a(r-b))) - d), normalized to [0, 1).

    The normalizers c and d are derived from a and b so that U(0) = 0 and
    U -> 1 as r -> inf; for large ``a`` the curve approximates a step at
    rate ``b``, which is the inflection point.
    """

    a: float
    b: float

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a)
                and self.a > 0):
            raise ValueError(f"sigmoidal steepness a must be > 0, got {self.a!r}")
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b)
                and self.b > 0):
            raise ValueError(f"sigmoidal inflection b must be > 0, got {self.b!r}")


@dataclass(frozen=True)
class Logarithmic:
    """Log utility log(1 + k*r) / log(1 + k*r_max), normalized to [0, 1].

    ``k`` sets the curvature; U(r_max) = 1. Beyond r_max, `evaluate` clamps
    at 1 while the marginal keeps following the closed form (still
    positive and decreasing) so solver queries stay monotone.
    """

    k: float
    r_max: float

    def __post_init__(self):
        if not (isinstance(self.k, (int, float)) and math.isfinite(self.k)
                and self.k > 0):
            raise ValueError(f"logarithmic slope k must be > 0, got {self.k!r}")
        if not (isinstance(self.r_max, (int, float))
                and math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"logarithmic r_max must be > 0, got {self.r_max!r}")


UtilityFunction = Union[Sigmoidal, Logarithmic]


def unpack(u: UtilityFunction) -> tuple[int, float, float]:
    """Kernel encoding of a utility: (family code, q1, q2)."""
    if isinstance(u, Sigmoidal):
        return kernels.SIGMOIDAL, u.a, u.b
    if isinstance(u, Logarithmic):
        return kernels.LOGARITHMIC, u.k, u.r_max
    raise TypeError(f"not a utility function: {u!r}")


def evaluate(u: UtilityFunction, r: float) -> float:
    """U(r) in [0, 1] for r >= 0."""
    if r < 0:
        raise ValueError(f"rate must be >= 0, got {r}")
    fam, q1, q2 = unpack(u)
    return kernels.eval_utility(fam, q1, q2, r)


def log_utility(u: UtilityFunction, r: float) -> float:
    """log U(r); -inf at r = 0 (log family unclamped past r_max)."""
    if r < 0:
        raise ValueError(f"rate must be >= 0, got {r}")
    fam, q1, q2 = unpack(u)
    return kernels.log_utility(fam, q1, q2, r)


def log_marginal(u: UtilityFunction, r: float) -> float:
    """U'(r)/U(r) for r > 0; strictly decreasing with limit +inf at 0."""
    if r <= 0:
        raise ValueError(f"log_marginal needs r > 0, got {r}")
    fam, q1, q2 = unpack(u)
    return kernels.log_marginal(fam, q1, q2, r)


def inverse_log_marginal(
    u: UtilityFunction,
    price: float,
    r_cap: float,
    *,
    eps_r: float = EPS_RATE,
    tol_r: float = TOL_RATE,
    max_iters: int = BISECT_MAX_ITERS,
) -> float:
    """Rate in [eps_r, r_cap] where the log-marginal crosses ``price``.

    Falls back to the cap when log_marginal(r_cap) > price (cap binds) and
    to the floor when log_marginal(eps_r) < price.
    """
    if not (math.isfinite(price) and price > 0):
        raise ValueError(f"price must be finite and > 0, got {price!r}")
    if not (math.isfinite(r_cap) and r_cap > 0):
        raise ValueError(f"r_cap must be finite and > 0, got {r_cap!r}")
    fam, q1, q2 = unpack(u)
    return kernels.inverse_log_marginal(
        fam, q1, q2, price, r_cap, eps_r, tol_r, max_iters
    )


def net_benefit_maximizer(
    u: UtilityFunction,
    price: float,
    offset: float,
    r_cap: float,
    *,
    eps_r: float = EPS_RATE,
    tol_r: float = TOL_RATE,
    max_iters: int = BISECT_MAX_ITERS,
) -> float:
    """argmax over r >= 0 of log U(r + offset) - price*r, capped at r_cap.

    The offset shifts the uncapped solution: with x* the inverse
    log-marginal at the price, the result is max(0, x* - offset).
    """
    if not (math.isfinite(price) and price > 0):
        raise ValueError(f"price must be finite and > 0, got {price!r}")
    if not (math.isfinite(offset) and offset >= 0):
        raise ValueError(f"offset must be >= 0, got {offset!r}")
    if not (math.isfinite(r_cap) and r_cap > 0):
        raise ValueError(f"r_cap must be finite and > 0, got {r_cap!r}")
    fam, q1, q2 = unpack(u)
    return kernels.net_benefit(
        fam, q1, q2, price, offset, r_cap, eps_r, tol_r, max_iters
    )
