"""Carrier-side dual-ascent solver.

One routine serves both protocol phases. Price discovery runs it with zero
offsets over the carrier's coverage set; the allocation phase runs it with
each user's accumulated lower-priced rates as offsets. Per iteration the
carrier posts a price proportional to the sum of user bids, every user
answers with its net-benefit-maximizing rate, and the resulting bid swing
is clamped by an exponentially decaying step, which forces the loop to
settle. The final shadow price is recomputed from the settled bids, so the
extracted rates fill the capacity exactly.

The literal pseudocode initializes all bids to zero, which would make the
first posted price zero and the first inner solve unbounded; bids are
instead seeded with an equal capacity share priced at 1, which converges to
the same fixed point for these concave objectives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from ._backend import kernels
from .model import SolverParams
from .utility import Logarithmic, UtilityFunction, unpack

Entry = tuple[int, UtilityFunction, float]


@dataclass(frozen=True)
class TraceStep:
    """One dual-ascent iteration: posted price, post-clamp bids and rates."""

    iteration: int
    price: float
    bids: tuple[float, ...]
    rates: tuple[float, ...]


@dataclass(frozen=True)
class ConvergenceTrace:
    user_ids: tuple[int, ...]
    steps: tuple[TraceStep, ...]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class DualAscentResult:
    shadow_price: float
    rates: dict[int, float]
    trace: ConvergenceTrace
    iterations: int
    converged: bool


def fluctuation_clamp(w_new: float, w_prev: float, n: int, l1: float, l2: float) -> float:
    """Limit the bid update at iteration n to a step of l1 * e^(-n/l2)."""
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"iteration index must be an integer >= 1, got {n!r}")
    if not (l1 > 0 and l2 > 0):
        raise ValueError(f"decay parameters must be > 0, got l1={l1!r}, l2={l2!r}")
    return kernels.fluctuation_clamp(w_new, w_prev, n, l1, l2)


def rate_cap_for(
    entries: Sequence[Entry], capacity: float, params: SolverParams
) -> float:
    """Bisection cap: explicit override, or 2 * max(capacity, largest r_max).

    The headroom factor matters: capping demand exactly at the capacity
    would let a single user's solve sit at the cap with a constant bid,
    freezing the price below its true value. With strict headroom the cap
    can never bind at the optimum (where rates sum to the capacity), while
    under-priced iterations are free to over-demand and push the price up.
    """
    if params.rate_cap is not None:
        return float(params.rate_cap)
    cap = capacity
    for _, u, _ in entries:
        if isinstance(u, Logarithmic) and u.r_max > cap:
            cap = u.r_max
    return 2.0 * cap


def dual_ascent(
    entries: Sequence[Entry],
    capacity: float,
    params: Union[SolverParams, None] = None,
) -> DualAscentResult:
    """Shadow price and per-user rates for one carrier's capacity.

    entries: (user id, utility, offset) per covered user, where the offset
    is the rate the user already holds from cheaper carriers (zero during
    price discovery). Non-convergence within the iteration cap is reported
    through the ``converged`` flag, not an exception.
    """
    if params is None:
        params = SolverParams()
    if not entries:
        raise ValueError("entries must not be empty")
    if not (math.isfinite(capacity) and capacity > 0):
        raise ValueError(f"capacity must be > 0, got {capacity!r}")
    user_ids = [uid for uid, _, _ in entries]
    if len(set(user_ids)) != len(user_ids):
        raise ValueError(f"duplicate user ids in entries: {user_ids}")

    families = []
    q1s = []
    q2s = []
    offsets = []
    for uid, u, c in entries:
        fam, q1, q2 = unpack(u)
        if not (math.isfinite(c) and c >= 0):
            raise ValueError(f"user {uid}: offset must be >= 0, got {c!r}")
        families.append(fam)
        q1s.append(q1)
        q2s.append(q2)
        offsets.append(float(c))

    converged, iterations, price, rates, tr_p, tr_w, tr_r = kernels.dual_ascent(
        families,
        q1s,
        q2s,
        offsets,
        float(capacity),
        rate_cap_for(entries, float(capacity), params),
        params.delta,
        params.l1,
        params.l2,
        params.max_outer_iters,
        params.eps_r,
        params.tol_r,
        params.bisect_max_iters,
    )

    steps = tuple(
        TraceStep(iteration=n, price=p, bids=w, rates=r)
        for n, (p, w, r) in enumerate(zip(tr_p, tr_w, tr_r), start=1)
    )
    return DualAscentResult(
        shadow_price=price,
        rates=dict(zip(user_ids, rates)),
        trace=ConvergenceTrace(user_ids=tuple(user_ids), steps=steps),
        iterations=iterations,
        converged=converged,
    )


def offered_price(
    users: Sequence[tuple[int, UtilityFunction]],
    capacity: float,
    params: Union[SolverParams, None] = None,
) -> DualAscentResult:
    """Price-discovery solve: the dual ascent with every offset at zero.

    The resulting shadow price is what the carrier advertises to the users
    in its coverage area; callers must check the ``converged`` flag.
    """
    entries = [(uid, u, 0.0) for uid, u in users]
    return dual_ascent(entries, capacity, params)
