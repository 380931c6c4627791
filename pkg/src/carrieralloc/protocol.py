"""Two-phase orchestration of the multi-carrier allocation protocol.

Phase 1: every carrier solves price discovery over its coverage set (zero
offsets) and advertises the resulting shadow price. Phase 2: every user
orders its in-range carriers by advertised price and flags them one at a
time; a carrier runs its allocation solve only in the round where all of
its covered users flag it, distributing rates that become offsets for the
users' next carriers. With one consistent price table the cheapest carrier
always goes first and each carrier activates exactly once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from . import ue
from .enodeb import ConvergenceTrace, DualAscentResult, dual_ascent, offered_price
from .errors import ConvergenceError, DeadlockError, ProtocolError
from .model import Scenario, SolverParams, with_capacity

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AllocationReport:
    """Everything the protocol produced, keyed by carrier and user ids.

    ``rates`` and ``offsets`` map carrier id -> (user id -> value) over
    covered pairs only; ``rate()`` fills in the zeros for uncovered pairs.
    """

    offered_prices: dict[int, float]
    allocation_prices: dict[int, float]
    rates: dict[int, dict[int, float]]
    offsets: dict[int, dict[int, float]]
    aggregates: dict[int, float]
    offered_traces: dict[int, ConvergenceTrace]
    allocation_traces: dict[int, ConvergenceTrace]
    processing_order: tuple[int, ...]

    def rate(self, carrier_id: int, user_id: int) -> float:
        return self.rates.get(carrier_id, {}).get(user_id, 0.0)

    def total_allocated(self) -> float:
        return sum(self.aggregates.values())


def _discover_prices(
    scenario: Scenario, params: SolverParams
) -> dict[int, DualAscentResult]:
    results = {}
    for carrier in scenario.carriers:
        users = [
            (uid, scenario.user(uid).utility)
            for uid in scenario.covered_users(carrier.id)
        ]
        res = offered_price(users, carrier.capacity, params)
        if not res.converged:
            raise ConvergenceError(carrier.id, "price discovery", res.iterations)
        log.debug(
            "carrier %d: offered price %.6g after %d iterations",
            carrier.id, res.shadow_price, res.iterations,
        )
        results[carrier.id] = res
    return results


def _allocate(
    scenario: Scenario,
    offered: Mapping[int, float],
    orders: Mapping[int, tuple[int, ...]],
    params: SolverParams,
) -> tuple[dict[int, DualAscentResult], dict[int, dict[int, float]], dict[int, ue.UeState], tuple[int, ...]]:
    """Flag-driven allocation rounds over precomputed carrier orders.

    Split from ``run`` so the deadlock guard can be exercised directly with
    inconsistent orders, which consistent price tables never produce.
    """
    states = {
        uid: ue.UeState(user_id=uid, carrier_order=orders[uid])
        for uid in scenario.user_ids()
    }
    pending = set(scenario.carrier_ids())
    results: dict[int, DualAscentResult] = {}
    offsets_used: dict[int, dict[int, float]] = {}
    processing_order: list[int] = []

    max_rounds = len(scenario.carriers) + 1
    rounds = 0
    while any(not st.done for st in states.values()):
        rounds += 1
        flags = {
            st.user_id: ue.next_flag(st) for st in states.values() if not st.done
        }
        if rounds > max_rounds:
            raise DeadlockError(flags)
        ready = [
            cid
            for cid in pending
            if all(flags.get(uid) == cid for uid in scenario.covered_users(cid))
        ]
        if not ready:
            raise DeadlockError(flags)
        # Fully flagged carriers never share users (each user flags one
        # carrier), so same-round activations are independent.
        for cid in sorted(ready, key=lambda c: (offered[c], c)):
            carrier = scenario.carrier(cid)
            entries = [
                (uid, scenario.user(uid).utility, states[uid].pending_offset)
                for uid in scenario.covered_users(cid)
            ]
            res = dual_ascent(entries, carrier.capacity, params)
            if not res.converged:
                raise ConvergenceError(cid, "allocation", res.iterations)
            log.debug(
                "carrier %d: allocated at price %.6g after %d iterations",
                cid, res.shadow_price, res.iterations,
            )
            results[cid] = res
            offsets_used[cid] = {uid: c for uid, _, c in entries}
            processing_order.append(cid)
            pending.discard(cid)
            for uid in scenario.covered_users(cid):
                ue.record_rate(states[uid], cid, res.rates[uid], res.shadow_price)

    return results, offsets_used, states, tuple(processing_order)


def run(scenario: Scenario, params: Union[SolverParams, None] = None) -> AllocationReport:
    """Execute both protocol phases and assemble the full report."""
    if params is None:
        params = SolverParams()

    discovery = _discover_prices(scenario, params)
    offered = {cid: res.shadow_price for cid, res in discovery.items()}
    orders = {
        u.id: ue.order_carriers({cid: offered[cid] for cid in u.coverage})
        for u in scenario.users
    }
    results, offsets_used, states, processing_order = _allocate(
        scenario, offered, orders, params
    )

    return AllocationReport(
        offered_prices=offered,
        allocation_prices={cid: res.shadow_price for cid, res in results.items()},
        rates={cid: dict(res.rates) for cid, res in results.items()},
        offsets=offsets_used,
        aggregates={uid: states[uid].aggregated_rate for uid in scenario.user_ids()},
        offered_traces={cid: res.trace for cid, res in discovery.items()},
        allocation_traces={cid: res.trace for cid, res in results.items()},
        processing_order=processing_order,
    )


def sweep(
    scenario: Scenario,
    carrier_id: int,
    capacities: Iterable[float],
    params: Union[SolverParams, None] = None,
) -> list[tuple[float, AllocationReport]]:
    """Rerun the protocol for each capacity substituted into one carrier."""
    out = []
    for cap in capacities:
        if not cap > 0:
            raise ValueError(f"capacities must be > 0, got {cap!r}")
        try:
            report = run(with_capacity(scenario, carrier_id, cap), params)
        except ProtocolError as e:
            raise ProtocolError(
                f"sweep point capacity {cap} for carrier {carrier_id}: {e}"
            ) from e
        out.append((float(cap), report))
    return out
