"""Scenario data model, validation, and JSON (de)serialization.

A scenario is a set of carriers (id, capacity) plus a set of users
(id, utility, ordered coverage list of carrier ids). Validation guarantees
the cross-references are consistent: coverage ids exist, every carrier
covers at least one user, and ids are unique. Rates and capacities are
dimensionless rate-units throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

from .errors import ScenarioError
from .utility import (
    BISECT_MAX_ITERS,
    EPS_RATE,
    TOL_RATE,
    Logarithmic,
    Sigmoidal,
    UtilityFunction,
)


@dataclass(frozen=True)
class CarrierSpec:
    id: int
    capacity: float


@dataclass(frozen=True)
class UserSpec:
    id: int
    utility: UtilityFunction
    coverage: tuple[int, ...]


@dataclass(frozen=True)
class Scenario:
    carriers: tuple[CarrierSpec, ...]
    users: tuple[UserSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "carriers", tuple(self.carriers))
        object.__setattr__(self, "users", tuple(self.users))
        _validate_scenario(self)

    def carrier_ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.carriers)

    def user_ids(self) -> tuple[int, ...]:
        return tuple(u.id for u in self.users)

    def carrier(self, carrier_id: int) -> CarrierSpec:
        for c in self.carriers:
            if c.id == carrier_id:
                return c
        raise KeyError(f"no carrier with id {carrier_id}")

    def user(self, user_id: int) -> UserSpec:
        for u in self.users:
            if u.id == user_id:
                return u
        raise KeyError(f"no user with id {user_id}")

    def covered_users(self, carrier_id: int) -> tuple[int, ...]:
        """Ids of the users in the carrier's coverage set, in listing order."""
        return tuple(u.id for u in self.users if carrier_id in u.coverage)


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the dual-ascent solver.

    delta: settle threshold on the max bid change per iteration.
    l1, l2: amplitude and decay length of the per-iteration bid clamp
        l1 * e^(-n/l2).
    rate_cap: upper bound handed to the inner bisection; None picks
        max(capacity, largest r_max among the solve's log utilities).
    """

    delta: float = 1e-3
    l1: float = 5.0
    l2: float = 10.0
    max_outer_iters: int = 10_000
    eps_r: float = EPS_RATE
    tol_r: float = TOL_RATE
    bisect_max_iters: int = BISECT_MAX_ITERS
    rate_cap: Union[float, None] = None

    def __post_init__(self):
        for name in ("delta", "l1", "l2", "eps_r", "tol_r"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive number, got {v!r}")
        for name in ("max_outer_iters", "bisect_max_iters"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
        if not self.delta > self.tol_r:
            raise ValueError(
                f"delta ({self.delta}) must exceed the bisection tolerance "
                f"tol_r ({self.tol_r})"
            )
        if self.rate_cap is not None and not (
            isinstance(self.rate_cap, (int, float))
            and math.isfinite(self.rate_cap)
            and self.rate_cap > 0
        ):
            raise ValueError(f"rate_cap must be None or > 0, got {self.rate_cap!r}")


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _validate_scenario(s: Scenario) -> None:
    if not s.carriers:
        raise ScenarioError("carriers: must not be empty")
    if not s.users:
        raise ScenarioError("users: must not be empty")
    carrier_ids = set()
    for i, c in enumerate(s.carriers):
        if not isinstance(c.id, int) or isinstance(c.id, bool) or c.id < 1:
            raise ScenarioError(f"carriers[{i}].id: must be an integer >= 1, got {c.id!r}")
        if c.id in carrier_ids:
            raise ScenarioError(f"carriers[{i}].id: duplicate carrier id {c.id}")
        carrier_ids.add(c.id)
        if not _is_number(c.capacity) or c.capacity <= 0:
            raise ScenarioError(
                f"carrier {c.id}: capacity must be > 0, got {c.capacity!r}"
            )
    user_ids = set()
    covered: set[int] = set()
    for i, u in enumerate(s.users):
        if not isinstance(u.id, int) or isinstance(u.id, bool) or u.id < 1:
            raise ScenarioError(f"users[{i}].id: must be an integer >= 1, got {u.id!r}")
        if u.id in user_ids:
            raise ScenarioError(f"users[{i}].id: duplicate user id {u.id}")
        user_ids.add(u.id)
        if not isinstance(u.utility, (Sigmoidal, Logarithmic)):
            raise ScenarioError(f"user {u.id}: utility must be Sigmoidal or Logarithmic")
        if not u.coverage:
            raise ScenarioError(f"user {u.id}: coverage must not be empty")
        seen = set()
        for cid in u.coverage:
            if cid in seen:
                raise ScenarioError(f"user {u.id}: duplicate carrier id {cid} in coverage")
            seen.add(cid)
            if cid not in carrier_ids:
                raise ScenarioError(
                    f"user {u.id}: coverage references unknown carrier id {cid}"
                )
        covered.update(u.coverage)
    for c in s.carriers:
        if c.id not in covered:
            raise ScenarioError(f"carrier {c.id}: no user covers it")


def _utility_from_dict(obj, where: str) -> UtilityFunction:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object, got {type(obj).__name__}")
    kind = obj.get("type")
    if kind == "sigmoidal":
        for f in ("a", "b"):
            if not _is_number(obj.get(f)) or obj[f] <= 0:
                raise ScenarioError(f"{where}.{f}: must be a positive number")
        try:
            return Sigmoidal(a=float(obj["a"]), b=float(obj["b"]))
        except ValueError as e:
            raise ScenarioError(f"{where}: {e}") from e
    if kind == "logarithmic":
        for f in ("k", "r_max"):
            if not _is_number(obj.get(f)) or obj[f] <= 0:
                raise ScenarioError(f"{where}.{f}: must be a positive number")
        try:
            return Logarithmic(k=float(obj["k"]), r_max=float(obj["r_max"]))
        except ValueError as e:
            raise ScenarioError(f"{where}: {e}") from e
    raise ScenarioError(
        f"{where}.type: expected 'sigmoidal' or 'logarithmic', got {kind!r}"
    )


def parse_scenario(text: str) -> Scenario:
    """Build a validated Scenario from its JSON document.

    Schema::

        {"carriers": [{"id": 1, "capacity": 100}, ...],
         "users": [{"id": 1,
                    "utility": {"type": "sigmoidal", "a": 5, "b": 10}
                             | {"type": "logarithmic", "k": 15, "r_max": 100},
                    "coverage": [1, ...]}, ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ScenarioError("document: expected a JSON object at top level")
    for field_name in ("carriers", "users"):
        if field_name not in doc:
            raise ScenarioError(f"{field_name}: required field missing")
        if not isinstance(doc[field_name], list):
            raise ScenarioError(f"{field_name}: expected a list")

    carriers = []
    for i, c in enumerate(doc["carriers"]):
        if not isinstance(c, dict):
            raise ScenarioError(f"carriers[{i}]: expected an object")
        cid = c.get("id")
        if not isinstance(cid, int) or isinstance(cid, bool):
            raise ScenarioError(f"carriers[{i}].id: must be an integer")
        if not _is_number(c.get("capacity")):
            raise ScenarioError(f"carriers[{i}].capacity: must be a number")
        carriers.append(CarrierSpec(id=cid, capacity=float(c["capacity"])))

    users = []
    for i, u in enumerate(doc["users"]):
        if not isinstance(u, dict):
            raise ScenarioError(f"users[{i}]: expected an object")
        uid = u.get("id")
        if not isinstance(uid, int) or isinstance(uid, bool):
            raise ScenarioError(f"users[{i}].id: must be an integer")
        coverage = u.get("coverage")
        if not isinstance(coverage, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in (coverage or [])
        ):
            raise ScenarioError(f"users[{i}].coverage: must be a list of carrier ids")
        utility = _utility_from_dict(u.get("utility"), f"users[{i}].utility")
        users.append(UserSpec(id=uid, utility=utility, coverage=tuple(coverage)))

    return Scenario(carriers=tuple(carriers), users=tuple(users))


def _utility_to_dict(u: UtilityFunction) -> dict:
    if isinstance(u, Sigmoidal):
        return {"type": "sigmoidal", "a": u.a, "b": u.b}
    return {"type": "logarithmic", "k": u.k, "r_max": u.r_max}


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "carriers": [{"id": c.id, "capacity": c.capacity} for c in s.carriers],
        "users": [
            {
                "id": u.id,
                "utility": _utility_to_dict(u.utility),
                "coverage": list(u.coverage),
            }
            for u in s.users
        ],
    }


def serialize_scenario(s: Scenario) -> str:
    """JSON document that parse_scenario maps back to an equal Scenario."""
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def load_scenario(path: Union[str, Path]) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {p}: {e}") from e
    return parse_scenario(text)


def with_capacity(s: Scenario, carrier_id: int, capacity: float) -> Scenario:
    """Copy of the scenario with one carrier's capacity replaced."""
    if carrier_id not in s.carrier_ids():
        raise ScenarioError(f"no carrier with id {carrier_id}")
    carriers = tuple(
        replace(c, capacity=float(capacity)) if c.id == carrier_id else c
        for c in s.carriers
    )
    return Scenario(carriers=carriers, users=s.users)


def two_carrier_nine_user(r1: float = 100.0, r2: float = 100.0) -> Scenario:
    """Built-in benchmark scenario: two carriers, nine users in three groups.

    Users 1-3 see only carrier 1, users 7-9 only carrier 2, and users 4-6
    are joint users in both coverage areas, so each coverage set holds six
    users with the same multiset of utilities. Real-time (sigmoidal) and
    delay-tolerant (logarithmic) applications are mixed within each group.
    """
    return Scenario(
        carriers=(
            CarrierSpec(id=1, capacity=float(r1)),
            CarrierSpec(id=2, capacity=float(r2)),
        ),
        users=(
            UserSpec(id=1, utility=Sigmoidal(a=5.0, b=10.0), coverage=(1,)),
            UserSpec(id=2, utility=Sigmoidal(a=3.0, b=20.0), coverage=(1,)),
            UserSpec(id=3, utility=Logarithmic(k=15.0, r_max=100.0), coverage=(1,)),
            UserSpec(id=4, utility=Logarithmic(k=3.0, r_max=100.0), coverage=(1, 2)),
            UserSpec(id=5, utility=Logarithmic(k=0.5, r_max=100.0), coverage=(1, 2)),
            UserSpec(id=6, utility=Sigmoidal(a=1.0, b=30.0), coverage=(1, 2)),
            UserSpec(id=7, utility=Sigmoidal(a=5.0, b=10.0), coverage=(2,)),
            UserSpec(id=8, utility=Sigmoidal(a=3.0, b=20.0), coverage=(2,)),
            UserSpec(id=9, utility=Logarithmic(k=15.0, r_max=100.0), coverage=(2,)),
        ),
    )
