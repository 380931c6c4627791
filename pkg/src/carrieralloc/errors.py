"""Exception types shared across the package."""

from __future__ import annotations


class ScenarioError(ValueError):
    """Invalid scenario document or inconsistent scenario data."""


class ProtocolError(RuntimeError):
    """Violation of the allocation protocol's message ordering."""


class ConvergenceError(ProtocolError):
    """A carrier's dual ascent did not settle within the iteration cap."""

    def __init__(self, carrier_id: int, phase: str, iterations: int):
        self.carrier_id = carrier_id
        self.phase = phase
        self.iterations = iterations
        super().__init__(
            f"carrier {carrier_id}: {phase} solve did not converge "
            f"within {iterations} iterations"
        )


class DeadlockError(ProtocolError):
    """No carrier is fully flagged while users still await allocations.

    Cannot happen when every user orders carriers from one consistent price
    table; kept as a defensive guard.
    """

    def __init__(self, flags: dict):
        self.flags = dict(flags)
        super().__init__(f"allocation stalled; current flags: {self.flags}")


class OracleError(RuntimeError):
    """The centralized reference solver failed to meet its tolerance."""
