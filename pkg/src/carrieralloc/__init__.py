"""Price-selective multi-carrier rate allocation with carrier aggregation.

Carriers discover shadow prices for their capacity by dual ascent over
their coverage sets; users order in-range carriers by price and collect
rates one carrier at a time, with already-received rates entering the next
carrier's solve as offsets. The hot numeric kernels run on a compiled
extension when available, with a bit-identical pure-Python fallback.
"""

from ._backend import available_backends, backend_name
from .enodeb import (
    ConvergenceTrace,
    DualAscentResult,
    TraceStep,
    dual_ascent,
    fluctuation_clamp,
    offered_price,
    rate_cap_for,
)
from .errors import (
    ConvergenceError,
    DeadlockError,
    OracleError,
    ProtocolError,
    ScenarioError,
)
from .model import (
    CarrierSpec,
    Scenario,
    SolverParams,
    UserSpec,
    load_scenario,
    parse_scenario,
    serialize_scenario,
    two_carrier_nine_user,
    with_capacity,
)
from .oracle import (
    CentralizedInstance,
    ComparisonResult,
    compare,
    solve_centralized,
)
from .protocol import AllocationReport, run, sweep
from .ue import UeState, next_flag, order_carriers, record_rate
from .utility import (
    EPS_RATE,
    TOL_RATE,
    Logarithmic,
    Sigmoidal,
    UtilityFunction,
    evaluate,
    inverse_log_marginal,
    log_marginal,
    log_utility,
    net_benefit_maximizer,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationReport",
    "CarrierSpec",
    "CentralizedInstance",
    "ComparisonResult",
    "ConvergenceError",
    "ConvergenceTrace",
    "DeadlockError",
    "DualAscentResult",
    "EPS_RATE",
    "Logarithmic",
    "OracleError",
    "ProtocolError",
    "Scenario",
    "ScenarioError",
    "Sigmoidal",
    "SolverParams",
    "TOL_RATE",
    "TraceStep",
    "UeState",
    "UserSpec",
    "UtilityFunction",
    "available_backends",
    "backend_name",
    "compare",
    "dual_ascent",
    "evaluate",
    "fluctuation_clamp",
    "inverse_log_marginal",
    "load_scenario",
    "log_marginal",
    "log_utility",
    "net_benefit_maximizer",
    "next_flag",
    "offered_price",
    "order_carriers",
    "parse_scenario",
    "rate_cap_for",
    "record_rate",
    "run",
    "serialize_scenario",
    "solve_centralized",
    "sweep",
    "two_carrier_nine_user",
    "with_capacity",
    "__version__",
]
