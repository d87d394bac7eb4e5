"""circscan: simulate and verify circulant-graph scan algorithms.

Implements the straight-doubling inclusive scan and two exclusive-scan
families (q'-doubling and roughly-halving) on a one-ported,
round-synchronous message-passing model, with exact accounting of
communication rounds and reduce-operator applications, plus the oracles
that keep the accounting honest.
"""

from .operators import (
    BUILTIN_NAMES,
    CountingOperator,
    ElementVector,
    IntervalElement,
    Operator,
    OperatorError,
    WindowAdjacencyError,
    builtin_operator,
    interval_inputs,
    interval_operator,
)
from .schedule import (
    Phase,
    ProcCount,
    RoundSpec,
    SkipSchedule,
    Variant,
    best_qprime,
    build_halving_schedule,
    build_inclusive_schedule,
    build_qprime_schedule,
    build_schedule,
    ceil_log2,
    predict_ops_bound_halving,
    predict_ops_bound_qprime,
    predict_rounds_qprime,
)
from .simulator import (
    Message,
    ProcessorState,
    RunTrace,
    ScanResult,
    SimulationError,
    export_trace,
    simulate,
    step_halving,
    step_inclusive,
    step_qprime,
    trace_records,
)
from .verify import (
    AnalyticMetrics,
    BoundsReport,
    TableRow,
    WindowInvariantError,
    analytic_metrics,
    check_oracle_equivalence,
    reproduce_table,
    run_window_checked,
    sequential_exscan,
    sequential_scan,
    sweep_bounds,
    table_from_csv,
    table_to_csv,
    table_to_markdown,
    validate_trace,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES",
    "AnalyticMetrics",
    "BoundsReport",
    "CountingOperator",
    "ElementVector",
    "IntervalElement",
    "Message",
    "Operator",
    "OperatorError",
    "Phase",
    "ProcCount",
    "ProcessorState",
    "RoundSpec",
    "RunTrace",
    "ScanResult",
    "SimulationError",
    "SkipSchedule",
    "TableRow",
    "Variant",
    "WindowAdjacencyError",
    "WindowInvariantError",
    "analytic_metrics",
    "best_qprime",
    "build_halving_schedule",
    "build_inclusive_schedule",
    "build_qprime_schedule",
    "build_schedule",
    "builtin_operator",
    "ceil_log2",
    "check_oracle_equivalence",
    "export_trace",
    "interval_inputs",
    "interval_operator",
    "predict_ops_bound_halving",
    "predict_ops_bound_qprime",
    "predict_rounds_qprime",
    "reproduce_table",
    "run_window_checked",
    "sequential_exscan",
    "sequential_scan",
    "simulate",
    "step_halving",
    "step_inclusive",
    "step_qprime",
    "sweep_bounds",
    "table_from_csv",
    "table_to_csv",
    "table_to_markdown",
    "trace_records",
    "validate_trace",
]
