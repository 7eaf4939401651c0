"""Regular path query engine with cost-based plan selection."""

__version__ = "0.1.0"

from .costmodel import (
    CardinalityModel,
    CostEstimate,
    choose_best_plan,
    estimate_plan_cost,
    label_fanout,
)
from .evaluator import (
    DEFAULT_TUPLE_BUDGET,
    Bindings,
    EvaluationLimitError,
    ExecStats,
    PairRelation,
    UNBOUND,
    evaluate_plan,
    expand_once,
    materialize_view,
    oracle_eval,
    seed_frontier,
)
from .graph import (
    Graph,
    LabelCounts,
    LabelStats,
    NTriplesError,
    compute_stats,
    load_ntriples,
    serialize_ntriples,
)
from .pathparser import (
    Alt,
    Inverse,
    Label,
    OneOrMore,
    PathExpr,
    PathSyntaxError,
    Seq,
    UnsupportedFeatureError,
    ZeroOrMore,
    ZeroOrOne,
    expr_to_string,
    normalize_inverses,
    parse_path,
)
from .planner import (
    Automaton,
    Symbol,
    ViewDef,
    WavePlan,
    compile_automaton,
    enumerate_plans,
    plan_signature,
    plan_to_dot,
    reverse_automaton,
)

__all__ = [
    "__version__",
    "Alt",
    "Automaton",
    "Bindings",
    "CardinalityModel",
    "CostEstimate",
    "DEFAULT_TUPLE_BUDGET",
    "EvaluationLimitError",
    "ExecStats",
    "Graph",
    "Inverse",
    "Label",
    "LabelCounts",
    "LabelStats",
    "NTriplesError",
    "OneOrMore",
    "PairRelation",
    "PathExpr",
    "PathSyntaxError",
    "Seq",
    "Symbol",
    "UNBOUND",
    "UnsupportedFeatureError",
    "ViewDef",
    "WavePlan",
    "ZeroOrMore",
    "ZeroOrOne",
    "choose_best_plan",
    "compile_automaton",
    "compute_stats",
    "enumerate_plans",
    "estimate_plan_cost",
    "evaluate_plan",
    "expand_once",
    "expr_to_string",
    "label_fanout",
    "load_ntriples",
    "materialize_view",
    "normalize_inverses",
    "oracle_eval",
    "parse_path",
    "plan_signature",
    "plan_to_dot",
    "reverse_automaton",
    "seed_frontier",
    "serialize_ntriples",
]
