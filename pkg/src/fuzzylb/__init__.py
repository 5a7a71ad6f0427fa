"""fuzzylb: discrete-event simulation of fuzzy-controlled dynamic load balancing."""

from .fuzzy import (
    ANY,
    COUNT_TERMS,
    DEFAULT_BREAKPOINTS,
    DEFAULT_OUTPUT,
    DEFAULT_RULES,
    LOAD_TERMS,
    Breakpoints,
    FuzzyEngine,
    FuzzyRule,
    HeavyCountPartition,
    InferenceResult,
    MembershipFunction,
    NodeStatus,
    NoRuleFired,
    OutputPartition,
    classify_status,
    defuzzify_centroid,
    eval_membership,
    format_rule,
    fuzzify_heavy_count,
    fuzzify_load,
    infer,
    parse_rule,
)
from .network import (
    INF,
    CostTable,
    NetworkGraph,
    build_cost_table,
    build_routing_table,
    count_heavy_nodes,
    generate_random_graph,
    graph_from_text,
    graph_to_text,
)
from .policies import (
    MigrationDecision,
    PolicyKind,
    fuzzy_transfer_policy,
    location_policy,
    plan_migrations,
    randomize_assign,
    round_robin_assign,
    selection_policy,
)
from .report import (
    ComparisonTable,
    build_comparison,
    emit_report,
    improvement_pct,
    mean_improvement,
)
from .simulation import (
    DEFAULT_ARRIVAL_RATE,
    RNG_KIND,
    ConfigError,
    RunMetrics,
    SimConfig,
    Task,
    Workload,
    draw_workload,
    run_experiment,
    run_simulation,
    simulate_workload,
    split_streams,
)

__version__ = "0.1.0"
