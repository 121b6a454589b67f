"""Multi-agent online exploration of cycles, tadpole, and n-tadpole graphs.

The package simulates exploration strategies on weighted graphs revealed
node by node, accounts costs exactly as rationals in both the time model
(last return to the start) and the energy model (maximum per-agent
distance), and grades them against offline optima from closed forms or an
independent brute-force solver.
"""

from .adversaries import (
    EnergyLowerBoundOracle,
    TimeLowerBoundOracle,
    make_2_5_example,
    make_ale_lb_tadpole,
    make_energy_lb_adaptive,
    make_energy_lb_cycle,
    make_ntad_lb,
    make_time_lb_adaptive,
)
from .engine import (
    ChoiceStream,
    EngineView,
    Retreat,
    RevelationOracle,
    ScriptedStream,
    SeededStream,
    StaticOracle,
    StrategyPolicy,
    Trace,
    TraceEvent,
    Traverse,
    Wait,
    competitive_ratio,
    cost_energy,
    cost_time,
    enumerate_choice_paths,
    run,
    trace_to_csv,
)
from .errors import (
    BadAttachIndex,
    BadParams,
    EmptyOrTooShort,
    EmptyTail,
    EngineError,
    GraphError,
    GraphFormatError,
    IllegalCommand,
    InsufficientAgents,
    NonTermination,
    NonpositiveWeight,
    OracleInconsistency,
    TadexError,
    TooLarge,
    UnknownNode,
    WrongGraphClass,
    ZeroOptimum,
)
from .graph import (
    CycleGeometry,
    Edge,
    Tail,
    WeightedGraph,
    build_cycle,
    build_n_tadpole,
    build_tadpole,
    cycle_geometry,
    distances_from,
    parse_graph,
    serialize_graph,
    shortest_distance,
    shortest_path,
)
from .instances import (
    DEFAULT_PARAMS,
    SMALL_PARAMS,
    InstanceParams,
    random_cycle,
    random_ntadpole,
    random_tadpole,
    with_start,
)
from .offline import (
    OfflinePlan,
    brute_cap,
    eccentricity,
    opt_arms,
    opt_bruteforce,
    opt_cycle,
    opt_ntadpole_nplus2,
    opt_single_agent_ntadpole,
    opt_tadpole_k3plus,
    plan_arms,
    plan_cycle,
    plan_single_agent,
    two_agent_lower_bound,
    walk_length,
)
from .rationals import format_rational, parse_rational
from .strategies import (
    STRATEGIES,
    ale_cycle_policy,
    ale_tadpole_policy,
    amp_cycle_policy,
    amp_tadpole2_policy,
    amp_tadpole3_policy,
    amp_tadpole4_policy,
    ntad_exp_policy,
    ntad_nplus2_policy,
    replay_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
