"""Multi-agent task planning over a composable automata algebra.

Build per-agent capability, constraint and failure automata, compose them
into one environment model, convert it to a weighted digraph, and extract
minimum-cost module-chain plans with a complete or a heuristic solver.
"""

__version__ = "0.1.0"

from .automata import (
    CompatibilityReport,
    Dfa,
    EndpointConflict,
    Epsilon0Nfa,
    EventId,
    Projector,
    State,
    active_events,
    check_compatible,
    delta,
    empty_nfa,
    inverse_transition,
    make_nfa,
    merge_on,
    parse_state,
    proj,
    replay,
    state_str,
)
from .algebra import concat_compat, concat_many, subtract_compat, union_compat
from .composer import (
    AgentSpec,
    EnvironmentModel,
    FailureEvent,
    InterAgentSpec,
    build_agent,
    build_agent_capabilities,
    build_agent_constraints,
    build_environment,
    inject_failure,
)
from .graph import WeightedGraph, to_graph
from .search import dijkstra
from .planner import (
    ModuleChain,
    PlanResult,
    PortModule,
    TaskSpecification,
    build_chain,
    check_chain,
    invert_module,
    plan_complete,
    plan_heuristic,
    task_for,
)
from .oracle import brute_force_shortest, enumerate_goal_states, random_scenario
from .scenario import (
    Diagnostic,
    ScenarioFile,
    build_scenario_environment,
    expand_inter_templates,
    parse_scenario,
    serialize_scenario,
    validate_scenario,
)
from .artifacts import (
    PlanDocument,
    Timings,
    dump_model,
    load_model,
    load_plan,
    parse_model,
    parse_plan,
    plan_document,
    save_model,
    serialize_plan,
)
from .dot import export_dot

__all__ = [
    "AgentSpec",
    "CompatibilityReport",
    "Dfa",
    "Diagnostic",
    "EndpointConflict",
    "EnvironmentModel",
    "Epsilon0Nfa",
    "EventId",
    "FailureEvent",
    "InterAgentSpec",
    "ModuleChain",
    "PlanDocument",
    "PlanResult",
    "PortModule",
    "Projector",
    "ScenarioFile",
    "State",
    "TaskSpecification",
    "Timings",
    "WeightedGraph",
    "active_events",
    "build_agent",
    "build_agent_capabilities",
    "build_agent_constraints",
    "build_chain",
    "build_environment",
    "build_scenario_environment",
    "brute_force_shortest",
    "check_chain",
    "check_compatible",
    "concat_compat",
    "concat_many",
    "delta",
    "dijkstra",
    "dump_model",
    "empty_nfa",
    "enumerate_goal_states",
    "expand_inter_templates",
    "export_dot",
    "inject_failure",
    "inverse_transition",
    "invert_module",
    "load_model",
    "load_plan",
    "make_nfa",
    "merge_on",
    "parse_model",
    "parse_plan",
    "parse_scenario",
    "parse_state",
    "plan_complete",
    "plan_document",
    "plan_heuristic",
    "proj",
    "random_scenario",
    "replay",
    "save_model",
    "serialize_plan",
    "serialize_scenario",
    "state_str",
    "subtract_compat",
    "task_for",
    "to_graph",
    "union_compat",
    "validate_scenario",
]
