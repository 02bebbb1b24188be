"""Finite-horizon POMDP solving and receding-horizon dual control.

Thin Python layer over the C++ core: exact alpha-vector value iteration,
a discrete Bayesian belief filter, dual and certainty-equivalent
receding-horizon controllers, and a seeded Monte Carlo simulation harness.
"""

from ._core import (
    AlphaVector,
    AlphaVectorSet,
    BatchStats,
    Belief,
    BoundParams,
    BoundReport,
    Controller,
    ControllerKind,
    Evaluation,
    Labels,
    LpFailureError,
    MdpSolution,
    ParseError,
    ParseResult,
    PolicyStack,
    PomdpModel,
    PruningMode,
    ResourceLimitError,
    SimStep,
    SimTrace,
    SolveConfig,
    ZeroLikelihoodError,
    action_map,
    backup_stage,
    backup_stage_unpruned,
    batch,
    bound_report,
    bruteforce_action_values,
    bruteforce_value,
    evaluate,
    expected_stage_cost,
    healthcare_model,
    map_state,
    normalize_rows,
    observation_likelihoods,
    parse_pomdp,
    policy_text,
    predict,
    prune,
    read_policy,
    rollout,
    serialize,
    solve,
    solve_mdp,
    step,
    terminal_value,
    trace_csv,
    update,
    validate_model,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaVector",
    "AlphaVectorSet",
    "BatchStats",
    "Belief",
    "BoundParams",
    "BoundReport",
    "Controller",
    "ControllerKind",
    "Evaluation",
    "Labels",
    "LpFailureError",
    "MdpSolution",
    "ParseError",
    "ParseResult",
    "PolicyStack",
    "PomdpModel",
    "PruningMode",
    "ResourceLimitError",
    "SimStep",
    "SimTrace",
    "SolveConfig",
    "ZeroLikelihoodError",
    "action_map",
    "backup_stage",
    "backup_stage_unpruned",
    "batch",
    "bound_report",
    "bruteforce_action_values",
    "bruteforce_value",
    "evaluate",
    "expected_stage_cost",
    "healthcare_model",
    "map_state",
    "normalize_rows",
    "observation_likelihoods",
    "parse_pomdp",
    "policy_text",
    "predict",
    "prune",
    "read_policy",
    "rollout",
    "serialize",
    "solve",
    "solve_mdp",
    "step",
    "terminal_value",
    "trace_csv",
    "update",
    "validate_model",
]
