#pragma once

#include "dualsmpc/model.hpp"

namespace dualsmpc {

/// Action tag of the terminal-stage vector, where no decision is taken.
inline constexpr int kNoAction = -1;

/// Supporting hyperplane of the piecewise-linear value function, tagged with
/// the action that attains it.
struct AlphaVector {
    Vec coeffs;
    int action = kNoAction;
};

/// Stage-k value function, V_k(pi) = min over the set of pi . coeffs.
struct AlphaVectorSet {
    std::vector<AlphaVector> vectors;
    int stage = 0;
};

/// Value functions for stages 0..N. The stage-0 set realizes the first
/// policy of the finite-horizon optimum, which receding-horizon control
/// applies at every step.
struct PolicyStack {
    std::vector<AlphaVectorSet> per_stage;
    int horizon() const { return static_cast<int>(per_stage.size()) - 1; }
};

struct Evaluation {
    double value = 0.0;
    int action = kNoAction;
    int vector_index = -1;
};

/// Min dot product over the set. Ties break toward the lowest action index,
/// then the lowest vector index.
Evaluation evaluate(const AlphaVectorSet& set, const Belief& belief);

/// Evaluates the stage-k set of the stack; stage == horizon yields the
/// terminal value with no action.
Evaluation evaluate(const PolicyStack& stack, int stage, const Belief& belief);

/// Exact backward solve of the belief-space dynamic program. Each backup
/// enumerates per-observation projections of the next stage set, cross-sums
/// them with interleaved pruning, adds the stage cost and unions over
/// actions. Throws ResourceLimitError when an unpruned cross-sum would
/// exceed config.max_cross_sum.
PolicyStack solve(const PomdpModel& model, const SolveConfig& config);

/// One exact backup from the stage-(k+1) set, pruned per config.
AlphaVectorSet backup_stage(const PomdpModel& model, const AlphaVectorSet& next,
                            const SolveConfig& config);

/// The same backup with no pruning at all, for soundness cross-checks.
/// The cross-sum cap still applies.
AlphaVectorSet backup_stage_unpruned(const PomdpModel& model, const AlphaVectorSet& next,
                                     const SolveConfig& config);

/// Removes vectors that never attain the minimum. dominance_only drops
/// pointwise-dominated vectors (duplicates first, earlier vector wins ties).
/// exact_lp additionally drops vectors with no witness belief where they
/// are the strict minimizer, found by a linear program per vector.
AlphaVectorSet prune(const AlphaVectorSet& set, PruningMode mode, double tolerance);

/// Literal recursion over the belief tree; the independent oracle for
/// solve/evaluate. Guarded to 1e7 leaf evaluations.
Evaluation bruteforce_value(const PomdpModel& model, const SolveConfig& config,
                            const Belief& belief);

/// Root action values of the same recursion, one entry per action
/// (empty for horizon 0).
Vec bruteforce_action_values(const PomdpModel& model, const SolveConfig& config,
                             const Belief& belief);

/// Finite-horizon DP tables for the fully observed MDP underlying the
/// POMDP: value[k][i] and action[k][i] for state i at stage k. The stage-0
/// action table is the certainty-equivalent policy over MAP states.
struct MdpSolution {
    std::vector<Vec> value;                // stages 0..N
    std::vector<std::vector<int>> action;  // stages 0..N-1
};

MdpSolution solve_mdp(const PomdpModel& model, const SolveConfig& config);

}  // namespace dualsmpc
