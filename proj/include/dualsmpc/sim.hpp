#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dualsmpc/controller.hpp"
#include "dualsmpc/model.hpp"

namespace dualsmpc {

/// One closed-loop step: the belief is the one the decision was based on,
/// the observation is the measurement received after applying the action.
struct SimStep {
    int t;
    int true_state;
    int action;
    int observation;
    Belief belief;
    double stage_cost;
};

struct SimTrace {
    std::string model_id;
    std::string controller_id;
    std::string prng_id;
    std::uint64_t seed = 0;
    double discount = 1.0;
    std::vector<SimStep> steps;
    int final_state = 0;
    Belief final_belief = Belief::uniform(1);
    double terminal_cost = 0.0;

    /// Discounted sum of realized stage costs.
    double cumulative_cost() const;
    /// Same plus the discounted terminal cost at the final state.
    double cumulative_cost_with_terminal() const;
};

/// Simulates the true POMDP in closed loop with the controller. Draws, in
/// order per step: next state from the transition row, then observation
/// from the observation row, each by inverse CDF. When initial_state is
/// empty the initial state is drawn from the controller's belief first.
/// Deterministic function of (inputs, seed).
SimTrace rollout(const Controller& controller, std::optional<int> initial_state,
                 int steps, std::uint64_t seed, const std::string& model_id = "pomdp");

/// Convenience overload that solves the controller's policy first.
SimTrace rollout(const PomdpModel& model, ControllerKind kind, const SolveConfig& config,
                 const Belief& initial_belief, std::optional<int> initial_state,
                 int steps, std::uint64_t seed, const std::string& model_id = "pomdp");

struct BatchStats {
    int n_rollouts = 0;
    int steps = 0;
    double mean_cost = 0.0;
    double stddev_cost = 0.0;
    double mean_cost_with_terminal = 0.0;
    double stddev_cost_with_terminal = 0.0;
    Vec action_frequency;   // share of all decisions per action
    Vec reach_probability;  // state visited at any time up to the final one
    Vec per_seed_costs;     // cumulative cost (no terminal) in seed order
    Vec per_seed_costs_with_terminal;  // same plus the discounted terminal cost
};

/// Runs rollouts with seeds base_seed + k for k = 0..n_rollouts-1 and
/// aggregates in seed order. Deterministic given inputs.
BatchStats batch(const Controller& controller, std::optional<int> initial_state,
                 int steps, int n_rollouts, std::uint64_t base_seed);

BatchStats batch(const PomdpModel& model, ControllerKind kind, const SolveConfig& config,
                 const Belief& initial_belief, std::optional<int> initial_state,
                 int steps, int n_rollouts, std::uint64_t base_seed);

/// Empirical check of the receding-horizon performance bound
///   (1 - alpha*gamma) * J_inf  <=  J_N + alpha/(1-alpha) * eta
/// with J_N computed exactly from the solved policy and J_inf estimated by
/// truncated discounted Monte Carlo under the dual controller.
struct BoundReport {
    double alpha = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double j_design = 0.0;             // exact finite-horizon optimum at pi_0
    double j_achieved_estimate = 0.0;  // truncated MC estimate of J_inf
    double lhs = 0.0;                  // (1 - alpha*gamma) * estimate
    double rhs = 0.0;                  // j_design + alpha/(1-alpha) * eta
    bool lhs_ok = false;
    int truncation_steps = 0;
    double truncation_error_bound = 0.0;
    int n_rollouts = 0;
};

/// Requires discount < 1. The simulation length is min_steps or the first
/// horizon at which the discounted tail bound drops below 1e-6, whichever
/// is larger.
BoundReport bound_report(const PomdpModel& model, const SolveConfig& config,
                         const BoundParams& bound, const Belief& initial_belief,
                         int n_rollouts, int min_steps, std::uint64_t seed);

/// CSV trace: one `#` metadata line, a header row, one row per step and a
/// final row for the terminal record (action and observation -1, stage_cost
/// holding the terminal cost). Floats carry 17 significant digits.
void write_trace_csv(std::ostream& os, const SimTrace& trace);
std::string trace_csv(const SimTrace& trace);

/// Flat key=value report; labels come from the model when present.
void write_batch_report(std::ostream& os, const BatchStats& stats,
                        const PomdpModel& model);

/// Per-seed cost table: `seed,cost` header plus one row per rollout.
void write_batch_costs_csv(std::ostream& os, const BatchStats& stats,
                           std::uint64_t base_seed);

}  // namespace dualsmpc
