#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dualsmpc/model.hpp"
#include "dualsmpc/solver.hpp"

namespace dualsmpc {

/// dual: evaluate the stage-0 alpha-vector set at the full belief.
/// ce: fully observed MDP policy applied to the MAP state.
/// ce_vertex: experimental variant that evaluates the stage-0 alpha-vector
/// set at a point mass on the MAP state instead of solving the MDP.
enum class ControllerKind { dual, ce, ce_vertex };

std::string controller_kind_name(ControllerKind kind);
ControllerKind controller_kind_from_name(const std::string& name);

/// Receding-horizon controller state: the current belief plus the policy
/// solved once offline (the model is time-invariant, so every receding
/// step reuses the same first-stage policy). Immutable value; advance()
/// returns a new state sharing the solved policy.
class Controller {
public:
    static Controller init(std::shared_ptr<const PomdpModel> model,
                           const SolveConfig& config, ControllerKind kind,
                           Belief initial_belief);

    /// Same, but reusing an already-solved stack (dual and ce_vertex kinds)
    /// so that callers can solve once and run many controllers or rollouts.
    /// The stack's horizon must match the config's.
    static Controller init_solved(std::shared_ptr<const PomdpModel> model,
                                  const SolveConfig& config, ControllerKind kind,
                                  Belief initial_belief, PolicyStack stack);

    /// The action the controller takes at the current belief. Pure.
    int decide() const;

    /// The action this controller's policy prescribes at an arbitrary
    /// belief, without touching the controller's own state.
    int decide_at(const Belief& belief) const;

    /// Filter step after applying `action` and observing `observation`.
    Controller advance(int action, int observation) const;

    ControllerKind kind() const { return kind_; }
    const Belief& belief() const { return belief_; }
    const PomdpModel& model() const { return *model_; }
    const SolveConfig& config() const { return config_; }

    /// Solved stage sets (dual and ce_vertex kinds).
    const PolicyStack& policy() const;
    /// Solved DP tables (ce kind).
    const MdpSolution& mdp_policy() const;

private:
    struct Solved {
        PolicyStack stack;  // dual, ce_vertex
        MdpSolution mdp;    // ce
    };

    Controller(std::shared_ptr<const PomdpModel> model, SolveConfig config,
               ControllerKind kind, Belief belief, std::shared_ptr<const Solved> solved)
        : model_(std::move(model)),
          config_(config),
          kind_(kind),
          belief_(std::move(belief)),
          solved_(std::move(solved)) {}

    std::shared_ptr<const PomdpModel> model_;
    SolveConfig config_;
    ControllerKind kind_;
    Belief belief_;
    std::shared_ptr<const Solved> solved_;
};

/// decide() at every barycentric grid point of the belief simplex with the
/// given resolution, ordered lexicographically by grid coordinates.
std::vector<std::pair<Belief, int>> action_map(const Controller& controller,
                                               int grid_resolution);

}  // namespace dualsmpc
