#include "dualsmpc/controller.hpp"

#include <stdexcept>

#include "dualsmpc/filter.hpp"

namespace dualsmpc {

std::string controller_kind_name(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::dual: return "dual";
        case ControllerKind::ce: return "ce";
        case ControllerKind::ce_vertex: return "ce-vertex";
    }
    throw std::invalid_argument("unknown controller kind");
}

ControllerKind controller_kind_from_name(const std::string& name) {
    if (name == "dual") return ControllerKind::dual;
    if (name == "ce") return ControllerKind::ce;
    if (name == "ce-vertex") return ControllerKind::ce_vertex;
    throw std::invalid_argument("unknown controller kind '" + name + "'");
}

Controller Controller::init(std::shared_ptr<const PomdpModel> model,
                            const SolveConfig& config, ControllerKind kind,
                            Belief initial_belief) {
    if (!model) throw std::invalid_argument("controller: null model");
    if (config.horizon < 1)
        throw std::invalid_argument("controller: horizon must be >= 1");
    if (initial_belief.size() != model->n_states)
        throw std::invalid_argument("controller: belief size does not match model");

    auto solved = std::make_shared<Solved>();
    if (kind == ControllerKind::ce) {
        solved->mdp = solve_mdp(*model, config);
    } else {
        solved->stack = solve(*model, config);
    }
    return Controller(std::move(model), config, kind, std::move(initial_belief),
                      std::move(solved));
}

Controller Controller::init_solved(std::shared_ptr<const PomdpModel> model,
                                   const SolveConfig& config, ControllerKind kind,
                                   Belief initial_belief, PolicyStack stack) {
    if (!model) throw std::invalid_argument("controller: null model");
    if (kind == ControllerKind::ce)
        throw std::invalid_argument("controller: ce solves MDP tables, not a stack");
    if (initial_belief.size() != model->n_states)
        throw std::invalid_argument("controller: belief size does not match model");
    if (stack.horizon() != config.horizon)
        throw std::invalid_argument("controller: stack horizon does not match config");

    auto solved = std::make_shared<Solved>();
    solved->stack = std::move(stack);
    return Controller(std::move(model), config, kind, std::move(initial_belief),
                      std::move(solved));
}

int Controller::decide() const { return decide_at(belief_); }

int Controller::decide_at(const Belief& belief) const {
    switch (kind_) {
        case ControllerKind::dual:
            return evaluate(solved_->stack, 0, belief).action;
        case ControllerKind::ce:
            return solved_->mdp.action[0][map_state(belief)];
        case ControllerKind::ce_vertex: {
            const Belief vertex = Belief::point_mass(model_->n_states, map_state(belief));
            return evaluate(solved_->stack, 0, vertex).action;
        }
    }
    throw std::logic_error("unreachable");
}

Controller Controller::advance(int action, int observation) const {
    Belief next = step(*model_, belief_, action, observation);
    return Controller(model_, config_, kind_, std::move(next), solved_);
}

const PolicyStack& Controller::policy() const {
    if (kind_ == ControllerKind::ce)
        throw std::logic_error("ce controller holds MDP tables, not alpha vectors");
    return solved_->stack;
}

const MdpSolution& Controller::mdp_policy() const {
    if (kind_ != ControllerKind::ce)
        throw std::logic_error("only the ce controller holds MDP tables");
    return solved_->mdp;
}

std::vector<std::pair<Belief, int>> action_map(const Controller& controller,
                                               int grid_resolution) {
    if (grid_resolution < 1)
        throw std::invalid_argument("action_map: grid resolution must be >= 1");
    const int n = controller.model().n_states;

    std::vector<std::pair<Belief, int>> out;
    std::vector<int> coords(n, 0);

    // Lexicographic walk over nonnegative integer coordinates summing to the
    // resolution.
    auto emit = [&]() {
        Vec p(n);
        for (int i = 0; i < n; ++i)
            p[i] = static_cast<double>(coords[i]) / grid_resolution;
        Belief belief(std::move(p));
        const int action = controller.decide_at(belief);
        out.emplace_back(std::move(belief), action);
    };
    auto rec = [&](auto&& self, int coord, int remaining) -> void {
        if (coord == n - 1) {
            coords[coord] = remaining;
            emit();
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            coords[coord] = k;
            self(self, coord + 1, remaining - k);
        }
    };
    rec(rec, 0, grid_resolution);
    return out;
}

}  // namespace dualsmpc
