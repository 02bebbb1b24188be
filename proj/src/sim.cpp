#include "dualsmpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dualsmpc/rng.hpp"
#include "dualsmpc/text.hpp"

namespace dualsmpc {

double SimTrace::cumulative_cost() const {
    double total = 0.0;
    double factor = 1.0;
    for (const SimStep& s : steps) {
        total += factor * s.stage_cost;
        factor *= discount;
    }
    return total;
}

double SimTrace::cumulative_cost_with_terminal() const {
    return cumulative_cost() +
           std::pow(discount, static_cast<double>(steps.size())) * terminal_cost;
}

SimTrace rollout(const Controller& controller, std::optional<int> initial_state,
                 int steps, std::uint64_t seed, const std::string& model_id) {
    if (steps < 0) throw std::invalid_argument("rollout: steps must be >= 0");
    const PomdpModel& model = controller.model();

    SimTrace trace;
    trace.model_id = model_id;
    trace.controller_id = controller_kind_name(controller.kind());
    trace.prng_id = Xoshiro256::kName;
    trace.seed = seed;
    trace.discount = controller.config().discount;

    Xoshiro256 rng(seed);
    int x;
    if (initial_state) {
        x = *initial_state;
        if (x < 0 || x >= model.n_states)
            throw std::out_of_range("rollout: initial state out of range");
    } else {
        x = sample_categorical(controller.belief().probs(), rng.next_double());
    }

    Controller ctl = controller;
    trace.steps.reserve(steps);
    for (int t = 0; t < steps; ++t) {
        const int a = ctl.decide();
        const double cost = model.stage_cost[a][x];
        const int x_next = sample_categorical(model.transition[a][x], rng.next_double());
        const int y = sample_categorical(model.observation[a][x_next], rng.next_double());
        trace.steps.push_back({t, x, a, y, ctl.belief(), cost});
        ctl = ctl.advance(a, y);
        x = x_next;
    }
    trace.final_state = x;
    trace.final_belief = ctl.belief();
    trace.terminal_cost = model.terminal_cost[x];
    return trace;
}

SimTrace rollout(const PomdpModel& model, ControllerKind kind, const SolveConfig& config,
                 const Belief& initial_belief, std::optional<int> initial_state,
                 int steps, std::uint64_t seed, const std::string& model_id) {
    const Controller ctl = Controller::init(std::make_shared<const PomdpModel>(model),
                                            config, kind, initial_belief);
    return rollout(ctl, initial_state, steps, seed, model_id);
}

BatchStats batch(const Controller& controller, std::optional<int> initial_state,
                 int steps, int n_rollouts, std::uint64_t base_seed) {
    if (n_rollouts < 1) throw std::invalid_argument("batch: n_rollouts must be >= 1");
    const PomdpModel& model = controller.model();

    BatchStats stats;
    stats.n_rollouts = n_rollouts;
    stats.steps = steps;
    stats.action_frequency.assign(model.n_actions, 0.0);
    stats.reach_probability.assign(model.n_states, 0.0);
    stats.per_seed_costs.reserve(n_rollouts);
    stats.per_seed_costs_with_terminal.reserve(n_rollouts);
    std::vector<long long> action_counts(model.n_actions, 0);
    std::vector<long long> reach_counts(model.n_states, 0);

    for (int k = 0; k < n_rollouts; ++k) {
        const SimTrace trace =
            rollout(controller, initial_state, steps, base_seed + static_cast<std::uint64_t>(k));
        stats.per_seed_costs.push_back(trace.cumulative_cost());
        stats.per_seed_costs_with_terminal.push_back(trace.cumulative_cost_with_terminal());

        std::vector<bool> visited(model.n_states, false);
        for (const SimStep& s : trace.steps) {
            ++action_counts[s.action];
            visited[s.true_state] = true;
        }
        visited[trace.final_state] = true;
        for (int i = 0; i < model.n_states; ++i)
            if (visited[i]) ++reach_counts[i];
    }

    auto mean_stddev = [](const Vec& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        if (xs.size() > 1) {
            for (double x : xs) var += (x - mean) * (x - mean);
            var /= static_cast<double>(xs.size() - 1);
        }
        return std::pair{mean, std::sqrt(var)};
    };
    std::tie(stats.mean_cost, stats.stddev_cost) = mean_stddev(stats.per_seed_costs);
    std::tie(stats.mean_cost_with_terminal, stats.stddev_cost_with_terminal) =
        mean_stddev(stats.per_seed_costs_with_terminal);

    const long long decisions = static_cast<long long>(n_rollouts) * steps;
    for (int a = 0; a < model.n_actions; ++a) {
        stats.action_frequency[a] =
            decisions > 0 ? static_cast<double>(action_counts[a]) / decisions : 0.0;
    }
    for (int i = 0; i < model.n_states; ++i)
        stats.reach_probability[i] = static_cast<double>(reach_counts[i]) / n_rollouts;
    return stats;
}

BatchStats batch(const PomdpModel& model, ControllerKind kind, const SolveConfig& config,
                 const Belief& initial_belief, std::optional<int> initial_state,
                 int steps, int n_rollouts, std::uint64_t base_seed) {
    const Controller ctl = Controller::init(std::make_shared<const PomdpModel>(model),
                                            config, kind, initial_belief);
    return batch(ctl, initial_state, steps, n_rollouts, base_seed);
}

BoundReport bound_report(const PomdpModel& model, const SolveConfig& config,
                         const BoundParams& bound, const Belief& initial_belief,
                         int n_rollouts, int min_steps, std::uint64_t seed) {
    check_bound_params(bound);
    if (config.discount >= 1.0)
        throw std::invalid_argument(
            "discount must be < 1 for infinite-horizon quantities");
    check_config(config);
    if (n_rollouts < 1)
        throw std::invalid_argument("bound_report: n_rollouts must be >= 1");

    double cmax = 0.0;
    for (const Vec& c : model.stage_cost)
        for (double v : c) cmax = std::max(cmax, v);

    // Smallest horizon whose discounted tail, cmax * a^T / (1-a), is <= 1e-6.
    const double alpha = config.discount;
    int tail_steps = 0;
    if (cmax > 0.0 && alpha > 0.0) {
        const double target = 1e-6 * (1.0 - alpha) / cmax;
        tail_steps = static_cast<int>(std::ceil(std::log(target) / std::log(alpha)));
        tail_steps = std::max(tail_steps, 0);
    } else if (cmax > 0.0) {
        tail_steps = 1;  // alpha == 0: everything after the first step is free
    }
    const int steps = std::max(min_steps, tail_steps);

    const Controller ctl = Controller::init(std::make_shared<const PomdpModel>(model),
                                            config, ControllerKind::dual, initial_belief);

    BoundReport report;
    report.alpha = alpha;
    report.gamma = bound.gamma;
    report.eta = bound.eta;
    report.j_design = evaluate(ctl.policy(), 0, initial_belief).value;
    report.truncation_steps = steps;
    report.truncation_error_bound =
        alpha > 0.0 ? cmax * std::pow(alpha, steps) / (1.0 - alpha) : 0.0;
    report.n_rollouts = n_rollouts;

    double total = 0.0;
    for (int k = 0; k < n_rollouts; ++k) {
        total += rollout(ctl, std::nullopt, steps, seed + static_cast<std::uint64_t>(k))
                     .cumulative_cost();
    }
    report.j_achieved_estimate = total / n_rollouts;
    report.lhs = (1.0 - alpha * bound.gamma) * report.j_achieved_estimate;
    report.rhs = report.j_design + alpha / (1.0 - alpha) * bound.eta;
    report.lhs_ok = report.lhs <= report.rhs;
    return report;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
    os << "# seed=" << trace.seed << " model=" << trace.model_id
       << " controller=" << trace.controller_id << " prng=" << trace.prng_id << "\n";
    os << "t,true_state,action,observation";
    const int n = trace.final_belief.size();
    for (int i = 0; i < n; ++i) os << ",belief_" << i;
    os << ",stage_cost\n";
    for (const SimStep& s : trace.steps) {
        os << s.t << ',' << s.true_state << ',' << s.action << ',' << s.observation;
        for (int i = 0; i < n; ++i) os << ',' << format_g17(s.belief[i]);
        os << ',' << format_g17(s.stage_cost) << '\n';
    }
    os << trace.steps.size() << ',' << trace.final_state << ",-1,-1";
    for (int i = 0; i < n; ++i) os << ',' << format_g17(trace.final_belief[i]);
    os << ',' << format_g17(trace.terminal_cost) << '\n';
}

std::string trace_csv(const SimTrace& trace) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    return os.str();
}

void write_batch_report(std::ostream& os, const BatchStats& stats,
                        const PomdpModel& model) {
    os << "n_rollouts=" << stats.n_rollouts << "\n";
    os << "steps=" << stats.steps << "\n";
    os << "mean_cost=" << format_shortest(stats.mean_cost) << "\n";
    os << "stddev_cost=" << format_shortest(stats.stddev_cost) << "\n";
    os << "mean_cost_with_terminal=" << format_shortest(stats.mean_cost_with_terminal)
       << "\n";
    os << "stddev_cost_with_terminal="
       << format_shortest(stats.stddev_cost_with_terminal) << "\n";
    for (int a = 0; a < model.n_actions; ++a) {
        os << "action_freq_" << model.action_name(a) << '='
           << format_shortest(stats.action_frequency[a]) << "\n";
    }
    for (int i = 0; i < model.n_states; ++i) {
        os << "reach_prob_" << model.state_name(i) << '='
           << format_shortest(stats.reach_probability[i]) << "\n";
    }
}

void write_batch_costs_csv(std::ostream& os, const BatchStats& stats,
                           std::uint64_t base_seed) {
    os << "seed,cost\n";
    for (std::size_t k = 0; k < stats.per_seed_costs.size(); ++k) {
        os << base_seed + k << ',' << format_g17(stats.per_seed_costs[k]) << '\n';
    }
}

}  // namespace dualsmpc
