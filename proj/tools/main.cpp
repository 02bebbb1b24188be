// Command-line front end: validate models, solve policies, inspect them,
// simulate closed-loop control and compare controllers.
//
// Exit codes: 0 success, 1 input error (bad flags, unreadable or malformed
// files), 2 model validation failure, 3 resource or runtime failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dualsmpc/controller.hpp"
#include "dualsmpc/errors.hpp"
#include "dualsmpc/model.hpp"
#include "dualsmpc/model_io.hpp"
#include "dualsmpc/sim.hpp"
#include "dualsmpc/solver.hpp"
#include "dualsmpc/text.hpp"

namespace {

using namespace dualsmpc;

/// User-input problems that are not model-validity failures; mapped to exit 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Loaded {
    PomdpModel model;
    std::optional<double> file_discount;
    std::optional<Vec> file_start;
    std::string id;  // model_id recorded in traces
};

Loaded load_model(const std::string& path, const std::string& builtin) {
    if (!builtin.empty() && !path.empty())
        throw InputError("give either a model file or --builtin, not both");
    if (!builtin.empty()) {
        if (builtin != "healthcare")
            throw InputError("unknown builtin model '" + builtin +
                             "' (available: healthcare)");
        return {healthcare_model(), std::nullopt, std::nullopt, "healthcare"};
    }
    if (path.empty())
        throw InputError("no model given; pass a .pomdp file or --builtin healthcare");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    ParseResult pr = parse_pomdp(in);
    for (const std::string& w : pr.warnings) std::cerr << "warning: " << w << '\n';
    return {std::move(pr.model), pr.discount, pr.start, path};
}

Vec parse_belief_csv(const std::string& text) {
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw InputError("belief entry '" + item + "' is not a number");
        }
        while (pos < item.size() &&
               std::isspace(static_cast<unsigned char>(item[pos])))
            ++pos;
        if (pos != item.size())
            throw InputError("belief entry '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw InputError("empty belief");
    return out;
}

/// Initial belief priority: explicit flag, then the file's start:
/// distribution, then uniform.
Belief initial_belief(const Loaded& loaded, const std::string& belief_flag) {
    if (!belief_flag.empty()) {
        Vec b = parse_belief_csv(belief_flag);
        if (static_cast<int>(b.size()) != loaded.model.n_states)
            throw InputError("belief has " + std::to_string(b.size()) +
                             " entries, the model has " +
                             std::to_string(loaded.model.n_states) + " states");
        return Belief(std::move(b));
    }
    if (loaded.file_start) return Belief(*loaded.file_start);
    return Belief::uniform(loaded.model.n_states);
}

struct SolveFlags {
    int horizon = 6;
    double discount = 1.0;
    bool discount_given = false;
    std::string prune = "exact_lp";
    double tolerance = 1e-9;
    std::size_t max_cross_sum = SolveConfig{}.max_cross_sum;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--horizon", f.horizon, "Planning horizon N (stages)")
        ->capture_default_str();
    cmd->add_option("--discount", f.discount,
                    "Discount factor in [0,1]; defaults to the file's discount: "
                    "directive, else 1")
        ->each([&f](const std::string&) { f.discount_given = true; });
    cmd->add_option("--prune", f.prune, "Pruning mode: exact_lp or dominance_only")
        ->capture_default_str();
    cmd->add_option("--tolerance", f.tolerance, "Pruning tolerance")
        ->capture_default_str();
    cmd->add_option("--max-cross-sum", f.max_cross_sum,
                    "Cap on unpruned cross-sum size during backups")
        ->capture_default_str();
}

SolveConfig make_config(const SolveFlags& f, const std::optional<double>& file_discount) {
    SolveConfig c;
    c.horizon = f.horizon;
    c.discount = f.discount_given ? f.discount : file_discount.value_or(1.0);
    if (f.prune == "exact_lp")
        c.pruning_mode = PruningMode::exact_lp;
    else if (f.prune == "dominance_only")
        c.pruning_mode = PruningMode::dominance_only;
    else
        throw InputError("unknown --prune mode '" + f.prune +
                         "' (exact_lp or dominance_only)");
    c.prune_tolerance = f.tolerance;
    c.max_cross_sum = f.max_cross_sum;
    check_config(c);
    return c;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    return f;
}

int cmd_validate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    ParseResult pr = parse_pomdp(in);
    for (const std::string& w : pr.warnings) std::cerr << "warning: " << w << '\n';
    const ValidationReport rep = validate_model(pr.model);
    if (!rep.ok()) {
        std::cout << "invalid\n";
        for (const std::string& v : rep.violations) std::cout << "violation: " << v << '\n';
        return 2;
    }
    std::cout << "ok\n";
    std::cout << "states=" << pr.model.n_states << '\n';
    std::cout << "actions=" << pr.model.n_actions << '\n';
    std::cout << "observations=" << pr.model.n_observations << '\n';
    if (pr.discount) std::cout << "discount=" << format_shortest(*pr.discount) << '\n';
    if (pr.start) {
        std::cout << "start=";
        for (std::size_t i = 0; i < pr.start->size(); ++i)
            std::cout << (i ? " " : "") << format_shortest((*pr.start)[i]);
        std::cout << '\n';
    }
    return 0;
}

int cmd_solve(const std::string& path, const std::string& builtin, const SolveFlags& flags,
              const std::string& out) {
    Loaded loaded = load_model(path, builtin);
    const SolveConfig cfg = make_config(flags, loaded.file_discount);
    const PolicyStack stack = solve(loaded.model, cfg);
    std::cout << "horizon=" << cfg.horizon << '\n';
    std::cout << "discount=" << format_shortest(cfg.discount) << '\n';
    std::cout << "stage0_vectors=" << stack.per_stage[0].vectors.size() << '\n';
    if (!out.empty()) {
        std::ofstream f = open_out(out);
        write_policy(f, stack);
        std::cout << "policy_written=" << out << '\n';
    }
    return 0;
}

int cmd_policy(const std::string& policy_path, const std::string& belief_str, int grid,
               bool grid_given, const std::string& path, const std::string& builtin,
               const std::string& out) {
    std::ifstream in(policy_path);
    if (!in) throw InputError("cannot open '" + policy_path + "'");
    const PolicyStack stack = read_policy(in);
    const int n = static_cast<int>(stack.per_stage.at(0).vectors.at(0).coeffs.size());

    std::optional<Loaded> loaded;
    if (!path.empty() || !builtin.empty()) {
        loaded = load_model(path, builtin);
        if (loaded->model.n_states != n)
            throw InputError("model has " + std::to_string(loaded->model.n_states) +
                             " states but the policy vectors have " + std::to_string(n) +
                             " coefficients");
    }
    auto action_label = [&](int a) -> std::string {
        if (a < 0) return "none";
        return loaded ? loaded->model.action_name(a) : std::to_string(a);
    };

    if (!belief_str.empty()) {
        Vec b = parse_belief_csv(belief_str);
        if (static_cast<int>(b.size()) != n)
            throw InputError("belief has " + std::to_string(b.size()) +
                             " entries, the policy expects " + std::to_string(n));
        const Evaluation e = evaluate(stack, 0, Belief(std::move(b)));
        std::cout << "value=" << format_shortest(e.value) << " action=" << action_label(e.action)
                  << '\n';
        return 0;
    }
    if (grid_given) {
        if (grid < 1) throw InputError("--grid resolution must be >= 1");
        std::ofstream file;
        if (!out.empty()) file = open_out(out);
        std::ostream& os = out.empty() ? std::cout : file;
        for (int i = 0; i < n; ++i) os << "belief_" << i << ',';
        os << "action\n";
        std::vector<int> coords(n, 0);
        auto emit = [&]() {
            Vec p(n);
            for (int i = 0; i < n; ++i) p[i] = static_cast<double>(coords[i]) / grid;
            const Evaluation e = evaluate(stack, 0, Belief(p));
            for (int i = 0; i < n; ++i) os << format_g17(p[i]) << ',';
            os << action_label(e.action) << '\n';
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
        rec(rec, 0, grid);
        if (!out.empty()) std::cout << "map_written=" << out << '\n';
        return 0;
    }
    throw InputError("pass --belief or --grid");
}

int cmd_simulate(const std::string& path, const std::string& builtin, const SolveFlags& flags,
                 const std::string& controller_name, const std::string& belief_str,
                 std::optional<int> init_state, int steps, int rollouts, std::uint64_t seed,
                 const std::string& trace_out, const std::string& costs_out) {
    Loaded loaded = load_model(path, builtin);
    const SolveConfig cfg = make_config(flags, loaded.file_discount);
    const Belief b0 = initial_belief(loaded, belief_str);
    const ControllerKind kind = controller_kind_from_name(controller_name);
    if (steps < 0) throw InputError("--steps must be >= 0");
    if (rollouts < 1) throw InputError("--rollouts must be >= 1");
    if (init_state && (*init_state < 0 || *init_state >= loaded.model.n_states))
        throw InputError("--initial-state out of range");

    auto mp = std::make_shared<const PomdpModel>(std::move(loaded.model));
    const Controller ctl = Controller::init(mp, cfg, kind, b0);

    if (rollouts == 1) {
        if (!costs_out.empty())
            throw InputError("--costs needs --rollouts > 1");
        const SimTrace trace = rollout(ctl, init_state, steps, seed, loaded.id);
        if (trace_out.empty()) {
            write_trace_csv(std::cout, trace);
        } else {
            std::ofstream f = open_out(trace_out);
            write_trace_csv(f, trace);
            std::cout << "trace_written=" << trace_out << '\n';
            std::cout << "cumulative_cost=" << format_shortest(trace.cumulative_cost()) << '\n';
            std::cout << "cumulative_cost_with_terminal="
                      << format_shortest(trace.cumulative_cost_with_terminal()) << '\n';
        }
        return 0;
    }
    if (!trace_out.empty())
        throw InputError("--trace records a single rollout; drop --rollouts");
    const BatchStats stats = batch(ctl, init_state, steps, rollouts, seed);
    std::cout << "controller=" << controller_kind_name(kind) << '\n';
    std::cout << "base_seed=" << seed << '\n';
    write_batch_report(std::cout, stats, *mp);
    if (!costs_out.empty()) {
        std::ofstream f = open_out(costs_out);
        write_batch_costs_csv(f, stats, seed);
        std::cout << "costs_written=" << costs_out << '\n';
    }
    return 0;
}

/// One-sided z threshold at significance 0.01.
constexpr double kZThreshold01 = 2.3263478740408408;

int cmd_compare(const std::string& path, const std::string& builtin, const SolveFlags& flags,
                const std::string& belief_str, int steps, int rollouts, std::uint64_t seed) {
    // Compare defaults to the built-in model so the reproduction needs no files.
    const std::string source_builtin =
        (path.empty() && builtin.empty()) ? std::string("healthcare") : builtin;
    Loaded loaded = load_model(path, source_builtin);
    const SolveConfig cfg = make_config(flags, loaded.file_discount);
    const Belief b0 = initial_belief(loaded, belief_str);
    if (steps < 0) throw InputError("--steps must be >= 0");
    if (rollouts < 2) throw InputError("--rollouts must be >= 2 for a comparison");

    auto mp = std::make_shared<const PomdpModel>(std::move(loaded.model));
    const Controller dual = Controller::init(mp, cfg, ControllerKind::dual, b0);
    const Controller ce = Controller::init(mp, cfg, ControllerKind::ce, b0);
    // Common random numbers: both batches replay seeds seed..seed+rollouts-1,
    // so state and observation draws coincide until the policies diverge.
    const BatchStats sd = batch(dual, std::nullopt, steps, rollouts, seed);
    const BatchStats sc = batch(ce, std::nullopt, steps, rollouts, seed);

    std::cout << "base_seed=" << seed << '\n';
    std::cout << "controller=dual\n";
    write_batch_report(std::cout, sd, *mp);
    std::cout << "controller=ce\n";
    write_batch_report(std::cout, sc, *mp);

    // When the run length is a multiple of the horizon, the truncated runs are
    // comparable to a design objective, so the paired comparison charges the
    // discounted terminal cost at the final state; otherwise it uses the plain
    // stage-cost sums. Both totals are always present in the batch reports.
    const bool add_terminal = cfg.horizon > 0 && steps % cfg.horizon == 0;
    const Vec& costs_d = add_terminal ? sd.per_seed_costs_with_terminal : sd.per_seed_costs;
    const Vec& costs_c = add_terminal ? sc.per_seed_costs_with_terminal : sc.per_seed_costs;
    const double mean_d = add_terminal ? sd.mean_cost_with_terminal : sd.mean_cost;
    const double mean_c = add_terminal ? sc.mean_cost_with_terminal : sc.mean_cost;

    const int n = rollouts;
    double mean = 0.0;
    for (int k = 0; k < n; ++k) mean += costs_c[k] - costs_d[k];
    mean /= n;
    double var = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = costs_c[k] - costs_d[k] - mean;
        var += d * d;
    }
    var /= (n - 1);
    const double se = std::sqrt(var / n);
    double z = 0.0;
    if (se > 0.0)
        z = mean / se;
    else if (mean != 0.0)
        z = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();

    std::cout << "cost_basis=" << (add_terminal ? "with_terminal" : "without_terminal") << '\n';
    std::cout << "paired_mean_cost_difference=" << format_shortest(mean) << '\n';
    std::cout << "paired_stddev=" << format_shortest(std::sqrt(var)) << '\n';
    std::cout << "paired_z=" << format_shortest(z) << '\n';
    std::cout << "z_threshold_0.01=" << format_shortest(kZThreshold01) << '\n';
    std::cout << "dual_mean_lower=" << (mean_d < mean_c ? "true" : "false") << '\n';
    std::cout << "dual_significant_at_0.01=" << (z > kZThreshold01 ? "true" : "false") << '\n';
    const int last = mp->n_states - 1;
    std::cout << "dual_reach_" << mp->state_name(last)
              << "_lower=" << (sd.reach_probability[last] < sc.reach_probability[last] ? "true" : "false")
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Finite-horizon POMDP solving, receding-horizon dual control and simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dualsmpc 0.1.0");

    std::string v_path;
    CLI::App* validate = app.add_subcommand("validate", "Parse a .pomdp file and report validity");
    validate->add_option("path", v_path, "Model file")->required();

    std::string s_path, s_builtin, s_out;
    SolveFlags s_flags;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the finite-horizon policy");
    solve_cmd->add_option("path", s_path, "Model file");
    solve_cmd->add_option("--builtin", s_builtin, "Built-in model name (healthcare)");
    add_solve_flags(solve_cmd, s_flags);
    solve_cmd->add_option("--out", s_out, "Write the policy stack to this file");

    std::string p_policy, p_belief, p_path, p_builtin, p_out;
    int p_grid = 0;
    CLI::App* policy_cmd = app.add_subcommand("policy", "Query a solved policy file");
    policy_cmd->add_option("--policy", p_policy, "Policy file from solve --out")->required();
    CLI::Option* p_belief_opt =
        policy_cmd->add_option("--belief", p_belief, "Comma-separated belief to evaluate");
    CLI::Option* p_grid_opt =
        policy_cmd->add_option("--grid", p_grid, "Emit the action map CSV at this resolution");
    p_belief_opt->excludes(p_grid_opt);
    policy_cmd->add_option("path", p_path, "Model file (for action names)");
    policy_cmd->add_option("--builtin", p_builtin, "Built-in model name (for action names)");
    policy_cmd->add_option("--out", p_out, "Write the grid CSV to this file");

    std::string m_path, m_builtin, m_controller = "dual", m_belief, m_trace, m_costs;
    SolveFlags m_flags;
    int m_steps = 30, m_rollouts = 1, m_init_state = 0;
    std::uint64_t m_seed = 1;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Closed-loop rollouts of a controller");
    sim_cmd->add_option("path", m_path, "Model file");
    sim_cmd->add_option("--builtin", m_builtin, "Built-in model name (healthcare)");
    add_solve_flags(sim_cmd, m_flags);
    sim_cmd->add_option("--controller", m_controller, "dual, ce or ce-vertex")
        ->capture_default_str();
    sim_cmd->add_option("--belief", m_belief, "Initial belief (comma-separated)");
    CLI::Option* m_init_opt = sim_cmd->add_option(
        "--initial-state", m_init_state, "Fix the hidden initial state instead of drawing it");
    sim_cmd->add_option("--steps", m_steps, "Closed-loop steps per rollout")
        ->capture_default_str();
    sim_cmd->add_option("--rollouts", m_rollouts, "Number of rollouts")->capture_default_str();
    sim_cmd->add_option("--seed", m_seed, "Base seed")->capture_default_str();
    sim_cmd->add_option("--trace", m_trace, "Write the single-rollout trace CSV here");
    sim_cmd->add_option("--costs", m_costs, "Write the per-seed cost CSV here");

    std::string c_path, c_builtin, c_belief;
    SolveFlags c_flags;
    int c_steps = 30, c_rollouts = 1000;
    std::uint64_t c_seed = 1;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Dual vs certainty-equivalent control, common seeds");
    compare_cmd->add_option("path", c_path, "Model file");
    compare_cmd->add_option("--builtin", c_builtin, "Built-in model name (default healthcare)");
    add_solve_flags(compare_cmd, c_flags);
    compare_cmd->add_option("--belief", c_belief, "Initial belief (comma-separated)");
    compare_cmd->add_option("--steps", c_steps, "Closed-loop steps per rollout")
        ->capture_default_str();
    compare_cmd->add_option("--rollouts", c_rollouts, "Number of rollouts per controller")
        ->capture_default_str();
    compare_cmd->add_option("--seed", c_seed, "Base seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*validate) return cmd_validate(v_path);
        if (*solve_cmd) return cmd_solve(s_path, s_builtin, s_flags, s_out);
        if (*policy_cmd)
            return cmd_policy(p_policy, p_belief, p_grid, p_grid_opt->count() > 0, p_path,
                              p_builtin, p_out);
        if (*sim_cmd) {
            std::optional<int> init;
            if (m_init_opt->count() > 0) init = m_init_state;
            return cmd_simulate(m_path, m_builtin, m_flags, m_controller, m_belief, init,
                                m_steps, m_rollouts, m_seed, m_trace, m_costs);
        }
        if (*compare_cmd)
            return cmd_compare(c_path, c_builtin, c_flags, c_belief, c_steps, c_rollouts,
                               c_seed);
        return 1;  // unreachable with require_subcommand(1)
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        const bool semantic = e.kind() == ParseError::Kind::stochasticity ||
                              e.kind() == ParseError::Kind::value;
        return semantic ? 2 : 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cerr << "Try a smaller --horizon, a coarser model, or a larger --max-cross-sum.\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
