#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dualsmpc {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

/// Row-sum tolerance for probability vectors and matrices.
inline constexpr double kProbTolerance = 1e-9;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Optional human-readable names; empty vectors mean unnamed.
struct Labels {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
};

/// Finite POMDP with per-action data:
///   transition[a][i][j]  = P(x_{t+1}=j | x_t=i, u_t=a)
///   observation[a][j][o] = P(y_{t+1}=o | x_{t+1}=j, u_t=a)
///   stage_cost[a][i]     = cost of taking action a in state i
///   terminal_cost[i]     = cost of ending in state i
/// Costs are minimized throughout; there is no reward mode.
struct PomdpModel {
    int n_states = 0;
    int n_actions = 0;
    int n_observations = 0;
    std::vector<Mat> transition;
    std::vector<Mat> observation;
    std::vector<Vec> stage_cost;
    Vec terminal_cost;
    Labels labels;

    /// Name of state i, or its decimal index when unnamed.
    std::string state_name(int i) const;
    std::string action_name(int a) const;
    std::string observation_name(int o) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks dimensions, row stochasticity (within kProbTolerance) and cost
/// signs. Violations are returned as data; this never throws.
ValidationReport validate_model(const PomdpModel& model);

/// Divides every probability row by its sum when the sum is within
/// kProbTolerance of one, so downstream arithmetic sees rows summing to 1.
/// Rows further off are left untouched for validate_model to report.
void normalize_rows(PomdpModel& model);

/// Probability distribution over states. Entries are nonnegative and are
/// normalized to sum to one on construction. An all-zero input is rejected
/// rather than silently mapped to uniform: it signals an impossible
/// observation upstream.
class Belief {
public:
    explicit Belief(Vec probs);

    static Belief uniform(int n_states);
    static Belief point_mass(int n_states, int state);

    const Vec& probs() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }
    int size() const { return static_cast<int>(p_.size()); }

    bool operator==(const Belief& other) const { return p_ == other.p_; }

private:
    Vec p_;
};

enum class PruningMode { dominance_only, exact_lp };

/// Solver settings: horizon >= 0, discount in [0,1].
struct SolveConfig {
    int horizon = 6;
    double discount = 1.0;
    PruningMode pruning_mode = PruningMode::exact_lp;
    double prune_tolerance = 1e-9;
    /// Cap on the unpruned size of any single cross-sum product formed during
    /// backups. The default admits the built-in model at horizon 6, whose
    /// largest product is about 2.5e6 candidates.
    std::size_t max_cross_sum = 10000000;
};

/// Throws std::invalid_argument when the config is out of range.
void check_config(const SolveConfig& config);

/// Parameters of the infinite-horizon performance bound: gamma in [0,1],
/// eta >= 0. There are no defaults; callers must supply values.
struct BoundParams {
    double gamma;
    double eta;
};

void check_bound_params(const BoundParams& params);

/// Dot product of the belief with stage_cost[action].
double expected_stage_cost(const PomdpModel& model, const Belief& belief, int action);

/// Dot product of the belief with terminal_cost.
double terminal_value(const PomdpModel& model, const Belief& belief);

}  // namespace dualsmpc
