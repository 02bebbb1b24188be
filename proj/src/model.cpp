#include "dualsmpc/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace dualsmpc {

namespace {

std::string name_or_index(const std::vector<std::string>& names, int i) {
    if (i >= 0 && i < static_cast<int>(names.size())) return names[i];
    return std::to_string(i);
}

// Appends row-stochasticity violations for one per-action matrix family.
void check_matrix(const std::vector<Mat>& mats, const char* what, int n_actions,
                  int n_rows, int n_cols, std::vector<std::string>& out) {
    if (static_cast<int>(mats.size()) != n_actions) {
        std::ostringstream os;
        os << what << ": " << mats.size() << " matrices, expected " << n_actions;
        out.push_back(os.str());
        return;
    }
    for (int a = 0; a < n_actions; ++a) {
        const Mat& m = mats[a];
        if (static_cast<int>(m.size()) != n_rows) {
            std::ostringstream os;
            os << what << "[" << a << "]: " << m.size() << " rows, expected " << n_rows;
            out.push_back(os.str());
            continue;
        }
        for (int i = 0; i < n_rows; ++i) {
            const Vec& row = m[i];
            if (static_cast<int>(row.size()) != n_cols) {
                std::ostringstream os;
                os << what << "[" << a << "] row " << i << ": " << row.size()
                   << " entries, expected " << n_cols;
                out.push_back(os.str());
                continue;
            }
            double sum = 0.0;
            bool bad_entry = false;
            for (int j = 0; j < n_cols; ++j) {
                if (!std::isfinite(row[j]) || row[j] < 0.0) {
                    std::ostringstream os;
                    os << what << "[" << a << "][" << i << "][" << j << "] = " << row[j]
                       << " is not a probability";
                    out.push_back(os.str());
                    bad_entry = true;
                }
                sum += row[j];
            }
            if (!bad_entry && std::abs(sum - 1.0) > kProbTolerance) {
                std::ostringstream os;
                os.precision(17);
                os << what << "[" << a << "] row " << i << " sum " << sum << " != 1";
                out.push_back(os.str());
            }
        }
    }
}

}  // namespace

std::string PomdpModel::state_name(int i) const { return name_or_index(labels.states, i); }
std::string PomdpModel::action_name(int a) const { return name_or_index(labels.actions, a); }
std::string PomdpModel::observation_name(int o) const {
    return name_or_index(labels.observations, o);
}

ValidationReport validate_model(const PomdpModel& model) {
    ValidationReport report;
    auto& v = report.violations;

    if (model.n_states <= 0) v.push_back("n_states must be positive");
    if (model.n_actions <= 0) v.push_back("n_actions must be positive");
    if (model.n_observations <= 0) v.push_back("n_observations must be positive");
    if (!v.empty()) return report;

    check_matrix(model.transition, "transition", model.n_actions, model.n_states,
                 model.n_states, v);
    check_matrix(model.observation, "observation", model.n_actions, model.n_states,
                 model.n_observations, v);

    if (static_cast<int>(model.stage_cost.size()) != model.n_actions) {
        v.push_back("stage_cost: " + std::to_string(model.stage_cost.size()) +
                    " vectors, expected " + std::to_string(model.n_actions));
    } else {
        for (int a = 0; a < model.n_actions; ++a) {
            const Vec& c = model.stage_cost[a];
            if (static_cast<int>(c.size()) != model.n_states) {
                v.push_back("stage_cost[" + std::to_string(a) + "]: " +
                            std::to_string(c.size()) + " entries, expected " +
                            std::to_string(model.n_states));
                continue;
            }
            for (int i = 0; i < model.n_states; ++i) {
                if (!std::isfinite(c[i]) || c[i] < 0.0) {
                    std::ostringstream os;
                    os << "stage_cost[" << a << "][" << i << "] = " << c[i]
                       << " is not a finite nonnegative cost";
                    v.push_back(os.str());
                }
            }
        }
    }

    if (static_cast<int>(model.terminal_cost.size()) != model.n_states) {
        v.push_back("terminal_cost: " + std::to_string(model.terminal_cost.size()) +
                    " entries, expected " + std::to_string(model.n_states));
    } else {
        for (int i = 0; i < model.n_states; ++i) {
            if (!std::isfinite(model.terminal_cost[i]) || model.terminal_cost[i] < 0.0) {
                std::ostringstream os;
                os << "terminal_cost[" << i << "] = " << model.terminal_cost[i]
                   << " is not a finite nonnegative cost";
                v.push_back(os.str());
            }
        }
    }

    for (const auto& [names, count, what] :
         {std::tuple{&model.labels.states, model.n_states, "state"},
          std::tuple{&model.labels.actions, model.n_actions, "action"},
          std::tuple{&model.labels.observations, model.n_observations, "observation"}}) {
        if (!names->empty() && static_cast<int>(names->size()) != count) {
            v.push_back(std::string(what) + " labels: " + std::to_string(names->size()) +
                        " names, expected " + std::to_string(count));
        }
    }

    return report;
}

void normalize_rows(PomdpModel& model) {
    auto fix = [](Mat& m) {
        for (Vec& row : m) {
            double sum = 0.0;
            for (double p : row) sum += p;
            if (sum != 1.0 && std::abs(sum - 1.0) <= kProbTolerance && sum > 0.0) {
                for (double& p : row) p /= sum;
            }
        }
    };
    for (Mat& m : model.transition) fix(m);
    for (Mat& m : model.observation) fix(m);
}

Belief::Belief(Vec probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("belief: empty vector");
    double sum = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (!std::isfinite(p_[i]) || p_[i] < 0.0) {
            throw std::invalid_argument("belief: entry " + std::to_string(i) +
                                        " is negative or not finite");
        }
        sum += p_[i];
    }
    if (sum <= 0.0) throw std::invalid_argument("belief: all entries are zero");
    if (sum != 1.0) {
        for (double& p : p_) p /= sum;
    }
}

Belief Belief::uniform(int n_states) {
    return Belief(Vec(n_states, 1.0 / n_states));
}

Belief Belief::point_mass(int n_states, int state) {
    if (state < 0 || state >= n_states)
        throw std::out_of_range("point_mass: state out of range");
    Vec p(n_states, 0.0);
    p[state] = 1.0;
    return Belief(std::move(p));
}

void check_config(const SolveConfig& config) {
    if (config.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (!(config.discount >= 0.0 && config.discount <= 1.0))
        throw std::invalid_argument("discount must be in [0,1]");
    if (config.prune_tolerance < 0.0)
        throw std::invalid_argument("prune_tolerance must be >= 0");
}

void check_bound_params(const BoundParams& params) {
    if (!(params.gamma >= 0.0 && params.gamma <= 1.0))
        throw std::invalid_argument("gamma must be in [0,1]");
    if (!(params.eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
}

double expected_stage_cost(const PomdpModel& model, const Belief& belief, int action) {
    if (action < 0 || action >= model.n_actions)
        throw std::out_of_range("expected_stage_cost: action out of range");
    return dot(belief.probs(), model.stage_cost[action]);
}

double terminal_value(const PomdpModel& model, const Belief& belief) {
    return dot(belief.probs(), model.terminal_cost);
}

}  // namespace dualsmpc
