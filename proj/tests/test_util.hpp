#pragma once

// Seeded random models and beliefs shared by the unit and acceptance tests.

#include <cmath>

#include "dualsmpc/model.hpp"
#include "dualsmpc/rng.hpp"

namespace testutil {

using dualsmpc::Belief;
using dualsmpc::PomdpModel;
using dualsmpc::Vec;
using dualsmpc::Xoshiro256;

/// Uniform draw from the probability simplex via exponential spacings.
inline Vec random_prob_row(Xoshiro256& rng, int n) {
    Vec row(n);
    double total = 0.0;
    for (double& v : row) {
        v = -std::log(1.0 - rng.next_double());
        total += v;
    }
    for (double& v : row) v /= total;
    return row;
}

inline Belief random_belief(Xoshiro256& rng, int n) {
    return Belief(random_prob_row(rng, n));
}

/// Fully random dense model: stochastic rows, costs in [0, cost_scale).
inline PomdpModel random_model(Xoshiro256& rng, int n_states, int n_actions,
                               int n_observations, double cost_scale = 10.0) {
    PomdpModel m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.n_observations = n_observations;
    m.transition.resize(n_actions);
    m.observation.resize(n_actions);
    m.stage_cost.resize(n_actions);
    for (int a = 0; a < n_actions; ++a) {
        m.transition[a].resize(n_states);
        m.observation[a].resize(n_states);
        for (int i = 0; i < n_states; ++i)
            m.transition[a][i] = random_prob_row(rng, n_states);
        for (int j = 0; j < n_states; ++j)
            m.observation[a][j] = random_prob_row(rng, n_observations);
        m.stage_cost[a].resize(n_states);
        for (double& c : m.stage_cost[a]) c = cost_scale * rng.next_double();
    }
    m.terminal_cost.resize(n_states);
    for (double& c : m.terminal_cost) c = cost_scale * rng.next_double();
    return m;
}

}  // namespace testutil
