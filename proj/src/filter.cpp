#include "dualsmpc/filter.hpp"

#include <stdexcept>

#include "dualsmpc/errors.hpp"

namespace dualsmpc {

namespace {

void check_action(const PomdpModel& model, int action) {
    if (action < 0 || action >= model.n_actions)
        throw std::out_of_range("filter: action out of range");
}

void check_observation(const PomdpModel& model, int observation) {
    if (observation < 0 || observation >= model.n_observations)
        throw std::out_of_range("filter: observation out of range");
}

}  // namespace

Belief predict(const PomdpModel& model, const Belief& belief, int action) {
    check_action(model, action);
    const Mat& t = model.transition[action];
    Vec out(model.n_states, 0.0);
    for (int i = 0; i < model.n_states; ++i) {
        const double pi = belief[i];
        if (pi == 0.0) continue;
        for (int j = 0; j < model.n_states; ++j) out[j] += pi * t[i][j];
    }
    return Belief(std::move(out));
}

Vec observation_likelihoods(const PomdpModel& model, const Belief& belief, int action) {
    check_action(model, action);
    const Belief predicted = predict(model, belief, action);
    const Mat& o = model.observation[action];
    Vec out(model.n_observations, 0.0);
    for (int j = 0; j < model.n_states; ++j) {
        const double pj = predicted[j];
        if (pj == 0.0) continue;
        for (int th = 0; th < model.n_observations; ++th) out[th] += pj * o[j][th];
    }
    return out;
}

Belief update(const PomdpModel& model, const Belief& predicted, int action,
              int observation) {
    check_action(model, action);
    check_observation(model, observation);
    const Mat& o = model.observation[action];
    Vec post(model.n_states);
    double norm = 0.0;
    for (int j = 0; j < model.n_states; ++j) {
        post[j] = predicted[j] * o[j][observation];
        norm += post[j];
    }
    if (norm <= 0.0) {
        throw ZeroLikelihoodError("observation " + std::to_string(observation) +
                                  " has zero likelihood under the predicted belief");
    }
    // Belief's constructor performs the single normalizing division.
    return Belief(std::move(post));
}

Belief step(const PomdpModel& model, const Belief& belief, int action, int observation) {
    return update(model, predict(model, belief, action), action, observation);
}

int map_state(const Belief& belief) {
    int best = 0;
    for (int i = 1; i < belief.size(); ++i) {
        if (belief[i] > belief[best]) best = i;
    }
    return best;
}

}  // namespace dualsmpc
