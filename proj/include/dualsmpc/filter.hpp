#pragma once

#include "dualsmpc/model.hpp"

namespace dualsmpc {

/// Prediction step: returns belief * transition[action].
Belief predict(const PomdpModel& model, const Belief& belief, int action);

/// P(observation | belief, action) for every observation; entries sum to one.
Vec observation_likelihoods(const PomdpModel& model, const Belief& belief, int action);

/// Measurement update of an already-predicted belief: componentwise product
/// with the observation column, renormalized. Throws ZeroLikelihoodError
/// when the observation has probability zero under the prediction.
Belief update(const PomdpModel& model, const Belief& predicted, int action,
              int observation);

/// Full filter step: update(predict(belief, action), action, observation).
Belief step(const PomdpModel& model, const Belief& belief, int action, int observation);

/// Index of the maximal belief entry; ties break toward the lowest index.
int map_state(const Belief& belief);

}  // namespace dualsmpc
