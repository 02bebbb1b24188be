#pragma once

#include <stdexcept>
#include <string>

namespace dualsmpc {

/// Posterior normalizer was zero: the received observation has probability
/// zero under the predicted belief. In simulation this indicates an
/// inconsistency between the model and the data stream, so it is a hard error.
class ZeroLikelihoodError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exact-solver intermediate (cross-sum or belief tree) exceeded its
/// configured size cap. The instance is too large for exact solving.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The witness linear program failed numerically while pruning.
class LpFailureError : public std::runtime_error {
public:
    LpFailureError(const std::string& what, int vector_index)
        : std::runtime_error(what), vector_index_(vector_index) {}

    /// Index of the alpha vector whose witness LP failed.
    int vector_index() const { return vector_index_; }

private:
    int vector_index_;
};

}  // namespace dualsmpc
