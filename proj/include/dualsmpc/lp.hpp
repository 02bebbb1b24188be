#pragma once

#include "dualsmpc/model.hpp"

namespace dualsmpc::lp {

enum class Status { optimal, infeasible, unbounded };

enum class Relation { less_equal, greater_equal, equal };

struct Constraint {
    Vec coeffs;
    Relation rel;
    double rhs;
};

struct Result {
    Status status;
    double objective = 0.0;
    Vec x;
    /// One multiplier per constraint (the dual solution): the shadow price
    /// of relaxing that constraint's right-hand side. Zero for redundant
    /// rows dropped in phase 1. Only filled for optimal results.
    Vec duals;
};

/// Maximizes objective . x subject to the constraints and x >= 0, with a
/// dense two-phase tableau simplex. Pivoting uses Dantzig pricing and falls
/// back to Bland's rule after a degenerate stall, so the method terminates
/// even on cycling-prone problems.
Result maximize(const Vec& objective, const std::vector<Constraint>& constraints);

}  // namespace dualsmpc::lp
