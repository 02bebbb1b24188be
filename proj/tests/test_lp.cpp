#include "dualsmpc/lp.hpp"

#include "doctest.h"

using namespace dualsmpc;
using lp::Constraint;
using lp::Relation;
using lp::Status;

namespace {

Constraint row(Vec coeffs, Relation rel, double rhs) {
    return Constraint{std::move(coeffs), rel, rhs};
}

}  // namespace

TEST_CASE("two-constraint maximum with unique duals") {
    // max 3x + 2y  s.t.  x + y <= 4, x <= 2  ->  (2, 2), objective 10.
    const lp::Result r = lp::maximize({3.0, 2.0}, {row({1.0, 1.0}, Relation::less_equal, 4.0),
                                                   row({1.0, 0.0}, Relation::less_equal, 2.0)});
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.x[0] == doctest::Approx(2.0));
    CHECK(r.x[1] == doctest::Approx(2.0));
    REQUIRE(r.duals.size() == 2);
    CHECK(r.duals[0] == doctest::Approx(2.0));  // capacity row prices at y's coeff
    CHECK(r.duals[1] == doctest::Approx(1.0));
}

TEST_CASE("knapsack-style duals satisfy strong duality") {
    // max x1 + 2x2 + 3x3  s.t.  sum <= 10, x1 <= 5, x3 <= 4  ->  (0, 6, 4).
    const Vec obj{1.0, 2.0, 3.0};
    const std::vector<Constraint> cons{row({1.0, 1.0, 1.0}, Relation::less_equal, 10.0),
                                       row({1.0, 0.0, 0.0}, Relation::less_equal, 5.0),
                                       row({0.0, 0.0, 1.0}, Relation::less_equal, 4.0)};
    const lp::Result r = lp::maximize(obj, cons);
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(24.0));
    CHECK(r.x[0] == doctest::Approx(0.0));
    CHECK(r.x[1] == doctest::Approx(6.0));
    CHECK(r.x[2] == doctest::Approx(4.0));
    CHECK(r.duals[0] == doctest::Approx(2.0));
    CHECK(r.duals[1] == doctest::Approx(0.0));
    CHECK(r.duals[2] == doctest::Approx(1.0));
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < cons.size(); ++i) dual_obj += r.duals[i] * cons[i].rhs;
    CHECK(dual_obj == doctest::Approx(r.objective).epsilon(1e-12));
}

TEST_CASE("greater-equal rows carry nonpositive duals in a max problem") {
    // max -x - y  s.t.  x >= 1, y >= 2  ->  (1, 2), objective -3.
    const lp::Result r =
        lp::maximize({-1.0, -1.0}, {row({1.0, 0.0}, Relation::greater_equal, 1.0),
                                    row({0.0, 1.0}, Relation::greater_equal, 2.0)});
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(-3.0));
    CHECK(r.duals[0] == doctest::Approx(-1.0));
    CHECK(r.duals[1] == doctest::Approx(-1.0));
}

TEST_CASE("negative right-hand sides are handled and priced as written") {
    // max -x  s.t.  -x <= -1  (i.e. x >= 1)  ->  x = 1; raising the rhs by
    // eps relaxes the row, so its shadow price is +1.
    const lp::Result r = lp::maximize({-1.0}, {row({-1.0}, Relation::less_equal, -1.0)});
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(-1.0));
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("equality constraints price through their artificial column") {
    // max x  s.t.  x + y = 3, y <= 1  ->  x = 3 at y = 0.
    const lp::Result r = lp::maximize({1.0, 0.0}, {row({1.0, 1.0}, Relation::equal, 3.0),
                                                   row({0.0, 1.0}, Relation::less_equal, 1.0)});
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(3.0));
    CHECK(r.x[0] == doctest::Approx(3.0));
    CHECK(r.duals[0] == doctest::Approx(1.0));
    CHECK(r.duals[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasible systems are reported") {
    const lp::Result r = lp::maximize({1.0}, {row({1.0}, Relation::less_equal, 1.0),
                                              row({1.0}, Relation::greater_equal, 2.0)});
    CHECK(r.status == Status::infeasible);
}

TEST_CASE("unbounded directions are reported") {
    const lp::Result r = lp::maximize({1.0, 0.0}, {row({0.0, 1.0}, Relation::less_equal, 1.0)});
    CHECK(r.status == Status::unbounded);
}

TEST_CASE("Beale's cycling example terminates at its optimum") {
    // Classic degenerate instance that cycles under naive Dantzig pricing.
    const Vec obj{0.75, -150.0, 0.02, -6.0};
    const std::vector<Constraint> cons{
        row({0.25, -60.0, -1.0 / 25.0, 9.0}, Relation::less_equal, 0.0),
        row({0.50, -90.0, -1.0 / 50.0, 3.0}, Relation::less_equal, 0.0),
        row({0.0, 0.0, 1.0, 0.0}, Relation::less_equal, 1.0)};
    const lp::Result r = lp::maximize(obj, cons);
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(r.x[2] == doctest::Approx(1.0));
}

TEST_CASE("redundant equality rows get a zero dual instead of breaking") {
    // The second equality is the first one doubled; phase 1 drops it.
    const lp::Result r =
        lp::maximize({1.0, 1.0}, {row({1.0, 1.0}, Relation::equal, 2.0),
                                  row({2.0, 2.0}, Relation::equal, 4.0),
                                  row({1.0, 0.0}, Relation::less_equal, 1.5)});
    REQUIRE(r.status == Status::optimal);
    CHECK(r.objective == doctest::Approx(2.0));
    CHECK((r.duals[0] == doctest::Approx(0.0) || r.duals[1] == doctest::Approx(0.0)));
}
