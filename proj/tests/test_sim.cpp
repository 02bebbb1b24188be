#include "dualsmpc/sim.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "dualsmpc/model_io.hpp"
#include "dualsmpc/rng.hpp"

using namespace dualsmpc;

namespace {

SolveConfig config_for(int horizon, double discount = 1.0) {
    SolveConfig c;
    c.horizon = horizon;
    c.discount = discount;
    return c;
}

/// Two states that swap deterministically, observations that reveal the next
/// state, costs 1 and 2: every rollout quantity is computable by hand.
PomdpModel cycle_model() {
    PomdpModel m;
    m.n_states = 2;
    m.n_actions = 1;
    m.n_observations = 2;
    m.transition = {{{0.0, 1.0}, {1.0, 0.0}}};
    m.observation = {{{1.0, 0.0}, {0.0, 1.0}}};
    m.stage_cost = {{1.0, 2.0}};
    m.terminal_cost = {0.0, 10.0};
    return m;
}

}  // namespace

TEST_CASE("PRNG matches the published xoshiro256** sequence") {
    // Reference values computed independently from the xoshiro256** 1.0 and
    // splitmix64 specifications.
    Xoshiro256 a(1);
    CHECK(a.next() == 12966619160104079557ull);
    CHECK(a.next() == 9600361134598540522ull);
    CHECK(a.next() == 10590380919521690900ull);
    CHECK(a.next() == 7218738570589545383ull);

    Xoshiro256 b(42);
    CHECK(b.next() == 1546998764402558742ull);
    CHECK(b.next() == 6990951692964543102ull);

    Xoshiro256 c(42);
    CHECK(c.next_double() == doctest::Approx(0.08386297105988216).epsilon(1e-16));
    CHECK(c.next_double() == doctest::Approx(0.3789802506626686).epsilon(1e-16));
    Xoshiro256 d(1);
    CHECK(d.next_double() == doctest::Approx(0.7029218331588505).epsilon(1e-16));
}

TEST_CASE("categorical sampling walks the CDF and skips zeros") {
    const Vec probs{0.5, 0.0, 0.5};
    CHECK(sample_categorical(probs, 0.0) == 0);
    CHECK(sample_categorical(probs, 0.49) == 0);
    CHECK(sample_categorical(probs, 0.5) == 2);
    CHECK(sample_categorical(probs, 0.999999) == 2);
    CHECK(sample_categorical(Vec{0.0, 0.0, 1.0}, 0.0) == 2);
    // Rounding slack at the top falls to the last positive entry.
    CHECK(sample_categorical(Vec{0.3, 0.7 - 1e-12}, 0.9999999999999) == 1);
    CHECK_THROWS_AS(sample_categorical(Vec{0.0, 0.0}, 0.5), std::invalid_argument);
}

TEST_CASE("deterministic rollout reproduces the hand trace") {
    const PomdpModel m = cycle_model();
    const SimTrace trace =
        rollout(m, ControllerKind::dual, config_for(1), Belief::point_mass(2, 0), 0, 2, 7,
                "cycle");
    CHECK(trace.model_id == "cycle");
    CHECK(trace.controller_id == "dual");
    CHECK(trace.prng_id == "xoshiro256ss-1.0");
    CHECK(trace.seed == 7);
    REQUIRE(trace.steps.size() == 2);
    CHECK(trace.steps[0].true_state == 0);
    CHECK(trace.steps[0].observation == 1);
    CHECK(trace.steps[0].stage_cost == 1.0);
    CHECK(trace.steps[1].true_state == 1);
    CHECK(trace.steps[1].observation == 0);
    CHECK(trace.steps[1].stage_cost == 2.0);
    CHECK(trace.final_state == 0);
    CHECK(trace.terminal_cost == 0.0);
    CHECK(trace.cumulative_cost() == 3.0);
    CHECK(trace.cumulative_cost_with_terminal() == 3.0);

    const std::string expected =
        "# seed=7 model=cycle controller=dual prng=xoshiro256ss-1.0\n"
        "t,true_state,action,observation,belief_0,belief_1,stage_cost\n"
        "0,0,0,1,1,0,1\n"
        "1,1,0,0,0,1,2\n"
        "2,0,-1,-1,1,0,0\n";
    CHECK(trace_csv(trace) == expected);
}

TEST_CASE("rollouts are bit-reproducible per seed") {
    const PomdpModel m = healthcare_model();
    const SolveConfig cfg = config_for(2);
    const auto shared = std::make_shared<const PomdpModel>(m);
    const Controller ctl =
        Controller::init(shared, cfg, ControllerKind::dual, Belief::uniform(3));

    const SimTrace t1 = rollout(ctl, std::nullopt, 12, 5);
    const SimTrace t2 = rollout(ctl, std::nullopt, 12, 5);
    CHECK(trace_csv(t1) == trace_csv(t2));

    const SimTrace t3 = rollout(ctl, std::nullopt, 12, 6);
    CHECK(trace_csv(t1) != trace_csv(t3));

    // The convenience overload solves an identical policy.
    const SimTrace t4 =
        rollout(m, ControllerKind::dual, cfg, Belief::uniform(3), std::nullopt, 12, 5);
    CHECK(trace_csv(t4) == trace_csv(t1));
}

TEST_CASE("discounting weights the realized costs") {
    const PomdpModel m = healthcare_model();
    const SimTrace trace = rollout(m, ControllerKind::ce, config_for(3, 0.9),
                                   Belief::uniform(3), 1, 8, 3);
    double expected = 0.0;
    double factor = 1.0;
    for (const SimStep& s : trace.steps) {
        expected += factor * s.stage_cost;
        factor *= 0.9;
    }
    CHECK(trace.cumulative_cost() == doctest::Approx(expected).epsilon(1e-15));
    CHECK(trace.cumulative_cost_with_terminal() ==
          doctest::Approx(expected + factor * trace.terminal_cost).epsilon(1e-15));
}

TEST_CASE("batches aggregate per-seed rollouts in order") {
    const PomdpModel m = healthcare_model();
    const SolveConfig cfg = config_for(2);
    const auto shared = std::make_shared<const PomdpModel>(m);
    const Controller ctl =
        Controller::init(shared, cfg, ControllerKind::ce, Belief::uniform(3));

    const BatchStats stats = batch(ctl, std::nullopt, 5, 8, 100);
    REQUIRE(stats.per_seed_costs.size() == 8);
    REQUIRE(stats.per_seed_costs_with_terminal.size() == 8);
    CHECK(stats.n_rollouts == 8);
    CHECK(stats.steps == 5);

    double mean = 0.0;
    for (double c : stats.per_seed_costs) mean += c;
    mean /= 8.0;
    CHECK(stats.mean_cost == doctest::Approx(mean).epsilon(1e-15));
    double mean_wt = 0.0;
    for (double c : stats.per_seed_costs_with_terminal) mean_wt += c;
    mean_wt /= 8.0;
    CHECK(stats.mean_cost_with_terminal == doctest::Approx(mean_wt).epsilon(1e-15));

    for (int k = 0; k < 8; ++k) {
        const SimTrace t = rollout(ctl, std::nullopt, 5, 100 + k);
        CHECK(stats.per_seed_costs[k] == t.cumulative_cost());
        CHECK(stats.per_seed_costs_with_terminal[k] == t.cumulative_cost_with_terminal());
    }

    double freq = 0.0;
    for (double f : stats.action_frequency) {
        CHECK(f >= 0.0);
        freq += f;
    }
    CHECK(freq == doctest::Approx(1.0).epsilon(1e-12));
    for (double r : stats.reach_probability) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }

    const BatchStats again =
        batch(m, ControllerKind::ce, cfg, Belief::uniform(3), std::nullopt, 5, 8, 100);
    CHECK(again.per_seed_costs == stats.per_seed_costs);
}

TEST_CASE("bound report arithmetic and truncation policy") {
    const PomdpModel m = healthcare_model();
    const SolveConfig cfg = config_for(3, 0.95);
    const BoundParams params{1.0, 5.0};
    const BoundReport r = bound_report(m, cfg, params, Belief::uniform(3), 3, 1, 9);

    // cmax = 5, so the 1e-6 tail needs ceil(log(1e-8)/log(0.95)) = 360 steps.
    CHECK(r.truncation_steps == 360);
    CHECK(r.truncation_error_bound ==
          doctest::Approx(5.0 * std::pow(0.95, 360) / 0.05).epsilon(1e-12));
    CHECK(r.truncation_error_bound <= 1e-6);
    CHECK(r.alpha == 0.95);
    CHECK(r.gamma == 1.0);
    CHECK(r.eta == 5.0);
    CHECK(r.n_rollouts == 3);
    CHECK(r.lhs ==
          doctest::Approx((1.0 - 0.95 * 1.0) * r.j_achieved_estimate).epsilon(1e-15));
    CHECK(r.rhs == doctest::Approx(r.j_design + 0.95 / 0.05 * 5.0).epsilon(1e-12));
    CHECK(r.lhs_ok == (r.lhs <= r.rhs));

    // A longer floor wins over the tail rule.
    const BoundReport longer = bound_report(m, cfg, params, Belief::uniform(3), 1, 400, 9);
    CHECK(longer.truncation_steps == 400);

    SUBCASE("undiscounted models are rejected") {
        CHECK_THROWS_AS(bound_report(m, config_for(3, 1.0), params, Belief::uniform(3), 1,
                                     1, 9),
                        std::invalid_argument);
    }
}

TEST_CASE("batch report and cost table formats") {
    const PomdpModel m = healthcare_model();
    const BatchStats stats = batch(m, ControllerKind::ce, config_for(2),
                                   Belief::uniform(3), std::nullopt, 4, 3, 50);
    std::ostringstream report;
    write_batch_report(report, stats, m);
    const std::string text = report.str();
    CHECK(text.find("n_rollouts=3\n") != std::string::npos);
    CHECK(text.find("steps=4\n") != std::string::npos);
    CHECK(text.find("mean_cost=") != std::string::npos);
    CHECK(text.find("action_freq_treatment=") != std::string::npos);
    CHECK(text.find("reach_prob_stage3=") != std::string::npos);

    std::ostringstream costs;
    write_batch_costs_csv(costs, stats, 50);
    const std::string table = costs.str();
    CHECK(table.substr(0, 10) == "seed,cost\n");
    CHECK(table.find("\n50,") != std::string::npos);
    CHECK(table.find("\n52,") != std::string::npos);
}
