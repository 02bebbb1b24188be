#include "dualsmpc/filter.hpp"

#include <cmath>

#include "doctest.h"
#include "dualsmpc/errors.hpp"
#include "dualsmpc/model_io.hpp"
#include "test_util.hpp"

using namespace dualsmpc;

TEST_CASE("prediction multiplies by the transition matrix") {
    const PomdpModel m = healthcare_model();
    const Belief from_stage1 = predict(m, Belief::point_mass(3, 0), 0);
    CHECK(from_stage1.probs() == Vec{0.8, 0.2, 0.0});

    // Treatment from certain stage 2: 75/25 regression split.
    const Belief treated = predict(m, Belief::point_mass(3, 1), 3);
    CHECK(treated[0] == doctest::Approx(0.75));
    CHECK(treated[1] == doctest::Approx(0.25));
    CHECK(treated[2] == 0.0);
}

TEST_CASE("hand-checked measurement update") {
    const PomdpModel m = healthcare_model();
    // Appointment from certain stage 1: predicted (0.8, 0.2, 0), obs1 has
    // likelihood 0.8*0.4 + 0.2*0.3 = 0.38, posterior (16/19, 3/19, 0).
    const Belief predicted = predict(m, Belief::point_mass(3, 0), 1);
    const Vec lik = observation_likelihoods(m, Belief::point_mass(3, 0), 1);
    CHECK(lik[0] == doctest::Approx(0.38).epsilon(1e-15));
    CHECK(lik[1] == doctest::Approx(0.32).epsilon(1e-15));
    CHECK(lik[2] == doctest::Approx(0.30).epsilon(1e-15));

    const Belief post = update(m, predicted, 1, 0);
    CHECK(post[0] == doctest::Approx(16.0 / 19.0).epsilon(1e-15));
    CHECK(post[1] == doctest::Approx(3.0 / 19.0).epsilon(1e-15));
    CHECK(post[2] == 0.0);

    // step() is the composition.
    const Belief stepped = step(m, Belief::point_mass(3, 0), 1, 0);
    CHECK(stepped == post);
}

TEST_CASE("diagnosis from a uniform belief returns the observation row") {
    const PomdpModel m = healthcare_model();
    const Belief post = step(m, Belief::uniform(3), 2, 0);
    CHECK(post[0] == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(post[1] == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(post[2] == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("posteriors mix back to the prediction") {
    const PomdpModel m = healthcare_model();
    Xoshiro256 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const Belief pi = testutil::random_belief(rng, 3);
        const int a = static_cast<int>(rng.next() % 4);
        const Belief predicted = predict(m, pi, a);
        const Vec lik = observation_likelihoods(m, pi, a);

        double lik_sum = 0.0;
        Vec mix(3, 0.0);
        for (int th = 0; th < 3; ++th) {
            lik_sum += lik[th];
            if (lik[th] <= 0.0) continue;
            const Belief post = update(m, predicted, a, th);
            for (int i = 0; i < 3; ++i) mix[i] += lik[th] * post[i];
        }
        CHECK(lik_sum == doctest::Approx(1.0).epsilon(1e-12));
        for (int i = 0; i < 3; ++i)
            CHECK(mix[i] == doctest::Approx(predicted[i]).epsilon(1e-12));
    }
}

TEST_CASE("impossible observations raise ZeroLikelihoodError") {
    PomdpModel m;
    m.n_states = 2;
    m.n_actions = 1;
    m.n_observations = 2;
    m.transition = {{{1.0, 0.0}, {0.0, 1.0}}};
    m.observation = {{{1.0, 0.0}, {0.0, 1.0}}};  // observation reveals the state
    m.stage_cost = {{0.0, 0.0}};
    m.terminal_cost = {0.0, 0.0};
    REQUIRE(validate_model(m).ok());

    const Belief at0 = Belief::point_mass(2, 0);
    CHECK_THROWS_AS(step(m, at0, 0, 1), ZeroLikelihoodError);
    CHECK(step(m, at0, 0, 0) == at0);
}

TEST_CASE("map_state breaks ties toward the lowest index") {
    CHECK(map_state(Belief(Vec{0.5, 0.5})) == 0);
    CHECK(map_state(Belief(Vec{0.2, 0.5, 0.3})) == 1);
    CHECK(map_state(Belief(Vec{0.3, 0.3, 0.4})) == 2);
    CHECK(map_state(Belief::uniform(3)) == 0);
}

TEST_CASE("stage-3 mass never decreases under the built-in dynamics") {
    const PomdpModel m = healthcare_model();
    Xoshiro256 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Belief pi = testutil::random_belief(rng, 3);
        const int a = static_cast<int>(rng.next() % 4);
        if (a == 3) continue;  // treatment is the one action meant to reduce it
        const Belief next = predict(m, pi, a);
        CHECK(next[2] >= pi[2] - 1e-12);
    }
}
