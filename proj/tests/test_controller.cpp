#include "dualsmpc/controller.hpp"

#include <memory>
#include <stdexcept>

#include "doctest.h"
#include "dualsmpc/filter.hpp"
#include "dualsmpc/model_io.hpp"

using namespace dualsmpc;

namespace {

std::shared_ptr<const PomdpModel> shared_healthcare() {
    return std::make_shared<const PomdpModel>(healthcare_model());
}

SolveConfig config_for(int horizon) {
    SolveConfig c;
    c.horizon = horizon;
    return c;
}

}  // namespace

TEST_CASE("controller kind names round-trip") {
    for (ControllerKind k :
         {ControllerKind::dual, ControllerKind::ce, ControllerKind::ce_vertex}) {
        CHECK(controller_kind_from_name(controller_kind_name(k)) == k);
    }
    CHECK(controller_kind_name(ControllerKind::ce_vertex) == "ce-vertex");
    CHECK_THROWS_AS(controller_kind_from_name("nonsense"), std::invalid_argument);
}

TEST_CASE("dual decisions follow the horizon-1 hand oracle") {
    const Controller ctl = Controller::init(shared_healthcare(), config_for(1),
                                            ControllerKind::dual, Belief::uniform(3));
    CHECK(ctl.decide_at(Belief::point_mass(3, 0)) == 0);  // skip when healthy
    CHECK(ctl.decide_at(Belief::point_mass(3, 1)) == 3);  // treat stage 2
    CHECK(ctl.decide_at(Belief::point_mass(3, 2)) == 1);  // appointment in stage 3
    CHECK(ctl.decide() == evaluate(ctl.policy(), 0, ctl.belief()).action);
}

TEST_CASE("certainty-equivalent control acts on the MAP state") {
    const Controller ctl = Controller::init(shared_healthcare(), config_for(6),
                                            ControllerKind::ce, Belief::uniform(3));
    // Frozen stage-0 MDP policy: skip / treatment / appointment.
    CHECK(ctl.decide_at(Belief(Vec{0.5, 0.3, 0.2})) == 0);
    CHECK(ctl.decide_at(Belief(Vec{0.2, 0.5, 0.3})) == 3);
    CHECK(ctl.decide_at(Belief(Vec{0.2, 0.3, 0.5})) == 1);
    // Ties pick the lowest state index.
    CHECK(ctl.decide_at(Belief::uniform(3)) == 0);
    CHECK(ctl.mdp_policy().action[0] == std::vector<int>{0, 3, 1});
    CHECK_THROWS_AS(ctl.policy(), std::logic_error);
}

TEST_CASE("vertex variant equals dual control at point masses") {
    const auto model = shared_healthcare();
    const SolveConfig cfg = config_for(2);
    const Controller dual =
        Controller::init(model, cfg, ControllerKind::dual, Belief::uniform(3));
    const Controller vertex =
        Controller::init(model, cfg, ControllerKind::ce_vertex, Belief::uniform(3));
    for (int s = 0; s < 3; ++s) {
        const Belief point = Belief::point_mass(3, s);
        CHECK(vertex.decide_at(point) == dual.decide_at(point));
    }
    // At the uniform belief the vertex variant collapses to the MAP vertex.
    CHECK(vertex.decide() == dual.decide_at(Belief::point_mass(3, 0)));
    CHECK_THROWS_AS(vertex.mdp_policy(), std::logic_error);
}

TEST_CASE("advance applies exactly one filter step") {
    const auto model = shared_healthcare();
    const Controller ctl = Controller::init(model, config_for(2), ControllerKind::dual,
                                            Belief::uniform(3));
    const Controller next = ctl.advance(1, 0);
    const Belief expected = step(*model, Belief::uniform(3), 1, 0);
    CHECK(next.belief() == expected);
    CHECK(next.kind() == ControllerKind::dual);
    // The original is untouched and the solved policy is shared.
    CHECK(ctl.belief() == Belief::uniform(3));
    CHECK(&next.policy() == &ctl.policy());
}

TEST_CASE("action map enumerates the belief grid lexicographically") {
    const Controller ctl = Controller::init(shared_healthcare(), config_for(1),
                                            ControllerKind::dual, Belief::uniform(3));
    const auto map = action_map(ctl, 2);
    REQUIRE(map.size() == 6);  // C(2 + 2, 2) barycentric points
    CHECK(map.front().first.probs() == Vec{0.0, 0.0, 1.0});
    CHECK(map.back().first.probs() == Vec{1.0, 0.0, 0.0});
    for (const auto& [belief, action] : map) {
        CHECK(action == ctl.decide_at(belief));
    }
    // Pure vertices repeat the hand oracle.
    CHECK(map.front().second == 1);
    CHECK(map.back().second == 0);
}
