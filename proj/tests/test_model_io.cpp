#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dualsmpc/model_io.hpp"
#include "dualsmpc/solver.hpp"
#include "test_util.hpp"

using namespace dualsmpc;

namespace {

std::string data_path(const std::string& name) {
    return std::string(DUALSMPC_DATA_DIR) + "/" + name;
}

ParseResult parse_file(const std::string& name) {
    std::ifstream in(data_path(name));
    REQUIRE(in.good());
    return parse_pomdp(in);
}

void check_same_tables(const PomdpModel& a, const PomdpModel& b, double tol) {
    REQUIRE(a.n_states == b.n_states);
    REQUIRE(a.n_actions == b.n_actions);
    REQUIRE(a.n_observations == b.n_observations);
    for (int u = 0; u < a.n_actions; ++u) {
        for (int i = 0; i < a.n_states; ++i) {
            for (int j = 0; j < a.n_states; ++j)
                CHECK(std::abs(a.transition[u][i][j] - b.transition[u][i][j]) <= tol);
            for (int o = 0; o < a.n_observations; ++o)
                CHECK(std::abs(a.observation[u][i][o] - b.observation[u][i][o]) <= tol);
            CHECK(std::abs(a.stage_cost[u][i] - b.stage_cost[u][i]) <= tol);
        }
    }
    for (int i = 0; i < a.n_states; ++i)
        CHECK(std::abs(a.terminal_cost[i] - b.terminal_cost[i]) <= tol);
}

}  // namespace

TEST_CASE("golden healthcare file matches the built-in model") {
    const ParseResult r = parse_file("healthcare.pomdp");
    const PomdpModel builtin = healthcare_model();

    check_same_tables(r.model, builtin, 1e-12);
    CHECK(r.model.labels.states ==
          std::vector<std::string>{"stage1", "stage2", "stage3"});
    CHECK(r.model.labels.actions ==
          std::vector<std::string>{"skip", "appointment", "diagnose", "treatment"});
    CHECK(r.model.labels.observations ==
          std::vector<std::string>{"obs1", "obs2", "obs3"});

    REQUIRE(r.discount.has_value());
    CHECK(*r.discount == 1.0);
    REQUIRE(r.start.has_value());
    REQUIRE(r.start->size() == 3);
    for (double p : *r.start) CHECK(std::abs(p - 1.0 / 3.0) <= 1e-12);
    CHECK(r.warnings.empty());
    CHECK(validate_model(r.model).ok());
}

TEST_CASE("malformed files raise the documented error classes") {
    struct Expected {
        const char* file;
        ParseError::Kind kind;
        int line;
        int column;
    };
    const Expected cases[] = {
        {"malformed/bad_number.pomdp", ParseError::Kind::syntax, 2, 11},
        {"malformed/duplicate_states.pomdp", ParseError::Kind::duplicate, 5, 1},
        {"malformed/index_out_of_range.pomdp", ParseError::Kind::dimension, 7, 8},
        {"malformed/matrix_short_row.pomdp", ParseError::Kind::dimension, 9, 1},
        {"malformed/missing_preamble.pomdp", ParseError::Kind::syntax, 2, 1},
        {"malformed/negative_prob.pomdp", ParseError::Kind::value, 8, 1},
        {"malformed/row_sum.pomdp", ParseError::Kind::stochasticity, 7, 0},
        {"malformed/terminal_wrong_count.pomdp", ParseError::Kind::dimension, 12, 11},
        {"malformed/unknown_directive.pomdp", ParseError::Kind::syntax, 7, 1},
        {"malformed/unknown_state_name.pomdp", ParseError::Kind::unknown_name, 16, 12},
    };

    for (const Expected& e : cases) {
        CAPTURE(e.file);
        std::ifstream in(data_path(e.file));
        REQUIRE(in.good());
        bool threw = false;
        try {
            parse_pomdp(in);
        } catch (const ParseError& err) {
            threw = true;
            CHECK(err.kind() == e.kind);
            CHECK(err.line() == e.line);
            CHECK(err.column() == e.column);
            // The message embeds the class name and the position.
            CHECK(std::string(err.what()).find(ParseError::kind_name(e.kind)) !=
                  std::string::npos);
        }
        CHECK(threw);
    }
}

TEST_CASE("serialize then parse reproduces every entry") {
    SUBCASE("built-in model, exactly") {
        const PomdpModel m = healthcare_model();
        const std::string text = serialize(m);
        const ParseResult r = parse_pomdp(text);
        check_same_tables(r.model, m, 0.0);
        CHECK(r.model.labels.states == m.labels.states);
        CHECK(r.model.labels.actions == m.labels.actions);
        CHECK(r.model.labels.observations == m.labels.observations);
        CHECK(serialize(r.model) == text);  // the writer is deterministic
    }

    SUBCASE("random unnamed models, exactly") {
        Xoshiro256 rng(2024);
        for (int trial = 0; trial < 5; ++trial) {
            CAPTURE(trial);
            const PomdpModel m = testutil::random_model(rng, 2 + trial % 3, 2, 3);
            const ParseResult r = parse_pomdp(serialize(m));
            check_same_tables(r.model, m, 0.0);
        }
    }
}

TEST_CASE("reward tables convert to shifted costs with a warning") {
    const std::string text =
        "discount: 0.9\n"
        "values: reward\n"
        "states: 2\n"
        "actions: 2\n"
        "observations: 2\n"
        "T: 0\nidentity\nT: 1\nidentity\n"
        "O: 0\nuniform\nO: 1\nuniform\n"
        "R: 0 : 0 : * : * 1\n"
        "R: 0 : 1 : * : * 1\n"
        "R: 1 : 0 : * : * 3\n"
        "R: 1 : 1 : * : * 3\n"
        "terminal: 2 -1\n";
    const ParseResult r = parse_pomdp(text);

    // Rewards {1,1} and {3,3} negate to {-1,-1}, {-3,-3}, then shift up by
    // the common 3; terminal {2,-1} negates to {-2,1} and shifts by 2.
    CHECK(r.model.stage_cost[0] == Vec{2.0, 2.0});
    CHECK(r.model.stage_cost[1] == Vec{0.0, 0.0});
    CHECK(r.model.terminal_cost == Vec{0.0, 3.0});
    CHECK(validate_model(r.model).ok());

    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0] ==
          "values: reward converted to costs by negation; shifted stage costs "
          "by 3 and terminal costs by 2 to keep them nonnegative (optimal "
          "decisions unchanged)");
}

TEST_CASE("defaults when optional directives are absent") {
    const std::string text =
        "states: 2\n"
        "actions: 1\n"
        "observations: 1\n"
        "T: 0\nidentity\n"
        "O: 0\nuniform\n"
        "R: 0 : * : * : * 1\n";
    const ParseResult r = parse_pomdp(text);
    CHECK_FALSE(r.discount.has_value());
    CHECK_FALSE(r.start.has_value());
    CHECK(r.warnings.empty());
    // Without values: the numbers are read as costs; without terminal: zero.
    CHECK(r.model.stage_cost[0] == Vec{1.0, 1.0});
    CHECK(r.model.terminal_cost == Vec{0.0, 0.0});

    const ParseResult with_start = parse_pomdp(text + "start: 0.25 0.75\n");
    REQUIRE(with_start.start.has_value());
    CHECK(*with_start.start == Vec{0.25, 0.75});
}

TEST_CASE("policy files round-trip byte for byte") {
    const PomdpModel m = healthcare_model();
    SolveConfig config;
    config.horizon = 2;
    config.discount = 0.95;
    const PolicyStack stack = solve(m, config);

    const std::string text = policy_text(stack);
    CHECK(text.rfind("# policy stages=3 states=3\n", 0) == 0);

    std::istringstream in(text);
    const PolicyStack back = read_policy(in);
    REQUIRE(back.per_stage.size() == stack.per_stage.size());
    for (std::size_t k = 0; k < stack.per_stage.size(); ++k) {
        CAPTURE(k);
        REQUIRE(back.per_stage[k].vectors.size() == stack.per_stage[k].vectors.size());
        for (std::size_t v = 0; v < stack.per_stage[k].vectors.size(); ++v) {
            CHECK(back.per_stage[k].vectors[v].action ==
                  stack.per_stage[k].vectors[v].action);
            CHECK(back.per_stage[k].vectors[v].coeffs ==
                  stack.per_stage[k].vectors[v].coeffs);
        }
    }
    // The terminal stage is the single cost vector with the no-action marker.
    CHECK(back.per_stage.back().vectors.size() == 1);
    CHECK(back.per_stage.back().vectors[0].action == -1);
    CHECK(policy_text(back) == text);
}

TEST_CASE("malformed policy files raise the documented errors") {
    auto read_fail = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_policy(in);
        } catch (const ParseError& e) {
            return e;
        }
        FAIL("expected a ParseError");
        return ParseError(ParseError::Kind::syntax, 0, 0, "unreachable");
    };

    SUBCASE("stages must be consecutive") {
        const ParseError e = read_fail(
            "# policy stages=2 states=2\n"
            "stage 0 vectors 1\n1 0 0\n"
            "stage 2 vectors 1\n-1 0 0\n");
        CHECK(e.kind() == ParseError::Kind::syntax);
        CHECK(e.line() == 4);
    }
    SUBCASE("every stage needs at least one vector") {
        const ParseError e =
            read_fail("# policy stages=1 states=2\nstage 0 vectors 0\n");
        CHECK(e.kind() == ParseError::Kind::value);
        CHECK(e.line() == 2);
    }
    SUBCASE("coefficient counts must agree") {
        const ParseError e = read_fail(
            "# policy stages=1 states=2\n"
            "stage 0 vectors 2\n1 0 0\n0 1 2 3\n");
        CHECK(e.kind() == ParseError::Kind::dimension);
        CHECK(e.line() == 4);
    }
    SUBCASE("an empty file has no stages") {
        const ParseError e = read_fail("# policy stages=0 states=0\n");
        CHECK(e.kind() == ParseError::Kind::syntax);
    }
    SUBCASE("actions are integers") {
        const ParseError e = read_fail(
            "# policy stages=1 states=3\nstage 0 vectors 1\nfoo 1 2 3\n");
        CHECK(e.kind() == ParseError::Kind::syntax);
        CHECK(e.line() == 3);
    }
}
