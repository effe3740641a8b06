#include <doctest.h>

#include <string>

#include "lsqnet/artifacts.hpp"
#include "lsqnet/error.hpp"
#include "lsqnet/problem_io.hpp"
#include "lsqnet/simulator.hpp"
#include "support.hpp"

using namespace lsqnet;
using namespace testsupport;

namespace {

const char* kMinimalProblem = R"({
  "graph": {"m": 2, "weights": [[1, 1, 1.0], [2, 2, 0.5], [1, 2, 0.25]]},
  "equations": {"agents": [
    {"A": [[1.0]], "b": [0.0]},
    {"A": [[1.0]], "b": [2.0]}
  ]},
  "params": {"c": 0.5, "cbar": 2.0, "gains": [0.8, 0.6], "max_rounds": 99,
             "tol": 1e-10, "record_every": 3, "init": "random", "seed": 12}
})";

} // namespace

TEST_CASE("parse_problem: weights mirrored, params applied") {
    const ProblemSpec spec = parse_problem(kMinimalProblem);
    CHECK(spec.weights(0, 1) == 0.25);
    CHECK(spec.weights(1, 0) == 0.25);
    CHECK(spec.weights(0, 0) == 1.0);
    CHECK(spec.blocks.size() == 2);
    CHECK(spec.hp.c == 0.5);
    CHECK(spec.hp.cbar == 2.0);
    REQUIRE(spec.gains.has_value());
    CHECK((*spec.gains)[1] == 0.6);
    CHECK(spec.cfg.max_rounds == 99);
    CHECK(spec.cfg.tol == 1e-10);
    CHECK(spec.cfg.record_every == 3);
    CHECK(spec.cfg.init == InitKind::random);
    CHECK(spec.cfg.rng_seed == 12);
}

TEST_CASE("parse -> serialize -> parse is the identity on the model") {
    const ProblemSpec a = parse_problem(kMinimalProblem);
    const ProblemSpec b = parse_problem(serialize_problem(a));
    CHECK(max_abs(a.weights - b.weights) == 0.0);
    REQUIRE(a.blocks.size() == b.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        CHECK(max_abs(a.blocks[i].A - b.blocks[i].A) == 0.0);
        CHECK(a.blocks[i].b == b.blocks[i].b);
    }
    CHECK(a.hp.c == b.hp.c);
    CHECK(a.hp.cbar == b.hp.cbar);
    CHECK(*a.gains == *b.gains);
    CHECK(a.cfg.max_rounds == b.cfg.max_rounds);
    CHECK(a.cfg.tol == b.cfg.tol);
    CHECK(a.cfg.record_every == b.cfg.record_every);
    CHECK(a.cfg.init == b.cfg.init);
    CHECK(a.cfg.rng_seed == b.cfg.rng_seed);
}

TEST_CASE("parse_problem: malformed JSON reports the line") {
    try {
        parse_problem("{\n  \"graph\": {,}\n}");
        FAIL("expected parse_error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse_error);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("parse_problem: rejections") {
    // unknown key
    try {
        parse_problem(R"({"graph": {"m": 1, "weights": [[1,1,1]], "oops": 3},
                          "equations": {"agents": [{"A": [[1]], "b": [1]}]}})");
        FAIL("expected parse_error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }
    // conflicting duplicate weight
    CHECK_THROWS_AS(
        parse_problem(R"({"graph": {"m": 2, "weights": [[1,1,1],[2,2,1],[1,2,2],[2,1,3]]},
                          "equations": {"agents": [{"A": [[1]], "b": [1]},
                                                   {"A": [[1]], "b": [1]}]}})"),
        Error);
    // agent count disagrees with m
    CHECK_THROWS_AS(
        parse_problem(R"({"graph": {"m": 2, "weights": [[1,1,1],[2,2,1],[1,2,1]]},
                          "equations": {"agents": [{"A": [[1]], "b": [1]}]}})"),
        Error);
    // index out of range
    CHECK_THROWS_AS(
        parse_problem(R"({"graph": {"m": 1, "weights": [[1,2,1]]},
                          "equations": {"agents": [{"A": [[1]], "b": [1]}]}})"),
        Error);
}

TEST_CASE("explicit initial states survive the round trip") {
    ProblemSpec spec = parse_problem(kMinimalProblem);
    spec.cfg.init = InitKind::explicit_states;
    spec.cfg.explicit_init = {AgentState{{1.5}, {-0.5}}, AgentState{{0.25}, {0.75}}};
    const ProblemSpec again = parse_problem(serialize_problem(spec));
    REQUIRE(again.cfg.init == InitKind::explicit_states);
    REQUIRE(again.cfg.explicit_init.size() == 2);
    CHECK(again.cfg.explicit_init[0].x == Vector{1.5});
    CHECK(again.cfg.explicit_init[1].z == Vector{0.75});
}

TEST_CASE("metrics_csv: header plus one row per recorded round, all fields finite") {
    const ProblemSpec spec = parse_problem(kMinimalProblem);
    const NetworkModel net = build(spec.weights);
    RunConfig cfg = spec.cfg;
    cfg.init = InitKind::zeros;
    cfg.record_every = 1;
    cfg.max_rounds = 50;
    cfg.tol = 1e-25;
    const RunTrajectory traj = run(net, resolve_gains(spec, net), spec.hp, spec.blocks, cfg);

    const std::string csv = metrics_csv(traj);
    std::size_t lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + traj.samples.size());
    CHECK(csv.rfind("t,W,consensus_spread,normal_eq_residual\n", 0) == 0);
    CHECK(csv.find("nan") == std::string::npos);
    CHECK(csv.find("inf") == std::string::npos);
}

TEST_CASE("convergence_svg: self-contained polyline plot") {
    RunTrajectory traj;
    for (std::size_t t = 0; t <= 100; ++t)
        traj.samples.push_back({t, std::pow(0.8, static_cast<double>(t)) * 1e3, 0.0, 0.0});
    const std::string svg = convergence_svg(traj);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
