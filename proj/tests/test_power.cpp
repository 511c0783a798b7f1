#include <doctest.h>

#include <cmath>

#include "meig/objective.hpp"
#include "meig/power.hpp"
#include "test_util.hpp"

using namespace meig;
using namespace test_util;

TEST_CASE("default tau sums the absolute entries") {
    CHECK(default_tau(fixture("ex41")) == doctest::Approx(47.0));
    CHECK(default_tau(HierSymTensor::zero(3, 3)) == 0.0);
    const HierSymTensor t = generate_random(3, 2, -1.0, 1.0, 6);
    CHECK(default_tau(scaled(t, 3.0)) == doctest::Approx(3.0 * default_tau(t)).epsilon(1e-14));
}

TEST_CASE("power iteration nails a rank-one tensor in a step or two") {
    Vec u = {0.6, 0.8, 0.0}, v = {1.0, 0.0};
    const HierSymTensor t = rank_one(scaled(u, 2.0), v); // |u|^2 |v|^2 = 4
    PowerConfig cfg;
    cfg.tau = 0.0;
    cfg.seed = 3; // start not orthogonal to u (generic draw)
    const SolveReport rep = power_solve(t, cfg);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.iters <= 3);
    CHECK(rep.pair->lambda == doctest::Approx(4.0));
    CHECK(rep.pair->residual_x <= 1e-12);
}

TEST_CASE("power iteration reproduces the ex41 extreme value at the default shift") {
    const HierSymTensor t = fixture("ex41");
    PowerConfig cfg;
    cfg.seed = 7;
    const SolveReport rep = power_solve(t, cfg);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.shift_t == doctest::Approx(47.0));
    CHECK(rep.pair->lambda == doctest::Approx(13.8616).epsilon(1e-4));
    CHECK(std::abs(norm2(rep.pair->x) - 1.0) <= 1e-14);
    CHECK(std::abs(norm2(rep.pair->y) - 1.0) <= 1e-14);
    CHECK(verify_eigenpair(t, *rep.pair, 1e-3));

    // lambda ascends monotonically under the default shift (heuristic,
    // verified on this fixture)
    for (std::size_t i = 1; i < rep.trace.size(); ++i)
        CHECK(rep.trace[i].phi >= rep.trace[i - 1].phi - 1e-12);
}

TEST_CASE("power iteration breaks down on the zero tensor without a shift") {
    PowerConfig cfg;
    cfg.tau = 0.0;
    CHECK_THROWS_AS(power_solve(HierSymTensor::zero(2, 2), cfg), BreakdownError);
}

TEST_CASE("power iteration honors the iteration cap") {
    PowerConfig cfg;
    cfg.max_iter = 2;
    cfg.eps = 1e-300;
    const SolveReport rep = power_solve(fixture("ex43"), cfg);
    CHECK(rep.status == SolveStatus::max_iter);
    CHECK(rep.iters == 2);
    CHECK_FALSE(rep.pair.has_value());
}

TEST_CASE("power iteration is deterministic and respects a supplied start") {
    const HierSymTensor t = fixture("ex43");
    PowerConfig cfg;
    cfg.seed = 9;
    const SolveReport a = power_solve(t, cfg);
    const SolveReport b = power_solve(t, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].phi == b.trace[i].phi);

    Vec z0 = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
    const SolveReport c = power_solve(t, cfg, &z0);
    const SolveReport d = power_solve(t, cfg, &z0);
    CHECK(c.phi_final == d.phi_final);
}

TEST_CASE("power config invariants") {
    PowerConfig cfg;
    cfg.tau = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = PowerConfig{};
    cfg.eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
