#include <doctest.h>

#include "monocensus/monodromy.hpp"
#include "monocensus/tracker.hpp"
#include "test_support.hpp"

using namespace monocensus;
using monocensus::testing::vec;

TEST_CASE("segment path geometry") {
    SegmentPath straight{vec({1.0}), vec({4.0}), 1.0, 1.0};
    CHECK(straight.at(0.5)[0] == Complex{2.5});
    CHECK(straight.derivative(0.3)[0] == Complex{3.0});

    Rng rng(3);
    SegmentPath arc{rng.complex_normal_vec(2), rng.complex_normal_vec(2), rng.unit_complex(), rng.unit_complex()};
    CHECK(arc.at(0.0) == arc.a);
    CHECK(arc.at(1.0) == arc.b);
    // derivative agrees with a difference quotient
    const double t = 0.37, h = 1e-6;
    PointVec fd = (arc.at(t + h) - arc.at(t - h)) / (2 * h);
    CHECK(inf_norm(fd - arc.derivative(t)) < 1e-8);
    // the reversed arc visits the same points backwards
    CHECK(inf_norm(arc.reversed().at(1.0 - t) - arc.at(t)) < 1e-14);

    CHECK_THROWS_AS((SegmentPath{vec({0.0}), vec({1.0}), 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SegmentPath{vec({0.0}), vec({1.0}), 1.0, -1.0}.validate()), std::invalid_argument);
}

TEST_CASE("track options validation") {
    TrackOptions bad;
    bad.step_min = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    TrackOptions bad_tol;
    bad_tol.endpoint_tol = 0.0;
    CHECK_THROWS_AS(bad_tol.validate(), std::invalid_argument);
    CHECK_NOTHROW(TrackOptions{}.validate());
}

TEST_CASE("square root branch continued along a real segment") {
    auto sys = testing::square_root_system();
    PathResult r = track_segment(sys, vec({1.0}), {vec({1.0}), vec({4.0}), 1.0, 1.0});
    REQUIRE(r.status == PathStatus::Success);
    CHECK(std::abs((*r.endpoint)[0] - Complex{2.0}) < 1e-10);
    CHECK(r.steps_taken > 0);
}

TEST_CASE("constant path returns the start point") {
    auto sys = testing::trace_example_system();
    const double root = 1.0 / std::sqrt(2.0);
    PathResult r = track_segment(sys, vec({root}), {vec({1.0}), vec({1.0}), 1.0, 1.0});
    REQUIRE(r.ok());
    CHECK(std::abs((*r.endpoint)[0] - root) < 1e-10);
}

TEST_CASE("segment ending on the branch point is a singular endpoint") {
    auto sys = testing::square_root_system();
    PathResult r = track_segment(sys, vec({1.0}), {vec({1.0}), vec({0.0}), 1.0, 1.0});
    CHECK(r.status == PathStatus::SingularEndpoint);
    CHECK_FALSE(r.endpoint.has_value());
}

TEST_CASE("solution escaping to infinity diverges") {
    // p x - 1 = 0 has x = 1/p, unbounded as p -> 0.
    auto sys = parse_system(R"({"vars": ["x"], "params": ["p"],
        "polys": [[{"c": [1, 0], "v": {"x": 1}, "p": {"p": 1}}, {"c": [-1, 0]}]]})");
    PathResult r = track_segment(sys, vec({1.0}), {vec({1.0}), vec({0.0}), 1.0, 1.0});
    CHECK(r.status == PathStatus::Diverged);
}

TEST_CASE("step budget exhaustion") {
    auto sys = testing::square_root_system();
    TrackOptions opts;
    opts.max_steps = 2;
    PathResult r = track_segment(sys, vec({1.0}), {vec({1.0}), vec({100.0}), 1.0, 1.0}, opts);
    CHECK(r.status == PathStatus::StepLimitReached);
}

TEST_CASE("newton refinement") {
    auto sys = testing::square_root_system();
    NewtonResult near = newton_refine(sys, vec({1.0001}), vec({1.0}), 1e-12, 20);
    CHECK(near.converged);
    CHECK(std::abs(near.x[0] - 1.0) < 1e-12);

    // Independent oracle: the scalar iteration x <- (x + 1/x) / 2 from 0.2.
    double oracle = 0.2;
    for (int i = 0; i < 60; ++i) oracle = 0.5 * (oracle + 1.0 / oracle);
    NewtonResult far = newton_refine(sys, vec({0.2}), vec({1.0}), 1e-12, 30);
    CHECK(far.converged);
    CHECK(std::abs(far.x[0] - oracle) < 1e-12);
    CHECK(std::abs(oracle - 1.0) < 1e-15);

    NewtonResult singular = newton_refine(sys, vec({0.0}), vec({1.0}), 1e-12, 20);
    CHECK_FALSE(singular.converged);
}

TEST_CASE("path reversal, determinism and endpoint residuals on random quadratic systems") {
    auto sys = testing::dense_coefficient_system({2, 2});
    Rng rng(99);
    int forward_ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Seed seed = seed_solution(sys, FabricateLinearInParams{1000 + static_cast<std::uint64_t>(trial), std::nullopt});
        PointVec b = seed.p + rng.complex_normal_vec(seed.p.size());
        SegmentPath path{seed.p, b, rng.unit_complex(), rng.unit_complex()};

        PathResult fwd = track_segment(sys, seed.x, path);
        PathResult again = track_segment(sys, seed.x, path);
        CHECK(fwd.status == again.status);
        CHECK(fwd.steps_taken == again.steps_taken);
        if (!fwd.ok()) continue;
        ++forward_ok;
        CHECK(*fwd.endpoint == *again.endpoint);
        CHECK(inf_norm(sys.evaluate(*fwd.endpoint, b)) < TrackOptions{}.endpoint_tol);

        PathResult back = track_segment(sys, *fwd.endpoint, path.reversed());
        REQUIRE(back.ok());
        CHECK(inf_norm(sys.evaluate(*back.endpoint, seed.p)) < TrackOptions{}.endpoint_tol);
        CHECK(inf_norm(*back.endpoint - seed.x) < 1e-8);
    }
    CHECK(forward_ok >= 95);
}
