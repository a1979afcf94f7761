#include <doctest.h>

#include <cmath>
#include <random>

#include "pdw/hybrid.hpp"

using namespace pdw;

namespace {
constexpr double kFp009Theta1 = 0.200310900567159;
constexpr double kFp009DTheta1 = -0.199832473035747;
constexpr double kFp011Theta1 = 0.213918252229552;
constexpr double kFp011DTheta1 = -0.211942246764527;
}  // namespace

TEST_SUITE("hybrid") {

TEST_CASE("impact map hand evaluation; swing-rate inputs are irrelevant") {
    const FullState pre{-0.3, -0.6, -0.4, 0.7};
    const FullState post = apply_impact(pre);
    CHECK(post.theta1 == 0.3);
    CHECK(post.theta2 == 0.6);
    CHECK(post.dtheta1 == doctest::Approx(-0.4 * std::cos(0.6)).epsilon(1e-15));
    CHECK(post.dtheta2 ==
          doctest::Approx(std::cos(0.6) * (1.0 - std::cos(0.6)) * (-0.4)).epsilon(1e-15));

    const FullState post2 = apply_impact({-0.3, -0.6, -0.4, -123.0});
    CHECK(post2.dtheta1 == post.dtheta1);
    CHECK(post2.dtheta2 == post.dtheta2);
}

TEST_CASE("impact map shallow-contact limit") {
    const FullState post = apply_impact({-1e-9, -2e-9, -0.37, 0.1});
    CHECK(post.theta1 == 1e-9);
    CHECK(post.dtheta1 == doctest::Approx(-0.37).epsilon(1e-15));
    CHECK(std::abs(post.dtheta2) < 1e-15);
}

TEST_CASE("impact map rejects states off the contact surface") {
    CHECK_THROWS_AS(apply_impact({-0.3, -0.55, -0.4, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(apply_impact({-0.3, -0.6 + 0.5e-9, -0.4, 0.0}));
}

TEST_CASE("section embedding") {
    const FullState s = embed_section({0.2, -0.2});
    CHECK(s.theta1 == 0.2);
    CHECK(s.theta2 == 0.4);
    CHECK(s.dtheta1 == -0.2);
    CHECK(s.dtheta2 == doctest::Approx(-0.2 * (1.0 - std::cos(0.4))).epsilon(1e-15));
    CHECK_THROWS_AS(embed_section({0.0, -0.2}), std::invalid_argument);
    CHECK_THROWS_AS(embed_section({-0.1, -0.2}), std::invalid_argument);
}

TEST_CASE("impact image lies exactly on the section embedding") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> th(-0.7, -1e-4), dth(-1.4, 1.4);
    for (int i = 0; i < 10000; ++i) {
        const double t1 = th(rng);
        const double v1 = dth(rng);
        const FullState post = apply_impact({t1, 2.0 * t1, v1, dth(rng)});
        CHECK(post.theta2 == 2.0 * post.theta1);  // exact by construction
        const double embedded = post.dtheta1 * (1.0 - std::cos(2.0 * post.theta1));
        CHECK(std::abs(post.dtheta2 - embedded) <=
              8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(embedded)));
        CHECK(std::abs(post.dtheta1) <= std::abs(v1));
    }
}

TEST_CASE("impact dissipation is strict away from flat contact") {
    const FullState post = apply_impact({-0.4, -0.8, -0.5, 0.0});
    CHECK(std::abs(post.dtheta1) < 0.5);
}

TEST_CASE("step holds the period-1 fixed point") {
    const IntegratorConfig cfg;
    SUBCASE("gamma 0.009") {
        const SectionPoint q{kFp009Theta1, kFp009DTheta1};
        const StepOutcome st = step(q, WalkerParams{0.009}, cfg);
        REQUIRE(st.kind == StepOutcome::Kind::Stepped);
        CHECK(std::abs(st.next.theta1 - q.theta1) < 1e-8);
        CHECK(std::abs(st.next.dtheta1 - q.dtheta1) < 1e-8);
        CHECK(st.next.theta1 > 0.0);
    }
    SUBCASE("gamma 0.011") {
        const SectionPoint q{kFp011Theta1, kFp011DTheta1};
        const StepOutcome st = step(q, WalkerParams{0.011}, cfg);
        REQUIRE(st.kind == StepOutcome::Kind::Stepped);
        CHECK(std::abs(st.next.theta1 - q.theta1) < 1e-8);
        CHECK(std::abs(st.next.dtheta1 - q.dtheta1) < 1e-8);
    }
}

TEST_CASE("a separatrix start never reaches a valid contact within the budget") {
    // Numerical noise ejects separatrix orbits along e^t near t ~ 20-35, so
    // the asymptotic claim is checked inside that horizon.
    const WalkerParams p{0.011};
    IntegratorConfig cfg;
    cfg.t_max = 20.0;
    const SectionPoint q{0.4, separatrix_dtheta1(0.4, p)};
    const StepOutcome st = step(q, p, cfg);
    REQUIRE(st.kind == StepOutcome::Kind::Fell);
    CHECK(st.fall_reason == FallReason::TimeBudget);
    const FullState mid = integrate_flow(embed_section(q), p, cfg, 15.0);
    CHECK(std::hypot(mid.theta1 - p.gamma, mid.dtheta1) < 1e-2);
}

TEST_CASE("near-zero section speed falls backward") {
    const IntegratorConfig cfg;
    const StepOutcome st = step({0.3, -1e-6}, WalkerParams{0.011}, cfg);
    REQUIRE(st.kind == StepOutcome::Kind::Fell);
    CHECK(st.fall_reason == FallReason::StanceOverturn);
}

TEST_CASE("iterate from the attractor survives and stays put") {
    const IntegratorConfig cfg;
    const SectionPoint q{kFp011Theta1, kFp011DTheta1};
    const IterateResult r = iterate(q, WalkerParams{0.011}, cfg, 200);
    CHECK(r.survived == 200);
    REQUIRE(r.points.size() == 201);
    for (const auto& pt : r.points) {
        CHECK(std::abs(pt.theta1 - q.theta1) < 1e-6);
        CHECK(std::abs(pt.dtheta1 - q.dtheta1) < 1e-6);
    }
}

TEST_CASE("iterate from outside the domain survives zero steps") {
    const IntegratorConfig cfg;
    const IterateResult r = iterate({0.9, -0.01}, WalkerParams{0.011}, cfg, 200);
    CHECK(r.survived == 0);
    CHECK(r.points.size() == 1);
}

TEST_CASE("steeper slope settles on an alternating 2-cycle") {
    const IntegratorConfig cfg;
    const IterateResult r = iterate({0.2, -0.2}, WalkerParams{0.016}, cfg, 600);
    REQUIRE(r.survived == 600);
    const auto& pts = r.points;
    const std::size_t n = pts.size();
    for (std::size_t i = n - 8; i < n - 2; ++i) {
        CHECK(std::abs(pts[i + 2].theta1 - pts[i].theta1) < 1e-6);
        CHECK(std::abs(pts[i + 1].theta1 - pts[i].theta1) > 1e-3);
    }
}

TEST_CASE("step is deterministic and iterate composes") {
    const IntegratorConfig cfg;
    const WalkerParams p{0.011};
    const SectionPoint q{0.2139, -0.2119};

    const StepOutcome a = step(q, p, cfg);
    const StepOutcome b = step(q, p, cfg);
    REQUIRE(a.kind == StepOutcome::Kind::Stepped);
    CHECK(a.next.theta1 == b.next.theta1);
    CHECK(a.next.dtheta1 == b.next.dtheta1);
    CHECK(a.duration == b.duration);

    const IterateResult whole = iterate(q, p, cfg, 7);
    const IterateResult head = iterate(q, p, cfg, 3);
    REQUIRE(head.survived == 3);
    const IterateResult tail = iterate(head.points.back(), p, cfg, 4);
    CHECK(whole.survived == head.survived + tail.survived);
    CHECK(whole.points.back().theta1 == tail.points.back().theta1);
    CHECK(whole.points.back().dtheta1 == tail.points.back().dtheta1);
}

}  // TEST_SUITE
