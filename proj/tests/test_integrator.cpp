#include <doctest.h>

#include <cmath>

#include "pdw/hybrid.hpp"
#include "pdw/integrator.hpp"

using namespace pdw;

namespace {

// Newton fixed point of the section map at gamma = 0.009, frozen from two
// integrator tolerances agreeing to 3e-11.
constexpr double kFp009Theta1 = 0.200310900567159;
constexpr double kFp009DTheta1 = -0.199832473035747;
constexpr double kFp009StepDuration = 3.88246375;

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("config sanity window") {
    IntegratorConfig cfg;
    CHECK(cfg.valid());
    cfg.rel_tol = 1e-3;
    CHECK_FALSE(cfg.valid());
    cfg.rel_tol = 1e-10;
    cfg.theta1_fall_limit = 2.0;
    CHECK_FALSE(cfg.valid());
}

TEST_CASE("contact from the period-1 gait start") {
    const WalkerParams p{0.009};
    const IntegratorConfig cfg;
    const SwingResult r = integrate_swing(embed_section({kFp009Theta1, kFp009DTheta1}), p, cfg);
    REQUIRE(r.kind == SwingResult::Kind::Contact);
    CHECK(r.duration == doctest::Approx(kFp009StepDuration).epsilon(1e-6));
    CHECK(std::abs(2.0 * r.pre_impact.theta1 - r.pre_impact.theta2) <= kEventGTol);
    CHECK(r.pre_impact.theta1 < 0.0);
    CHECK(2.0 * r.pre_impact.dtheta1 - r.pre_impact.dtheta2 < 0.0);
    // the stance first integral is the accuracy oracle
    const double e0 = stance_energy(embed_section({kFp009Theta1, kFp009DTheta1}), p);
    CHECK(std::abs(stance_energy(r.pre_impact, p) - e0) < 1e-8);
}

TEST_CASE("equilibrium start exhausts the time budget") {
    const WalkerParams p{0.011};
    IntegratorConfig cfg;
    cfg.t_max = 30.0;
    const SwingResult r = integrate_swing(equilibrium_state(p), p, cfg);
    REQUIRE(r.kind == SwingResult::Kind::Fall);
    CHECK(r.fall_reason == FallReason::TimeBudget);
    CHECK(r.duration == doctest::Approx(30.0));
}

TEST_CASE("fast forward-leaning start overturns") {
    const WalkerParams p{0.011};
    const IntegratorConfig cfg;
    const SwingResult r = integrate_swing({0.3, 0.1, 0.8, 0.0}, p, cfg);
    REQUIRE(r.kind == SwingResult::Kind::Fall);
    CHECK(r.fall_reason == FallReason::StanceOverturn);
}

TEST_CASE("non-finite input reports a blowup") {
    const WalkerParams p{0.011};
    const IntegratorConfig cfg;
    const SwingResult r =
        integrate_swing({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0.0}, p, cfg);
    REQUIRE(r.kind == SwingResult::Kind::Fall);
    CHECK(r.fall_reason == FallReason::NumericalBlowup);
}

TEST_CASE("event location holds across the section window") {
    const WalkerParams p{0.011};
    const IntegratorConfig cfg;
    for (const SectionPoint q : {SectionPoint{0.15, -0.16}, SectionPoint{0.3, -0.31},
                                 SectionPoint{0.5, -0.52}}) {
        const SwingResult r = integrate_swing(embed_section(q), p, cfg);
        REQUIRE(r.kind == SwingResult::Kind::Contact);
        CHECK(std::abs(2.0 * r.pre_impact.theta1 - r.pre_impact.theta2) <= kEventGTol);
        CHECK(r.pre_impact.theta1 < 0.0);
        CHECK(2.0 * r.pre_impact.dtheta1 - r.pre_impact.dtheta2 < 0.0);
    }
}

TEST_CASE("halving tolerances moves the contact state below 1e-6") {
    const WalkerParams p{0.011};
    IntegratorConfig cfg, half = cfg;
    half.rel_tol = cfg.rel_tol / 2.0;
    half.abs_tol = cfg.abs_tol / 2.0;
    for (const SectionPoint q : {SectionPoint{0.22, -0.22}, SectionPoint{0.4, -0.42}}) {
        const SwingResult a = integrate_swing(embed_section(q), p, cfg);
        const SwingResult b = integrate_swing(embed_section(q), p, half);
        REQUIRE(a.kind == SwingResult::Kind::Contact);
        REQUIRE(b.kind == SwingResult::Kind::Contact);
        CHECK(std::abs(a.pre_impact.theta1 - b.pre_impact.theta1) <= 1e-6);
        CHECK(std::abs(a.pre_impact.theta2 - b.pre_impact.theta2) <= 1e-6);
        CHECK(std::abs(a.pre_impact.dtheta1 - b.pre_impact.dtheta1) <= 1e-6);
        CHECK(std::abs(a.pre_impact.dtheta2 - b.pre_impact.dtheta2) <= 1e-6);
    }
}

TEST_CASE("stance energy drifts below 1e-8 across a 50-step walk") {
    const WalkerParams p{0.011};
    const IntegratorConfig cfg;
    SectionPoint q{0.213918252229552, -0.211942246764527};
    for (int i = 0; i < 50; ++i) {
        const StepOutcome st = step(q, p, cfg);
        REQUIRE(st.kind == StepOutcome::Kind::Stepped);
        const double drift =
            stance_energy(st.pre_impact, p) - stance_energy(embed_section(q), p);
        CHECK(std::abs(drift) < 1e-8);
        q = st.next;
    }
}

TEST_CASE("backward then forward returns to the start") {
    const WalkerParams p{0.011};
    const IntegratorConfig cfg;
    const FullState s0 = embed_section({0.25, -0.3});
    for (const double span : {5.0, 20.0}) {
        const FullState back = integrate_flow(s0, p, cfg, -span);
        const FullState again = integrate_flow(back, p, cfg, span);
        CHECK(std::abs(again.theta1 - s0.theta1) < 1e-7);
        CHECK(std::abs(again.theta2 - s0.theta2) < 1e-7);
        CHECK(std::abs(again.dtheta1 - s0.dtheta1) < 1e-7);
        CHECK(std::abs(again.dtheta2 - s0.dtheta2) < 1e-7);
    }
}

TEST_CASE("predicate-driven backward integration") {
    const WalkerParams p{0.011};
    const IntegratorConfig cfg;
    const FullState s0 = embed_section({0.2, -0.25});
    SUBCASE("unreachable predicate exhausts a tiny budget") {
        IntegratorConfig tiny = cfg;
        tiny.t_max = 0.5;
        const BackwardResult r = integrate_swing_backward(
            s0, p, tiny, [](const FullState&, double) { return false; });
        CHECK_FALSE(r.reached);
        CHECK(r.elapsed == doctest::Approx(0.5));
        CHECK(r.trajectory.size() >= 2);
    }
    SUBCASE("stops when the stance angle grows past a threshold") {
        const BackwardResult r = integrate_swing_backward(
            s0, p, cfg, [](const FullState& s, double) { return s.theta1 > 0.35; });
        CHECK(r.reached);
        CHECK(r.state.theta1 > 0.35);
    }
}

TEST_CASE("backward event location recovers the step start") {
    // Rewinding the flow from the located contact of a step must land on the
    // section exactly where the step began.
    const WalkerParams p{0.009};
    const IntegratorConfig cfg;
    const SectionPoint q0{kFp009Theta1, kFp009DTheta1};
    const SwingResult fwd = integrate_swing(embed_section(q0), p, cfg);
    REQUIRE(fwd.kind == SwingResult::Kind::Contact);
    const BackwardResult back = backward_to_section(fwd.pre_impact, p, cfg);
    REQUIRE(back.reached);
    CHECK(std::abs(back.state.theta2 - 2.0 * back.state.theta1) <= kEventGTol);
    CHECK(back.elapsed == doctest::Approx(fwd.duration).epsilon(1e-9));
    CHECK(std::abs(back.state.theta1 - q0.theta1) < 1e-8);
    CHECK(std::abs(back.state.dtheta1 - q0.dtheta1) < 1e-8);
}

}  // TEST_SUITE
