#include <doctest.h>

#include <cmath>

#include "pdw/fixed_points.hpp"

using namespace pdw;

TEST_SUITE("fixed_points") {

TEST_CASE("Newton finds the attracting fixed point at gamma 0.009") {
    const IntegratorConfig cfg;
    const auto res = find_periodic_orbit(WalkerParams{0.009}, 1, {0.2, -0.2}, cfg);
    REQUIRE(res.status == OrbitSolveStatus::Converged);
    // Frozen from two integrator tolerances (1e-10 and 1e-11) agreeing to 3e-11.
    CHECK(res.orbit.points[0].theta1 == doctest::Approx(0.200310900567159).epsilon(1e-7));
    CHECK(res.orbit.points[0].dtheta1 == doctest::Approx(-0.199832473035747).epsilon(1e-7));
    CHECK(res.orbit.residual < 1e-10);
    CHECK(std::abs(res.orbit.multipliers[0]) < 1.0);
    CHECK(std::abs(res.orbit.multipliers[1]) < 1.0);
    CHECK(std::abs(res.orbit.multipliers[0]) >= std::abs(res.orbit.multipliers[1]));
}

TEST_CASE("fixed point agrees across integrator tolerances") {
    IntegratorConfig cfg10, cfg11;
    cfg11.rel_tol = cfg11.abs_tol = 1e-11;
    const auto a = find_periodic_orbit(WalkerParams{0.009}, 1, {0.2, -0.2}, cfg10);
    const auto b = find_periodic_orbit(WalkerParams{0.009}, 1, {0.2, -0.2}, cfg11);
    REQUIRE(a.status == OrbitSolveStatus::Converged);
    REQUIRE(b.status == OrbitSolveStatus::Converged);
    CHECK(std::abs(a.orbit.points[0].theta1 - b.orbit.points[0].theta1) < 1e-7);
    CHECK(std::abs(a.orbit.points[0].dtheta1 - b.orbit.points[0].dtheta1) < 1e-7);
}

TEST_CASE("closure residual verified with a 10x tighter integrator") {
    IntegratorConfig cfg, tight;
    tight.rel_tol = cfg.rel_tol / 10.0;
    tight.abs_tol = cfg.abs_tol / 10.0;
    const auto res = find_periodic_orbit(WalkerParams{0.011}, 1, {0.2, -0.2}, cfg);
    REQUIRE(res.status == OrbitSolveStatus::Converged);
    const SectionPoint q = res.orbit.points[0];
    const StepOutcome st = step(q, WalkerParams{0.011}, tight);
    REQUIRE(st.kind == StepOutcome::Kind::Stepped);
    CHECK(std::abs(st.next.theta1 - q.theta1) < 1e-8);
    CHECK(std::abs(st.next.dtheta1 - q.dtheta1) < 1e-8);
}

TEST_CASE("period-2 and period-4 orbits on the cascade") {
    const IntegratorConfig cfg;
    SUBCASE("gamma 0.016, period 2") {
        const auto res = find_periodic_orbit(WalkerParams{0.016}, 2, {0.2357, -0.2313}, cfg);
        REQUIRE(res.status == OrbitSolveStatus::Converged);
        REQUIRE(res.orbit.points.size() == 2);
        CHECK(res.orbit.residual < 1e-8);
        CHECK(std::abs(res.orbit.points[0].theta1 - res.orbit.points[1].theta1) > 1e-3);
        // each point is fixed under the twice-composed map
        const StepOutcome s1 = step(res.orbit.points[1], WalkerParams{0.016}, cfg);
        REQUIRE(s1.kind == StepOutcome::Kind::Stepped);
        const StepOutcome s2 = step(s1.next, WalkerParams{0.016}, cfg);
        REQUIRE(s2.kind == StepOutcome::Kind::Stepped);
        CHECK(std::abs(s2.next.theta1 - res.orbit.points[1].theta1) < 1e-8);
    }
    SUBCASE("gamma 0.0178, period 4") {
        const auto res = find_periodic_orbit(WalkerParams{0.0178}, 4, {0.2388, -0.2348}, cfg);
        REQUIRE(res.status == OrbitSolveStatus::Converged);
        CHECK(res.orbit.residual < 1e-8);
        CHECK(std::abs(res.orbit.multipliers[0]) < 1.0);
    }
}

TEST_CASE("hopeless guesses report failure states") {
    const IntegratorConfig cfg;
    const auto res = find_periodic_orbit(WalkerParams{0.011}, 1, {0.9, -0.9}, cfg);
    CHECK(res.status != OrbitSolveStatus::Converged);
}

TEST_CASE("a multiplier passes through -1 at the period doubling") {
    const IntegratorConfig cfg;
    const auto lo = find_periodic_orbit(WalkerParams{0.0148}, 1, {0.236, -0.231}, cfg);
    const auto hi = find_periodic_orbit(WalkerParams{0.0152}, 1, {0.236, -0.231}, cfg);
    REQUIRE(lo.status == OrbitSolveStatus::Converged);
    REQUIRE(hi.status == OrbitSolveStatus::Converged);
    CHECK(lo.orbit.multipliers[0].imag() == 0.0);
    CHECK(lo.orbit.multipliers[0].real() > -1.0);
    CHECK(lo.orbit.multipliers[0].real() < -0.5);
    CHECK(hi.orbit.multipliers[0].real() < -1.0);
}

TEST_CASE("classification at the regime anchors") {
    const IntegratorConfig cfg;
    ScanOptions opts;
    opts.compute_multipliers = false;
    SectionPoint seed{0.2, -0.2};
    struct Anchor {
        double gamma;
        AttractorKind kind;
        int period;
    };
    for (const Anchor a : {Anchor{0.011, AttractorKind::Period, 1},
                           Anchor{0.016, AttractorKind::Period, 2},
                           Anchor{0.0178, AttractorKind::Period, 4},
                           Anchor{0.019, AttractorKind::Chaotic, 0},
                           Anchor{0.020, AttractorKind::None, 0}}) {
        const ScanRecord rec = classify_attractor(WalkerParams{a.gamma}, seed, cfg, opts);
        CHECK(rec.kind == a.kind);
        if (a.kind == AttractorKind::Period) CHECK(rec.period == a.period);
        if (rec.kind == AttractorKind::None) {
            CHECK(rec.samples.empty());
        } else {
            CHECK_FALSE(rec.samples.empty());
            seed = rec.samples.back();
        }
    }
}

TEST_CASE("continuation scan keeps the cascade order") {
    const IntegratorConfig cfg;
    ScanOptions opts;
    opts.compute_multipliers = false;
    const auto records = scan_bifurcation(gamma_grid(0.010, 0.0206, 2e-4), cfg, opts);
    auto rank = [](const ScanRecord& r) {
        if (r.kind == AttractorKind::None) return 1000;
        if (r.kind == AttractorKind::Chaotic) return 999;
        int rk = 0, p = r.period;
        while (p > 1) {
            p /= 2;
            ++rk;
        }
        return rk;
    };
    int prev = 0;
    for (const auto& rec : records) {
        const int r = rank(rec);
        CHECK(r >= prev);
        prev = r;
    }
    CHECK(records.front().kind == AttractorKind::Period);
    CHECK(records.front().period == 1);
    CHECK(records.back().kind == AttractorKind::None);
}

TEST_CASE("period-doubling point sits near 0.015") {
    const IntegratorConfig cfg;
    ScanOptions opts;
    opts.compute_multipliers = false;
    const double pd = locate_transition(
        0.0146, 0.0156, 1e-4,
        [&](double g, SectionPoint& s) {
            const ScanRecord rec = classify_attractor(WalkerParams{g}, s, cfg, opts);
            if (!rec.samples.empty()) s = rec.samples.back();
            return rec.kind == AttractorKind::Period && rec.period == 1;
        },
        {0.236, -0.231});
    CHECK(std::abs(pd - 0.015) <= 1e-3);
}

TEST_CASE("crisis bracket from long-orbit survival") {
    IntegratorConfig cfg;
    CrisisOptions opts;
    opts.raster_nx = opts.raster_ny = 150;
    opts.long_steps = 10000;
    const CrisisResult res = detect_crisis(0.0189, 0.0193, 2e-4, cfg, opts);
    CHECK(res.gamma_crisis_lo >= 0.0189);
    CHECK(res.gamma_crisis_hi <= 0.0193);
    CHECK(res.gamma_crisis_hi - res.gamma_crisis_lo <= 1e-4 + 1e-12);
    // the derived bisection bracket: crisis inside (0.0190, 0.0191)
    CHECK(res.gamma_crisis_lo >= 0.0190 - 1e-9);
    CHECK(res.gamma_crisis_hi <= 0.0191 + 1e-9);
    REQUIRE_FALSE(res.records.empty());
    CHECK(res.records.front().survived_long);
    CHECK_FALSE(res.records.back().survived_long);
}

}  // TEST_SUITE
