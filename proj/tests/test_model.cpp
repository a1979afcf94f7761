#include <doctest.h>

#include <cmath>

#include "pdw/integrator.hpp"
#include "pdw/model.hpp"

using namespace pdw;

TEST_SUITE("model") {

TEST_CASE("vector field vanishes at the upright equilibrium") {
    for (const double g : {0.011, 0.019}) {
        const WalkerParams p{g};
        const FullState f = vector_field(equilibrium_state(p), p);
        CHECK(f.theta1 == 0.0);
        CHECK(f.theta2 == 0.0);
        CHECK(f.dtheta1 == 0.0);
        CHECK(f.dtheta2 == 0.0);
    }
}

TEST_CASE("stance acceleration linearizes to theta1 - gamma near the saddle") {
    const WalkerParams p{0.011};
    for (const double x : {1e-2, 1e-3, 1e-4}) {
        const FullState f = vector_field({p.gamma + x, 0.0, 0.0, 0.0}, p);
        CHECK(std::abs(f.dtheta1 - x) <= x * x * x);  // sin(x) = x - x^3/6 + ...
    }
}

TEST_CASE("vector field matches a hand evaluation of the closed forms") {
    const WalkerParams p{0.009};
    const FullState s{0.2, 0.4, -0.2, -0.02};
    const FullState f = vector_field(s, p);
    CHECK(f.theta1 == -0.2);
    CHECK(f.dtheta1 == doctest::Approx(std::sin(0.191)).epsilon(1e-15));
    const double dd2 = (1.0 - std::cos(0.4)) * std::sin(0.191) + 0.04 * std::sin(0.4) -
                       std::sin(0.4 - 0.2 + 0.009);
    CHECK(f.dtheta2 == doctest::Approx(dd2).epsilon(1e-14));
}

TEST_CASE("stance energy anchors: saddle value and quarter turn") {
    const WalkerParams p{0.011};
    CHECK(stance_energy({p.gamma, 0.37, 0.0, 1.4}, p) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(stance_energy({p.gamma + kPi / 2.0, -0.1, 0.0, 0.2}, p)) < 1e-15);
}

TEST_CASE("separatrix states carry saddle energy exactly") {
    const WalkerParams p{0.011};
    for (const double th : {0.05, 0.2, 0.5, 0.9}) {
        const FullState s{th, 0.0, separatrix_dtheta1(th, p), 0.0};
        CHECK(std::abs(stance_energy(s, p) - 1.0) <= 4e-16);
    }
}

TEST_CASE("forward flow from the separatrix approaches the saddle") {
    // The unstable direction amplifies any numerical offset as e^t, so the
    // meaningful statement is the closest approach within the window.
    const WalkerParams p{0.011};
    IntegratorConfig cfg;
    cfg.t_max = 25.0;
    cfg.record_trajectory = true;
    const FullState s0{0.45, 0.0, separatrix_dtheta1(0.45, p), 0.0};
    const SwingResult r = integrate_swing(s0, p, cfg);
    double best = 1e9;
    for (const auto& smp : r.trajectory)
        best = std::min(best, std::hypot(smp.state.theta1 - p.gamma, smp.state.dtheta1));
    CHECK(best < 1e-5);
}

TEST_CASE("equilibrium spectrum is {-1, -i, +i, +1} independent of gamma") {
    for (const double g : {0.011, 0.019}) {
        const auto ev = equilibrium_jacobian_spectrum(WalkerParams{g});
        CHECK(std::abs(ev[0] - std::complex<double>(-1.0, 0.0)) < 1e-8);
        CHECK(std::abs(ev[1] - std::complex<double>(0.0, -1.0)) < 1e-8);
        CHECK(std::abs(ev[2] - std::complex<double>(0.0, 1.0)) < 1e-8);
        CHECK(std::abs(ev[3] - std::complex<double>(1.0, 0.0)) < 1e-8);
    }
}

TEST_CASE("analytic Jacobian agrees with central differences") {
    const WalkerParams p{0.013};
    const FullState s{0.31, -0.12, -0.41, 0.22};
    const auto jac = vector_field_jacobian(s, p);
    const double h = 1e-6;
    for (int col = 0; col < 4; ++col) {
        FullState sp = s, sm = s;
        double* fields_p[4] = {&sp.theta1, &sp.theta2, &sp.dtheta1, &sp.dtheta2};
        double* fields_m[4] = {&sm.theta1, &sm.theta2, &sm.dtheta1, &sm.dtheta2};
        *fields_p[col] += h;
        *fields_m[col] -= h;
        const FullState fp = vector_field(sp, p), fm = vector_field(sm, p);
        const double num[4] = {(fp.theta1 - fm.theta1) / (2 * h), (fp.theta2 - fm.theta2) / (2 * h),
                               (fp.dtheta1 - fm.dtheta1) / (2 * h),
                               (fp.dtheta2 - fm.dtheta2) / (2 * h)};
        for (int row = 0; row < 4; ++row)
            CHECK(std::abs(jac[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] -
                           num[row]) < 1e-6);
    }
}

TEST_CASE("distance to the linear subspaces") {
    const WalkerParams p{0.011};
    SUBCASE("zero on the center-unstable subspace") {
        const FullState s{p.gamma + 0.3, 0.05, 0.3, -0.4};
        CHECK(linear_subspace_distance(s, p, Subspace::CenterUnstable) == 0.0);
    }
    SUBCASE("plug-in value on the center-stable side") {
        const FullState s{p.gamma + 0.1, 0.7, 0.0, 0.1};
        CHECK(linear_subspace_distance(s, p, Subspace::CenterStable) ==
              doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-14));
    }
}

}  // TEST_SUITE
