#include "pdw/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pdw {

bool FullState::finite() const {
    return std::isfinite(theta1) && std::isfinite(theta2) && std::isfinite(dtheta1) &&
           std::isfinite(dtheta2);
}

FullState vector_field(const FullState& s, const WalkerParams& p) {
    const double dd1 = std::sin(s.theta1 - p.gamma);
    const double dd2 = -(std::cos(s.theta2) - 1.0) * dd1 +
                       s.dtheta1 * s.dtheta1 * std::sin(s.theta2) -
                       std::sin(s.theta2 - s.theta1 + p.gamma);
    return FullState{s.dtheta1, s.dtheta2, dd1, dd2};
}

std::array<std::array<double, 4>, 4> vector_field_jacobian(const FullState& s,
                                                           const WalkerParams& p) {
    const double c1 = std::cos(s.theta1 - p.gamma);
    const double s1 = std::sin(s.theta1 - p.gamma);
    const double c2 = std::cos(s.theta2);
    const double s2 = std::sin(s.theta2);
    const double cs = std::cos(s.theta2 - s.theta1 + p.gamma);

    std::array<std::array<double, 4>, 4> j{};
    j[0] = {0.0, 0.0, 1.0, 0.0};
    j[1] = {0.0, 0.0, 0.0, 1.0};
    j[2] = {c1, 0.0, 0.0, 0.0};
    j[3] = {-(c2 - 1.0) * c1 + cs,
            s2 * s1 + s.dtheta1 * s.dtheta1 * c2 - cs,
            2.0 * s.dtheta1 * s2,
            0.0};
    return j;
}

double stance_energy(const FullState& s, const WalkerParams& p) {
    return 0.5 * s.dtheta1 * s.dtheta1 + std::cos(s.theta1 - p.gamma);
}

FullState equilibrium_state(const WalkerParams& p) { return FullState{p.gamma, 0.0, 0.0, 0.0}; }

std::array<std::complex<double>, 4> equilibrium_jacobian_spectrum(const WalkerParams& p) {
    const auto j = vector_field_jacobian(equilibrium_state(p), p);
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];

    Eigen::EigenSolver<Eigen::Matrix4d> solver(m, /*computeEigenvectors=*/false);
    std::array<std::complex<double>, 4> ev;
    for (int i = 0; i < 4; ++i) ev[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return ev;
}

double linear_subspace_distance(const FullState& s, const WalkerParams& p, Subspace which) {
    const double sign = (which == Subspace::CenterStable) ? 1.0 : -1.0;
    return std::abs(s.theta1 - p.gamma + sign * s.dtheta1) / std::sqrt(2.0);
}

double separatrix_dtheta1(double theta1, const WalkerParams& p) {
    return -2.0 * std::sin(0.5 * (theta1 - p.gamma));
}

}  // namespace pdw
