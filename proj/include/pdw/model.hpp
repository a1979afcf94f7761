// Compass-gait walker in the massless-foot limit: parameterization, phase
// space types, swing-phase vector field, and the analytically known
// quantities attached to the upright equilibrium.
#pragma once

#include <array>
#include <complex>

namespace pdw {

inline constexpr double kPi = 3.14159265358979323846;

/// The model is fully nondimensionalized; the slope angle is the only free
/// parameter.
struct WalkerParams {
    double gamma = 0.011;  ///< slope angle [rad]

    /// Sanity window [0, 0.1): an order of magnitude beyond the steepest
    /// slope that still carries an attractor.
    bool valid() const { return gamma >= 0.0 && gamma < 0.1; }
};

/// Point in the four-dimensional phase space.
///
/// theta1 is the stance-leg angle measured from the slope normal, theta2 the
/// inter-leg angle; time is dimensionless.
struct FullState {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double dtheta1 = 0.0;
    double dtheta2 = 0.0;

    bool finite() const;
};

/// Coordinates on the post-impact section. The section is a two-dimensional
/// surface in phase space, uniquely parameterized by (theta1, dtheta1) with
/// theta1 > 0.
struct SectionPoint {
    double theta1 = 0.0;
    double dtheta1 = 0.0;
};

enum class Subspace { CenterStable, CenterUnstable };

/// Swing-phase right-hand side. The stance equation decouples from the swing
/// leg, so the second acceleration is obtained by direct elimination:
///   dd_theta1 = sin(theta1 - gamma)
///   dd_theta2 = -(cos(theta2)-1)*dd_theta1 + dtheta1^2 sin(theta2)
///               - sin(theta2 - theta1 + gamma)
FullState vector_field(const FullState& s, const WalkerParams& p);

/// Analytic Jacobian of vector_field, row-major in state order
/// (theta1, theta2, dtheta1, dtheta2).
std::array<std::array<double, 4>, 4> vector_field_jacobian(const FullState& s,
                                                           const WalkerParams& p);

/// First integral of the stance equation: E1 = dtheta1^2/2 + cos(theta1-gamma).
/// Constant along exact swing trajectories; the saddle value is 1.
double stance_energy(const FullState& s, const WalkerParams& p);

/// Upright equilibrium (gamma, 0, 0, 0).
FullState equilibrium_state(const WalkerParams& p);

/// Eigenvalues of the Jacobian at the upright equilibrium, sorted by
/// (real, imag) ascending. Analytically {-1, -i, +i, +1} independent of gamma.
std::array<std::complex<double>, 4> equilibrium_jacobian_spectrum(const WalkerParams& p);

/// Euclidean distance in the (theta1, dtheta1) plane to the linearized
/// center-stable subspace {theta1 - gamma = -dtheta1} or center-unstable
/// subspace {theta1 - gamma = dtheta1}: |theta1 - gamma -+ dtheta1| / sqrt(2).
double linear_subspace_distance(const FullState& s, const WalkerParams& p, Subspace which);

/// dtheta1 of the energy-1 separatrix branch that enters the saddle with
/// theta1 > gamma: dtheta1 = -2 sin((theta1 - gamma)/2).
double separatrix_dtheta1(double theta1, const WalkerParams& p);

}  // namespace pdw
