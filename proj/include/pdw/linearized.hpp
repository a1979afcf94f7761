// Saddle-linearized swing analysis: modal coordinates, the linearized flow,
// the backstep system that pulls a pre-contact state backward onto the
// section, and the PQ-segment deformation study.
#pragma once

#include <string>
#include <vector>

#include "pdw/model.hpp"

namespace pdw {

/// Integration constants of the linearized swing solution
///   theta1(t) = gamma + c1 e^t + c2 e^-t,
///   theta2(t) - (theta1(t) - gamma)/2 = k cos(t + phi).
struct ModalCoords {
    double c1 = 0.0;
    double c2 = 0.0;
    double k = 0.0;    ///< swing amplitude, >= 0
    double phi = 0.0;  ///< phase in [0, 2*pi)
};

ModalCoords modal_from_state(const FullState& s, const WalkerParams& p);
FullState linearized_flow(const ModalCoords& m, double t, const WalkerParams& p);

/// Solution of the five-equation backstep system: the time -delta at which
/// the linearized orbit through a contact state lands on the section, with
/// the swing phase/amplitude that make both endpoint constraints hold.
struct BackstepSolution {
    double delta = 0.0;         ///< step duration, > 0
    double phi = 0.0;           ///< phase as solved (continuous in delta, not wrapped)
    double k = 0.0;
    double theta1_back = 0.0;   ///< theta1(-delta)
    double dtheta1_back = 0.0;  ///< dtheta1(-delta)
    double d = 0.0;             ///< distance of the backstep point to E^cu
};

enum class BackstepStatus { Ok, NoRoot, BranchJump, OutOfBox };

struct BackstepResult {
    BackstepStatus status = BackstepStatus::NoRoot;
    BackstepSolution sol;
};

struct BackstepOptions {
    double delta_max = 30.0;      ///< scan window (0, delta_max]
    int scan_points = 3000;
    double bisect_tol = 1e-12;    ///< on delta
    double branch_threshold = 0.75;  ///< |delta - hint| beyond this is a branch jump
    bool has_hint = false;
    double delta_hint = 0.0;
    // Admissible modal box: the PQ ranges padded by 10%.
    double c1_lo = -0.495, c1_hi = -0.198;
    double c2_lo = 0.00342, c2_hi = 0.0825;
};

/// Reduces the system to a scalar root-find in delta: the two saddle-mode
/// equations are explicit, the two landing constraints convert to (k, phase)
/// by polar inversion, and the remaining contact-phase equation is the
/// residual. Roots require theta1(-delta) > 0 and a phase with cos(phi) < 0.
BackstepResult solve_backstep(double c1, double c2, const WalkerParams& p,
                              const BackstepOptions& opts = {});

/// Point of the analysis segment: pre-contact coordinates in the contact
/// surface (theta1 < 0) together with its modal coefficients.
struct PqPoint {
    SectionPoint h_point;  ///< (theta1, dtheta1) of the pre-contact state
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Uniform samples of the segment, ascending in c2 over (0.0038, 0.075) with
/// c1 interpolated linearly between -0.22 and -0.45.
std::vector<PqPoint> pq_segment(int samples, const WalkerParams& p = {});

struct DeformationRow {
    double c2 = 0.0, c1 = 0.0;
    double delta = 0.0;
    double phi_unwrapped = 0.0;
    double phi_mod = 0.0;  ///< phi reduced to [0, 2*pi)
    double k = 0.0;
    double theta1_back = 0.0, dtheta1_back = 0.0;
    double d_exact = 0.0;        ///< point-to-line distance to E^cu
    double d_paper_approx = 0.0; ///< sqrt(2) * theta1(-delta) thin-domain shorthand
    double lhs20 = 0.0;          ///< -dtheta1(-delta) / (theta1(-delta) + gamma/3)
    BackstepStatus status = BackstepStatus::NoRoot;
};

/// Runs solve_backstep along the segment, branch-anchored at the largest-c2
/// sample and tracked by continuity toward small c2. Solver failures are
/// recorded per row, never thrown.
std::vector<DeformationRow> deformation_study(const WalkerParams& p, int samples,
                                              const BackstepOptions& opts = {});

/// Jump-map preimage of section points: (theta1+, dtheta1+) ->
/// (-theta1+, dtheta1+ * sec(2 theta1+)); the swing rate is unconstrained.
/// Throws std::invalid_argument within 1e-6 of the secant singularity.
std::vector<SectionPoint> preimage_T_of(const std::vector<SectionPoint>& points);

const char* to_string(BackstepStatus s);

}  // namespace pdw
