// Newton location of periodic orbits on the section map, attractor
// classification over a slope grid, and boundary-crisis detection.
#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "pdw/hybrid.hpp"

namespace pdw {

struct NewtonOptions {
    double fd_step = 1e-7;   ///< central-difference offset for the map Jacobian
    double tol = 1e-10;      ///< convergence on the max-norm of the Newton update
    int max_iters = 50;
    double max_update = 0.1; ///< per-iteration cap on the update max-norm
};

struct PeriodicOrbit {
    std::vector<SectionPoint> points;  ///< length == period, consecutive images
    int period = 1;
    std::array<std::complex<double>, 2> multipliers{};  ///< sorted by modulus descending
    double gamma = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();  ///< max-norm of S^period(q)-q
};

enum class OrbitSolveStatus { Converged, NonConvergence, FellDuringNewton };

struct OrbitSolveResult {
    OrbitSolveStatus status = OrbitSolveStatus::NonConvergence;
    PeriodicOrbit orbit;
    int iterations = 0;
};

/// Newton iteration on F(q) = S^period(q) - q in section coordinates.
OrbitSolveResult find_periodic_orbit(const WalkerParams& p, int period, const SectionPoint& guess,
                                     const IntegratorConfig& cfg, const NewtonOptions& opts = {});

enum class AttractorKind { Period, Chaotic, None };

struct ScanRecord {
    double gamma = 0.0;
    AttractorKind kind = AttractorKind::None;
    int period = 0;                    ///< valid when kind == Period
    std::vector<SectionPoint> samples; ///< post-transient window, empty when None
    double largest_multiplier_modulus = std::numeric_limits<double>::quiet_NaN();
};

struct ScanOptions {
    int transient = 500;
    int window = 256;
    double recurrence_tol = 1e-6;
    int max_period = 64;
    SectionPoint cold_seed{0.2, -0.2};
    bool compute_multipliers = true;  ///< Newton polish for periods <= 16
};

/// Classifies the attractor reached from `seed` at one slope value.
ScanRecord classify_attractor(const WalkerParams& p, const SectionPoint& seed,
                              const IntegratorConfig& cfg, const ScanOptions& opts = {});

/// Continuation scan: each gamma is seeded from the previous attractor,
/// falling back to the cold seed; sequential by contract.
std::vector<ScanRecord> scan_bifurcation(const std::vector<double>& gammas,
                                         const IntegratorConfig& cfg,
                                         const ScanOptions& opts = {});

/// Uniformly spaced grid helper, inclusive of both ends.
std::vector<double> gamma_grid(double lo, double hi, double step);

/// Bisection on gamma for the edge of `pred` (true at lo, false at hi),
/// refined to `tol`. `pred` receives a continuation seed it may update.
double locate_transition(double lo, double hi, double tol,
                         const std::function<bool(double, SectionPoint&)>& pred,
                         SectionPoint seed);

struct CrisisOptions {
    ScanOptions scan;
    int raster_nx = 400;
    int raster_ny = 400;
    int long_steps = 10000;     ///< survival horizon for the crisis predicate
    double refine_tol = 1e-4;   ///< gamma resolution of the bisection
    double seed_gamma = 0.011;  ///< continuation ramp starts here, cold-seeded
    int workers = 0;            ///< raster workers; <= 0 selects hardware concurrency
};

struct CrisisRecord {
    double gamma = 0.0;
    double gap = std::numeric_limits<double>::quiet_NaN();  ///< attractor to basin-boundary distance
    double cell_diag = 0.0;      ///< raster cell diagonal used for the gap
    bool survived_long = false;  ///< attractor-seeded orbit survived long_steps
    int attractor_samples = 0;
};

struct CrisisResult {
    std::vector<CrisisRecord> records;
    double gamma_crisis_lo = 0.0;  ///< survival still holds here
    double gamma_crisis_hi = 0.0;  ///< survival has collapsed here
};

/// Gap series over [gamma_lo, gamma_hi] (at the grid of `records`) plus a
/// bisection-refined bracket of the slope where long-horizon survival
/// collapses.
CrisisResult detect_crisis(double gamma_lo, double gamma_hi, double gamma_step,
                           const IntegratorConfig& cfg, const CrisisOptions& opts = {});

}  // namespace pdw
