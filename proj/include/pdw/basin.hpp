// Grid computations on the section: the single-step domain, its inverse
// images, the basin, the separatrix curve, and domain-boundary tracing by
// backward integration.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdw/hybrid.hpp"

namespace pdw {

struct GridSpec {
    double theta1_lo = 0.01, theta1_hi = 1.0;
    double dtheta1_lo = -1.0, dtheta1_hi = -0.01;
    int nx = 500, ny = 500;

    bool valid() const;
    double dx() const { return (theta1_hi - theta1_lo) / nx; }
    double dy() const { return (dtheta1_hi - dtheta1_lo) / ny; }
    double cell_diag() const;
    /// Cell centers; i indexes theta1, j indexes dtheta1.
    SectionPoint cell_center(int i, int j) const;
    std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Per-cell label bits.
enum : std::uint8_t {
    kLabelInD = 1u << 0,
    kLabelInS1D = 1u << 1,
    kLabelInS2D = 1u << 2,
    kLabelInB = 1u << 3,
};

struct RasterMetadata {
    double gamma = 0.0;
    IntegratorConfig cfg;
    int n_max = 0;
    int n_short = 0;  ///< nonzero only for basin rasters
    int n_long = 0;
    bool supersampled = false;
    int workers = 1;
    int protocol_violations = 0;  ///< long-survival without short-survival; must stay 0
};

/// Survival counts and region labels on a section grid, row-major j*nx + i.
struct RegionRaster {
    GridSpec spec;
    std::vector<std::uint16_t> survival;
    std::vector<std::uint8_t> labels;
    RasterMetadata meta;

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.nx) +
               static_cast<std::size_t>(i);
    }
    std::size_t count_label(std::uint8_t bit) const;
};

/// Iterates every cell center (or 2x2 subsamples when `supersample`; the cell
/// then carries the minimum count) up to n_max steps. Labels:
/// in_D <=> survival >= 1, in_S^-nD <=> survival >= n+1.
/// workers <= 0 selects hardware concurrency; results are identical across
/// worker counts (cells are independent and merged by index).
RegionRaster compute_raster(const WalkerParams& p, const GridSpec& spec, int n_max,
                            const IntegratorConfig& cfg, int workers = 1,
                            bool supersample = false);

/// Basin protocol: a cell is in B iff it survives both n_short and n_long
/// steps. Survival is monotone per cell, so this equals surviving n_long; the
/// comparison is kept as a guard and violations are counted in the metadata.
RegionRaster compute_basin(const WalkerParams& p, const GridSpec& spec,
                           const IntegratorConfig& cfg, int n_short = 50, int n_long = 200,
                           int workers = 1, bool supersample = false);

/// Closed-form intersection of the center-stable manifold with the section:
/// dtheta1 = -2 sin((theta1 - gamma)/2) at each requested theta1 (> 0).
std::vector<SectionPoint> wcs_curve(const WalkerParams& p, const std::vector<double>& theta1_samples);

struct TraceOptions {
    int seed_samples = 140;  ///< seeds per boundary family
    /// Family A seeds sit just above the separatrix; they are placed by
    /// stance-energy excess over the saddle value, log-spaced in this range.
    double excess_lo = 3e-6, excess_hi = 1.2e-3;
    double u_lo = -1.00, u_hi = -0.02;  ///< contact theta1 range, family B
    int shoot_scan = 96;                ///< coarse shots before bisection
    double backward_budget = 40.0;
};

struct BoundaryTraces {
    /// Backward flow of the contact-section edge {theta1 = 0}.
    std::vector<SectionPoint> from_theta1_zero;
    /// Backward flow of the grazing edge {2 dtheta1 - dtheta2 = 0}.
    std::vector<SectionPoint> from_grazing;
    int skipped = 0;  ///< seeds whose backward orbit never met the section
};

/// Seeds points on the two edges of the contact section and integrates them
/// backward to the section constraint surface, collecting the landings.
BoundaryTraces trace_domain_boundary(const WalkerParams& p, const IntegratorConfig& cfg,
                                     const TraceOptions& opts = {});

}  // namespace pdw
