#include "pdw/basin.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <thread>
#include <utility>

namespace pdw {

bool GridSpec::valid() const {
    return theta1_lo < theta1_hi && dtheta1_lo < dtheta1_hi && nx >= 2 && ny >= 2 &&
           theta1_lo > 0.0;
}

double GridSpec::cell_diag() const { return std::hypot(dx(), dy()); }

SectionPoint GridSpec::cell_center(int i, int j) const {
    return SectionPoint{theta1_lo + (i + 0.5) * dx(), dtheta1_lo + (j + 0.5) * dy()};
}

std::size_t RegionRaster::count_label(std::uint8_t bit) const {
    std::size_t n = 0;
    for (const auto l : labels)
        if (l & bit) ++n;
    return n;
}

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Index-parallel loop; each index is processed exactly once, by any worker.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const int nw = resolve_workers(workers);
    if (nw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

std::uint16_t survival_count(const SectionPoint& q, const WalkerParams& p,
                             const IntegratorConfig& cfg, int n_max) {
    if (!(q.theta1 > 0.0)) return 0;
    const IterateResult r = iterate(q, p, cfg, static_cast<std::size_t>(n_max));
    return static_cast<std::uint16_t>(std::min<std::size_t>(r.survived, 65535u));
}

}  // namespace

RegionRaster compute_raster(const WalkerParams& p, const GridSpec& spec, int n_max,
                            const IntegratorConfig& cfg, int workers, bool supersample) {
    RegionRaster raster;
    raster.spec = spec;
    raster.survival.assign(spec.cells(), 0);
    raster.labels.assign(spec.cells(), 0);
    raster.meta.gamma = p.gamma;
    raster.meta.cfg = cfg;
    raster.meta.n_max = n_max;
    raster.meta.supersampled = supersample;
    raster.meta.workers = resolve_workers(workers);

    parallel_for(spec.cells(), workers, [&](std::size_t idx) {
        const int i = static_cast<int>(idx % static_cast<std::size_t>(spec.nx));
        const int j = static_cast<int>(idx / static_cast<std::size_t>(spec.nx));
        std::uint16_t surv;
        if (!supersample) {
            surv = survival_count(spec.cell_center(i, j), p, cfg, n_max);
        } else {
            // Quarter-centers; the cell keeps the most pessimistic count, which
            // sharpens region boundaries.
            const SectionPoint c = spec.cell_center(i, j);
            const double ox = 0.25 * spec.dx(), oy = 0.25 * spec.dy();
            surv = 65535;
            for (const double sx : {-ox, ox})
                for (const double sy : {-oy, oy})
                    surv = std::min(surv, survival_count({c.theta1 + sx, c.dtheta1 + sy}, p, cfg,
                                                         n_max));
        }
        raster.survival[idx] = surv;
        std::uint8_t label = 0;
        if (surv >= 1) label |= kLabelInD;
        if (surv >= 2) label |= kLabelInS1D;
        if (surv >= 3) label |= kLabelInS2D;
        raster.labels[idx] = label;
    });
    return raster;
}

RegionRaster compute_basin(const WalkerParams& p, const GridSpec& spec,
                           const IntegratorConfig& cfg, int n_short, int n_long, int workers,
                           bool supersample) {
    RegionRaster raster = compute_raster(p, spec, n_long, cfg, workers, supersample);
    raster.meta.n_short = n_short;
    raster.meta.n_long = n_long;
    int violations = 0;
    for (std::size_t idx = 0; idx < raster.survival.size(); ++idx) {
        const bool in_short = raster.survival[idx] >= n_short;
        const bool in_long = raster.survival[idx] >= n_long;
        if (in_long && !in_short) ++violations;  // impossible for a monotone count
        if (in_short && in_long) raster.labels[idx] |= kLabelInB;
    }
    raster.meta.protocol_violations = violations;
    return raster;
}

std::vector<SectionPoint> wcs_curve(const WalkerParams& p,
                                    const std::vector<double>& theta1_samples) {
    std::vector<SectionPoint> curve;
    curve.reserve(theta1_samples.size());
    for (const double th : theta1_samples) curve.push_back({th, separatrix_dtheta1(th, p)});
    return curve;
}

namespace {

/// Residual of the second section constraint, dtheta2 - dtheta1(1 - cos 2 theta1),
/// at the first backward landing on {theta2 = 2 theta1, theta1 > 0}; empty if
/// the backward orbit never lands within the budget.
std::optional<std::pair<double, SectionPoint>> landing_residual(const FullState& seed,
                                                                const WalkerParams& p,
                                                                const IntegratorConfig& cfg) {
    const BackwardResult r = backward_to_section(seed, p, cfg);
    if (!r.reached) return std::nullopt;
    const FullState& s = r.state;
    const double resid = s.dtheta2 - s.dtheta1 * (1.0 - std::cos(2.0 * s.theta1));
    return std::make_pair(resid, SectionPoint{s.theta1, s.dtheta1});
}

}  // namespace

BoundaryTraces trace_domain_boundary(const WalkerParams& p, const IntegratorConfig& cfg,
                                     const TraceOptions& opts) {
    BoundaryTraces out;
    IntegratorConfig bcfg = cfg;
    bcfg.t_max = opts.backward_budget;
    bcfg.record_trajectory = false;

    // Family A: contact exactly on the edge theta1 = 0. Seeds are
    // (0, 0, v, w); the stance-energy excess fixes v (only near-separatrix
    // seeds reach large stance angles before overturning), w is shot so the
    // landing satisfies the section's velocity constraint.
    const double sin_half = std::sin(0.5 * p.gamma);
    for (int sv = 0; sv < opts.seed_samples; ++sv) {
        const double f = (sv + 0.5) / opts.seed_samples;
        const double excess =
            opts.excess_lo * std::pow(opts.excess_hi / opts.excess_lo, f);
        const double v = -std::sqrt(2.0 * excess + 4.0 * sin_half * sin_half);
        auto feval = [&](double w) { return landing_residual({0.0, 0.0, v, w}, p, bcfg); };

        // Coarse scan over the guard-respecting side w > 2v.
        const double w_lo = 2.0 * v + 1e-6, w_hi = 2.0 * v + 4.0;
        bool found = false;
        std::optional<std::pair<double, SectionPoint>> prev;
        double w_prev = w_lo;
        for (int k = 0; k <= opts.shoot_scan; ++k) {
            const double w = w_lo + (w_hi - w_lo) * k / opts.shoot_scan;
            auto cur = feval(w);
            if (prev && cur && prev->first * cur->first < 0.0) {
                double a = w_prev, b = w;
                double fa = prev->first;
                SectionPoint landing = cur->second;
                for (int it = 0; it < 60; ++it) {
                    const double m = 0.5 * (a + b);
                    auto fm = feval(m);
                    if (!fm) break;
                    landing = fm->second;
                    if ((fa < 0.0) == (fm->first < 0.0)) {
                        a = m;
                        fa = fm->first;
                    } else {
                        b = m;
                    }
                    if (std::abs(fm->first) < 1e-10) break;
                }
                out.from_theta1_zero.push_back(landing);
                found = true;
                break;  // first root along w: the principal boundary sheet
            }
            prev = cur;
            w_prev = w;
        }
        if (!found) ++out.skipped;
    }

    // Family B: grazing contact, 2 dtheta1 - dtheta2 = 0 with theta1 < 0.
    // Seeds are (u, 2u, v, 2v); u is swept, v is shot.
    for (int su = 0; su < opts.seed_samples; ++su) {
        const double u =
            opts.u_lo + (opts.u_hi - opts.u_lo) * (su + 0.5) / opts.seed_samples;
        auto feval = [&](double v) {
            return landing_residual({u, 2.0 * u, v, 2.0 * v}, p, bcfg);
        };
        const double v_lo = -1.6, v_hi = -1e-3;
        bool found = false;
        std::optional<std::pair<double, SectionPoint>> prev;
        double v_prev = v_lo;
        for (int k = 0; k <= opts.shoot_scan; ++k) {
            const double v = v_lo + (v_hi - v_lo) * k / opts.shoot_scan;
            auto cur = feval(v);
            if (prev && cur && prev->first * cur->first < 0.0) {
                double a = v_prev, b = v;
                double fa = prev->first;
                SectionPoint landing = cur->second;
                for (int it = 0; it < 60; ++it) {
                    const double m = 0.5 * (a + b);
                    auto fm = feval(m);
                    if (!fm) break;
                    landing = fm->second;
                    if ((fa < 0.0) == (fm->first < 0.0)) {
                        a = m;
                        fa = fm->first;
                    } else {
                        b = m;
                    }
                    if (std::abs(fm->first) < 1e-10) break;
                }
                out.from_grazing.push_back(landing);
                found = true;
                break;
            }
            prev = cur;
            v_prev = v;
        }
        if (!found) ++out.skipped;
    }
    return out;
}

}  // namespace pdw
