#include "pdw/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pdw/basin.hpp"

namespace pdw {

namespace {

/// S^period in section coordinates; empty on any fall.
std::optional<SectionPoint> map_power(const SectionPoint& q, int period, const WalkerParams& p,
                                      const IntegratorConfig& cfg) {
    SectionPoint x = q;
    for (int i = 0; i < period; ++i) {
        if (!(x.theta1 > 0.0)) return std::nullopt;
        const StepOutcome st = step(x, p, cfg);
        if (st.kind != StepOutcome::Kind::Stepped) return std::nullopt;
        x = st.next;
    }
    return x;
}

struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]
};

/// Central-difference Jacobian of S^period.
std::optional<Mat2> map_jacobian(const SectionPoint& q, int period, const WalkerParams& p,
                                 const IntegratorConfig& cfg, double h) {
    const auto fpp = map_power({q.theta1 + h, q.dtheta1}, period, p, cfg);
    const auto fpm = map_power({q.theta1 - h, q.dtheta1}, period, p, cfg);
    const auto fvp = map_power({q.theta1, q.dtheta1 + h}, period, p, cfg);
    const auto fvm = map_power({q.theta1, q.dtheta1 - h}, period, p, cfg);
    if (!fpp || !fpm || !fvp || !fvm) return std::nullopt;
    Mat2 j;
    j.a = (fpp->theta1 - fpm->theta1) / (2.0 * h);
    j.c = (fpp->dtheta1 - fpm->dtheta1) / (2.0 * h);
    j.b = (fvp->theta1 - fvm->theta1) / (2.0 * h);
    j.d = (fvp->dtheta1 - fvm->dtheta1) / (2.0 * h);
    return j;
}

std::array<std::complex<double>, 2> eigenvalues_2x2(const Mat2& m) {
    const double tr = m.a + m.d;
    const double det = m.a * m.d - m.b * m.c;
    const double disc = tr * tr - 4.0 * det;
    std::array<std::complex<double>, 2> ev;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        ev[0] = {0.5 * (tr + r), 0.0};
        ev[1] = {0.5 * (tr - r), 0.0};
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        ev[0] = {0.5 * tr, im};
        ev[1] = {0.5 * tr, -im};
    }
    if (std::abs(ev[1]) > std::abs(ev[0])) std::swap(ev[0], ev[1]);
    return ev;
}

}  // namespace

OrbitSolveResult find_periodic_orbit(const WalkerParams& p, int period, const SectionPoint& guess,
                                     const IntegratorConfig& cfg, const NewtonOptions& opts) {
    OrbitSolveResult res;
    SectionPoint q = guess;

    for (int it = 0; it < opts.max_iters; ++it) {
        res.iterations = it + 1;
        const auto fq = map_power(q, period, p, cfg);
        if (!fq) {
            res.status = OrbitSolveStatus::FellDuringNewton;
            return res;
        }
        const double r1 = fq->theta1 - q.theta1;
        const double r2 = fq->dtheta1 - q.dtheta1;

        const auto jac = map_jacobian(q, period, p, cfg, opts.fd_step);
        if (!jac) {
            res.status = OrbitSolveStatus::FellDuringNewton;
            return res;
        }
        // Solve (J - I) dq = -F.
        const double a = jac->a - 1.0, b = jac->b, c = jac->c, d = jac->d - 1.0;
        const double det = a * d - b * c;
        if (!std::isfinite(det) || std::abs(det) < 1e-14) {
            res.status = OrbitSolveStatus::NonConvergence;
            return res;
        }
        double dq1 = (-r1 * d + r2 * b) / det;
        double dq2 = (-r2 * a + r1 * c) / det;
        const double upd = std::max(std::abs(dq1), std::abs(dq2));
        if (upd > opts.max_update) {
            dq1 *= opts.max_update / upd;
            dq2 *= opts.max_update / upd;
        }
        q.theta1 += dq1;
        q.dtheta1 += dq2;

        if (std::max(std::abs(dq1), std::abs(dq2)) < opts.tol) {
            PeriodicOrbit orbit;
            orbit.period = period;
            orbit.gamma = p.gamma;
            orbit.points.push_back(q);
            SectionPoint x = q;
            for (int i = 1; i < period; ++i) {
                const StepOutcome st = step(x, p, cfg);
                if (st.kind != StepOutcome::Kind::Stepped) {
                    res.status = OrbitSolveStatus::FellDuringNewton;
                    return res;
                }
                x = st.next;
                orbit.points.push_back(x);
            }
            const auto closing = map_power(q, period, p, cfg);
            if (!closing) {
                res.status = OrbitSolveStatus::FellDuringNewton;
                return res;
            }
            orbit.residual = std::max(std::abs(closing->theta1 - q.theta1),
                                      std::abs(closing->dtheta1 - q.dtheta1));
            if (const auto js = map_jacobian(q, period, p, cfg, opts.fd_step))
                orbit.multipliers = eigenvalues_2x2(*js);
            res.orbit = std::move(orbit);
            res.status = OrbitSolveStatus::Converged;
            return res;
        }
    }
    res.status = OrbitSolveStatus::NonConvergence;
    return res;
}

ScanRecord classify_attractor(const WalkerParams& p, const SectionPoint& seed,
                              const IntegratorConfig& cfg, const ScanOptions& opts) {
    ScanRecord rec;
    rec.gamma = p.gamma;

    SectionPoint q = seed;
    for (int i = 0; i < opts.transient; ++i) {
        const StepOutcome st = step(q, p, cfg);
        if (st.kind != StepOutcome::Kind::Stepped) return rec;  // kind None
        q = st.next;
    }
    std::vector<SectionPoint> window;
    window.reserve(static_cast<std::size_t>(opts.window));
    for (int i = 0; i < opts.window; ++i) {
        const StepOutcome st = step(q, p, cfg);
        if (st.kind != StepOutcome::Kind::Stepped) return rec;
        q = st.next;
        window.push_back(q);
    }

    int period = 0;
    for (int k = 1; k <= opts.max_period && period == 0; ++k) {
        bool recur = true;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < window.size() && recur; ++i) {
            const auto& a = window[i];
            const auto& b = window[i + static_cast<std::size_t>(k)];
            if (std::abs(a.theta1 - b.theta1) > opts.recurrence_tol ||
                std::abs(a.dtheta1 - b.dtheta1) > opts.recurrence_tol)
                recur = false;
        }
        if (recur) period = k;
    }

    rec.samples = std::move(window);
    if (period > 0) {
        rec.kind = AttractorKind::Period;
        rec.period = period;
        if (opts.compute_multipliers && period <= 16) {
            const auto solve = find_periodic_orbit(p, period, rec.samples.back(), cfg);
            if (solve.status == OrbitSolveStatus::Converged)
                rec.largest_multiplier_modulus = std::abs(solve.orbit.multipliers[0]);
        }
    } else {
        rec.kind = AttractorKind::Chaotic;
    }
    return rec;
}

std::vector<ScanRecord> scan_bifurcation(const std::vector<double>& gammas,
                                         const IntegratorConfig& cfg, const ScanOptions& opts) {
    std::vector<ScanRecord> out;
    out.reserve(gammas.size());
    SectionPoint seed = opts.cold_seed;
    for (const double g : gammas) {
        const ScanRecord rec = classify_attractor(WalkerParams{g}, seed, cfg, opts);
        if (!rec.samples.empty()) seed = rec.samples.back();
        out.push_back(rec);
    }
    return out;
}

std::vector<double> gamma_grid(double lo, double hi, double step) {
    std::vector<double> g;
    const int n = static_cast<int>(std::round((hi - lo) / step));
    for (int i = 0; i <= n; ++i) g.push_back(lo + step * i);
    return g;
}

double locate_transition(double lo, double hi, double tol,
                         const std::function<bool(double, SectionPoint&)>& pred,
                         SectionPoint seed) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        SectionPoint s = seed;
        if (pred(mid, s)) {
            lo = mid;
            seed = s;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

/// Shortest distance from the attractor samples to the basin-boundary cells
/// (in-B cells with a non-in-B 4-neighbor).
double basin_boundary_gap(const RegionRaster& raster, const std::vector<SectionPoint>& samples) {
    std::vector<SectionPoint> boundary;
    const int nx = raster.spec.nx, ny = raster.spec.ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!(raster.labels[raster.index(i, j)] & kLabelInB)) continue;
            const bool edge =
                i == 0 || i == nx - 1 || j == 0 || j == ny - 1 ||
                !(raster.labels[raster.index(i - 1, j)] & kLabelInB) ||
                !(raster.labels[raster.index(i + 1, j)] & kLabelInB) ||
                !(raster.labels[raster.index(i, j - 1)] & kLabelInB) ||
                !(raster.labels[raster.index(i, j + 1)] & kLabelInB);
            if (edge) boundary.push_back(raster.spec.cell_center(i, j));
        }
    }
    if (boundary.empty() || samples.empty()) return std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        for (const auto& b : boundary) {
            const double d1 = s.theta1 - b.theta1;
            const double d2 = s.dtheta1 - b.dtheta1;
            best = std::min(best, d1 * d1 + d2 * d2);
        }
    }
    return std::sqrt(best);
}

}  // namespace

CrisisResult detect_crisis(double gamma_lo, double gamma_hi, double gamma_step,
                           const IntegratorConfig& cfg, const CrisisOptions& opts) {
    CrisisResult out;

    // Continuation ramp from a comfortably periodic slope up to gamma_lo.
    SectionPoint seed = opts.scan.cold_seed;
    for (const double g : gamma_grid(opts.seed_gamma, gamma_lo, 5e-4)) {
        const IterateResult it = iterate(seed, WalkerParams{g}, cfg, 200);
        if (it.survived == 200) seed = it.points.back();
    }

    auto survives = [&](double g, SectionPoint& s) {
        ScanOptions so = opts.scan;
        so.compute_multipliers = false;
        const ScanRecord rec = classify_attractor(WalkerParams{g}, s, cfg, so);
        if (rec.kind == AttractorKind::None) return false;
        const IterateResult it =
            iterate(rec.samples.back(), WalkerParams{g}, cfg, static_cast<std::size_t>(opts.long_steps));
        if (it.survived == static_cast<std::size_t>(opts.long_steps)) {
            s = rec.samples.back();
            return true;
        }
        return false;
    };

    GridSpec grid;
    grid.nx = opts.raster_nx;
    grid.ny = opts.raster_ny;

    double last_survivor = gamma_lo;
    double first_failure = gamma_hi;
    bool saw_failure = false;
    for (const double g : gamma_grid(gamma_lo, gamma_hi, gamma_step)) {
        CrisisRecord rec;
        rec.gamma = g;
        rec.cell_diag = grid.cell_diag();

        ScanOptions so = opts.scan;
        so.compute_multipliers = false;
        const ScanRecord att = classify_attractor(WalkerParams{g}, seed, cfg, so);
        rec.attractor_samples = static_cast<int>(att.samples.size());
        if (att.kind != AttractorKind::None) {
            seed = att.samples.back();
            const IterateResult longrun =
                iterate(att.samples.back(), WalkerParams{g}, cfg,
                        static_cast<std::size_t>(opts.long_steps));
            rec.survived_long = longrun.survived == static_cast<std::size_t>(opts.long_steps);
            const RegionRaster basin =
                compute_basin(WalkerParams{g}, grid, cfg, 50, 200, opts.workers);
            rec.gap = basin_boundary_gap(basin, att.samples);
        }
        if (rec.survived_long) {
            last_survivor = std::max(last_survivor, g);
        } else if (!saw_failure) {
            first_failure = g;
            saw_failure = true;
        }
        out.records.push_back(rec);
    }

    double lo = last_survivor;
    double hi = saw_failure ? std::max(first_failure, lo + opts.refine_tol) : gamma_hi;
    SectionPoint s = seed;
    while (hi - lo > opts.refine_tol) {
        const double mid = 0.5 * (lo + hi);
        SectionPoint trial = s;
        if (survives(mid, trial)) {
            lo = mid;
            s = trial;
        } else {
            hi = mid;
        }
    }
    out.gamma_crisis_lo = lo;
    out.gamma_crisis_hi = hi;
    return out;
}

}  // namespace pdw
