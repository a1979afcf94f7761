#include "pdw/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace pdw {

ModalCoords modal_from_state(const FullState& s, const WalkerParams& p) {
    ModalCoords m;
    m.c1 = 0.5 * (s.theta1 - p.gamma + s.dtheta1);
    m.c2 = 0.5 * (s.theta1 - p.gamma - s.dtheta1);
    const double u = s.theta2 - 0.5 * (s.theta1 - p.gamma);
    const double du = s.dtheta2 - 0.5 * s.dtheta1;  // = -k sin(phi) at t = 0
    m.k = std::hypot(u, du);
    m.phi = (m.k == 0.0) ? 0.0 : std::atan2(-du, u);
    if (m.phi < 0.0) m.phi += 2.0 * kPi;
    return m;
}

FullState linearized_flow(const ModalCoords& m, double t, const WalkerParams& p) {
    const double ep = std::exp(t), en = std::exp(-t);
    FullState s;
    s.theta1 = p.gamma + m.c1 * ep + m.c2 * en;
    s.dtheta1 = m.c1 * ep - m.c2 * en;
    s.theta2 = 0.5 * (s.theta1 - p.gamma) + m.k * std::cos(t + m.phi);
    s.dtheta2 = 0.5 * s.dtheta1 - m.k * std::sin(t + m.phi);
    return s;
}

namespace {

struct Probe {
    double theta1b = 0.0, dtheta1b = 0.0;
    double kcos = 0.0, ksin = 0.0;  // k cos(-delta+phi), k sin(-delta+phi)
    double residual = 0.0;
    bool valid = false;  // theta1(-delta) > 0
};

Probe probe_at(double delta, double c1, double c2, double gamma) {
    Probe pr;
    const double ep = std::exp(delta), en = std::exp(-delta);
    pr.theta1b = c1 * en + c2 * ep + gamma;
    pr.dtheta1b = c1 * en - c2 * ep;
    pr.valid = pr.theta1b > 0.0;
    pr.kcos = 1.5 * pr.theta1b + 0.5 * gamma;
    pr.ksin = -pr.dtheta1b * (0.5 - std::cos(2.0 * pr.theta1b));
    const double k = std::hypot(pr.kcos, pr.ksin);
    const double phi = delta + std::atan2(pr.ksin, pr.kcos);
    pr.residual = k * std::cos(phi) - 1.5 * (c1 + c2 + 4.0 * gamma / 3.0);
    return pr;
}

std::optional<BackstepSolution> make_solution(double delta, double c1, double c2, double gamma) {
    const Probe pr = probe_at(delta, c1, c2, gamma);
    if (!pr.valid) return std::nullopt;
    // Landing states past a horizontal stance leg are artifacts of the
    // oscillatory large-delta tail of the residual, not step candidates.
    if (pr.theta1b >= kPi / 2.0) return std::nullopt;
    BackstepSolution sol;
    sol.delta = delta;
    sol.theta1_back = pr.theta1b;
    sol.dtheta1_back = pr.dtheta1b;
    sol.k = std::hypot(pr.kcos, pr.ksin);
    sol.phi = delta + std::atan2(pr.ksin, pr.kcos);
    sol.d = std::abs(pr.theta1b - gamma - pr.dtheta1b) / std::sqrt(2.0);
    // The contact-phase equation demands k cos(phi) < 0 here; reject phases
    // outside (pi/2, 3pi/2) mod 2pi as spurious branches.
    double pm = std::fmod(sol.phi, 2.0 * kPi);
    if (pm < 0.0) pm += 2.0 * kPi;
    if (!(pm > kPi / 2.0 && pm < 1.5 * kPi)) return std::nullopt;
    return sol;
}

}  // namespace

BackstepResult solve_backstep(double c1, double c2, const WalkerParams& p,
                              const BackstepOptions& opts) {
    BackstepResult out;
    if (c1 < opts.c1_lo || c1 > opts.c1_hi || c2 < opts.c2_lo || c2 > opts.c2_hi) {
        out.status = BackstepStatus::OutOfBox;
        return out;
    }

    const double g = p.gamma;
    std::vector<double> roots;
    const double dstep = opts.delta_max / opts.scan_points;
    Probe prev = probe_at(dstep, c1, c2, g);
    for (int i = 2; i <= opts.scan_points; ++i) {
        const double delta = dstep * i;
        const Probe cur = probe_at(delta, c1, c2, g);
        if (prev.valid && cur.valid && prev.residual * cur.residual < 0.0) {
            double a = delta - dstep, b = delta;
            double fa = prev.residual;
            while (b - a > opts.bisect_tol) {
                const double m = 0.5 * (a + b);
                const double fm = probe_at(m, c1, c2, g).residual;
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = cur;
    }

    std::optional<BackstepSolution> best;
    double best_key = std::numeric_limits<double>::infinity();
    for (const double r : roots) {
        const auto sol = make_solution(r, c1, c2, g);
        if (!sol) continue;
        const double key = opts.has_hint ? std::abs(r - opts.delta_hint) : r;
        if (key < best_key) {
            best_key = key;
            best = sol;
        }
    }
    if (!best) {
        out.status = BackstepStatus::NoRoot;
        return out;
    }
    if (opts.has_hint && std::abs(best->delta - opts.delta_hint) > opts.branch_threshold) {
        out.status = BackstepStatus::BranchJump;
        out.sol = *best;
        return out;
    }
    out.status = BackstepStatus::Ok;
    out.sol = *best;
    return out;
}

std::vector<PqPoint> pq_segment(int samples, const WalkerParams& p) {
    if (samples < 2) throw std::invalid_argument("pq_segment: needs at least 2 samples");
    // Modal ranges of the segment: c2 in (0.0038, 0.075) with c1 running
    // linearly from -0.22 to -0.45 across it.
    constexpr double c2_lo = 0.0038, c2_hi = 0.075;
    constexpr double c1_at_lo = -0.22, c1_at_hi = -0.45;
    std::vector<PqPoint> pts;
    pts.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        PqPoint pt;
        const double f = static_cast<double>(i) / (samples - 1);
        pt.c2 = c2_lo + f * (c2_hi - c2_lo);
        pt.c1 = c1_at_lo + (pt.c2 - c2_lo) / (c2_hi - c2_lo) * (c1_at_hi - c1_at_lo);
        pt.h_point.theta1 = p.gamma + pt.c1 + pt.c2;
        pt.h_point.dtheta1 = pt.c1 - pt.c2;
        pts.push_back(pt);
    }
    return pts;
}

std::vector<DeformationRow> deformation_study(const WalkerParams& p, int samples,
                                              const BackstepOptions& opts) {
    const std::vector<PqPoint> pq = pq_segment(samples, p);
    std::vector<DeformationRow> rows(pq.size());

    // Anchor at the largest-c2 end, then track the branch by continuity
    // toward the singular small-c2 end.
    BackstepOptions row_opts = opts;
    row_opts.has_hint = false;
    double phi_prev = 0.0;
    bool have_prev_phi = false;
    for (std::size_t n = pq.size(); n-- > 0;) {
        const PqPoint& pt = pq[n];
        DeformationRow& row = rows[n];
        row.c1 = pt.c1;
        row.c2 = pt.c2;
        const BackstepResult r = solve_backstep(pt.c1, pt.c2, p, row_opts);
        row.status = r.status;
        if (r.status != BackstepStatus::Ok) {
            row_opts.has_hint = false;  // re-anchor if the branch resumes
            have_prev_phi = false;
            continue;
        }
        row.delta = r.sol.delta;
        row.k = r.sol.k;
        row.theta1_back = r.sol.theta1_back;
        row.dtheta1_back = r.sol.dtheta1_back;
        row.d_exact = r.sol.d;
        row.d_paper_approx = std::sqrt(2.0) * r.sol.theta1_back;
        row.lhs20 = -r.sol.dtheta1_back / (r.sol.theta1_back + p.gamma / 3.0);

        double phi = r.sol.phi;
        if (have_prev_phi) phi += 2.0 * kPi * std::round((phi_prev - phi) / (2.0 * kPi));
        row.phi_unwrapped = phi;
        double pm = std::fmod(phi, 2.0 * kPi);
        if (pm < 0.0) pm += 2.0 * kPi;
        row.phi_mod = pm;
        phi_prev = phi;
        have_prev_phi = true;

        row_opts.has_hint = true;
        row_opts.delta_hint = r.sol.delta;
    }
    return rows;
}

std::vector<SectionPoint> preimage_T_of(const std::vector<SectionPoint>& points) {
    std::vector<SectionPoint> pre;
    pre.reserve(points.size());
    for (const auto& q : points) {
        if (std::abs(2.0 * q.theta1) >= kPi / 2.0 - 1e-6)
            throw std::invalid_argument("preimage_T_of: point at the secant singularity");
        pre.push_back({-q.theta1, q.dtheta1 / std::cos(2.0 * q.theta1)});
    }
    return pre;
}

const char* to_string(BackstepStatus s) {
    switch (s) {
        case BackstepStatus::Ok: return "ok";
        case BackstepStatus::NoRoot: return "no_root";
        case BackstepStatus::BranchJump: return "branch_jump";
        case BackstepStatus::OutOfBox: return "out_of_box";
    }
    return "unknown";
}

}  // namespace pdw
