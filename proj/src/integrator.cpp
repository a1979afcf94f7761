#include "pdw/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdw {

bool IntegratorConfig::valid() const {
    auto tol_ok = [](double v) { return v >= 1e-14 && v <= 1e-4; };
    return tol_ok(rel_tol) && tol_ok(abs_tol) && max_step > 0.0 && t_max > 0.0 &&
           theta1_fall_limit > 0.0 && theta1_fall_limit <= kPi / 2.0;
}

namespace {

using Vec4 = std::array<double, 4>;

Vec4 to_vec(const FullState& s) { return {s.theta1, s.theta2, s.dtheta1, s.dtheta2}; }
FullState to_state(const Vec4& y) { return FullState{y[0], y[1], y[2], y[3]}; }

bool vec_finite(const Vec4& y) {
    return std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]) &&
           std::isfinite(y[3]);
}

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b_hat, applied to (k1, k3, k4, k5, k6, k7).
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output weights for the stiffly accurate 4th-order interpolant.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct Derivs {
    const WalkerParams& p;
    double dir;  // +1 forward, -1 reversed time

    Vec4 operator()(const Vec4& y) const {
        const FullState f = vector_field(to_state(y), p);
        return {dir * f.theta1, dir * f.theta2, dir * f.dtheta1, dir * f.dtheta2};
    }
};

/// One accepted step's worth of dense output: evaluates the continuous
/// extension at theta in [0, 1] across [t0, t0 + h].
struct DenseSegment {
    double t0 = 0.0, h = 0.0;
    Vec4 rcont1{}, rcont2{}, rcont3{}, rcont4{}, rcont5{};

    Vec4 eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec4 y;
        for (int i = 0; i < 4; ++i) {
            y[static_cast<std::size_t>(i)] =
                rcont1[static_cast<std::size_t>(i)] +
                th * (rcont2[static_cast<std::size_t>(i)] +
                      th1 * (rcont3[static_cast<std::size_t>(i)] +
                             th * (rcont4[static_cast<std::size_t>(i)] +
                                   th1 * rcont5[static_cast<std::size_t>(i)])));
        }
        return y;
    }
};

struct StepResult {
    Vec4 y_new{};
    Vec4 k_new{};  // FSAL derivative at y_new
    double err = 0.0;
    DenseSegment dense;
};

/// Single trial step of size h from (t, y) with derivative k1 = f(y).
StepResult dp5_step(const Derivs& f, double t, const Vec4& y, const Vec4& k1, double h,
                    double abs_tol, double rel_tol) {
    auto axpy = [&](std::initializer_list<std::pair<double, const Vec4*>> terms) {
        Vec4 r = y;
        for (const auto& [c, k] : terms)
            for (int i = 0; i < 4; ++i)
                r[static_cast<std::size_t>(i)] += h * c * (*k)[static_cast<std::size_t>(i)];
        return r;
    };

    const Vec4 k2 = f(axpy({{a21, &k1}}));
    const Vec4 k3 = f(axpy({{a31, &k1}, {a32, &k2}}));
    const Vec4 k4 = f(axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec4 k5 = f(axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec4 k6 = f(axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));

    StepResult r;
    for (int i = 0; i < 4; ++i) {
        const auto u = static_cast<std::size_t>(i);
        r.y_new[u] = y[u] + h * (b1 * k1[u] + b3 * k3[u] + b4 * k4[u] + b5 * k5[u] + b6 * k6[u]);
    }
    r.k_new = f(r.y_new);

    double err_sq = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double e = h * (e1 * k1[u] + e3 * k3[u] + e4 * k4[u] + e5 * k5[u] + e6 * k6[u] +
                              e7 * r.k_new[u]);
        const double sc = abs_tol + rel_tol * std::max(std::abs(y[u]), std::abs(r.y_new[u]));
        err_sq += (e / sc) * (e / sc);
    }
    r.err = std::sqrt(err_sq / 4.0);

    r.dense.t0 = t;
    r.dense.h = h;
    for (int i = 0; i < 4; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double ydiff = r.y_new[u] - y[u];
        const double bspl = h * k1[u] - ydiff;
        r.dense.rcont1[u] = y[u];
        r.dense.rcont2[u] = ydiff;
        r.dense.rcont3[u] = bspl;
        r.dense.rcont4[u] = ydiff - h * r.k_new[u] - bspl;
        r.dense.rcont5[u] = h * (d1 * k1[u] + d3 * k3[u] + d4 * k4[u] + d5 * k5[u] + d6 * k6[u] +
                                 d7 * r.k_new[u]);
    }
    return r;
}

double initial_step(const Derivs& f, const Vec4& y0, const Vec4& f0, double abs_tol,
                    double rel_tol, double max_step) {
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double sc = abs_tol + rel_tol * std::abs(y0[u]);
        d0 = std::max(d0, std::abs(y0[u]) / sc);
        d1n = std::max(d1n, std::abs(f0[u]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, max_step);

    // One Euler probe to estimate the second derivative scale.
    Vec4 y1;
    for (int i = 0; i < 4; ++i) {
        const auto u = static_cast<std::size_t>(i);
        y1[u] = y0[u] + h0 * f0[u];
    }
    const Vec4 f1 = f(y1);
    double d2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double sc = abs_tol + rel_tol * std::abs(y0[u]);
        d2 = std::max(d2, std::abs(f1[u] - f0[u]) / sc / h0);
    }
    const double dmax = std::max(d1n, d2);
    const double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                      : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, max_step});
}

/// Event surface description: refined root accepted only if guard passes.
struct EventSpec {
    std::function<double(const Vec4&)> g;
    std::function<double(const Vec4&)> gdot;
    std::function<bool(const Vec4&)> guard;
};

struct EventHit {
    bool found = false;
    double t = 0.0;
    Vec4 y{};
};

/// Locates g = 0 inside an accepted dense segment, then polishes the state
/// along the flow with Newton corrections dt = -g/gdot so that the returned
/// state both lies on the numerical orbit and satisfies |g| <= kEventGTol.
EventHit refine_event(const Derivs& f, const DenseSegment& seg, const EventSpec& ev) {
    double lo = seg.t0, hi = seg.t0 + seg.h;
    double glo = ev.g(seg.eval(lo));
    double t_mid = hi;
    for (int it = 0; it < 80; ++it) {
        t_mid = 0.5 * (lo + hi);
        const double gm = ev.g(seg.eval(t_mid));
        if (gm == 0.0) break;
        if ((glo < 0.0) == (gm < 0.0)) {
            lo = t_mid;
            glo = gm;
        } else {
            hi = t_mid;
        }
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
    }

    EventHit hit;
    hit.t = t_mid;
    hit.y = seg.eval(t_mid);

    // Flow-accurate polish; the correction steps are tiny, a single RK4
    // sub-step carries negligible truncation error.
    for (int it = 0; it < 12; ++it) {
        const double gval = ev.g(hit.y);
        if (std::abs(gval) <= kEventGTol) break;
        const double gd = ev.gdot(hit.y);
        if (!std::isfinite(gd) || std::abs(gd) < 1e-12) break;
        const double dt = -gval / gd;
        const Vec4 k1 = f(hit.y);
        Vec4 y2, y3, y4;
        for (int i = 0; i < 4; ++i) {
            const auto u = static_cast<std::size_t>(i);
            y2[u] = hit.y[u] + 0.5 * dt * k1[u];
        }
        const Vec4 k2 = f(y2);
        for (int i = 0; i < 4; ++i) {
            const auto u = static_cast<std::size_t>(i);
            y3[u] = hit.y[u] + 0.5 * dt * k2[u];
        }
        const Vec4 k3 = f(y3);
        for (int i = 0; i < 4; ++i) {
            const auto u = static_cast<std::size_t>(i);
            y4[u] = hit.y[u] + dt * k3[u];
        }
        const Vec4 k4 = f(y4);
        for (int i = 0; i < 4; ++i) {
            const auto u = static_cast<std::size_t>(i);
            hit.y[u] += dt / 6.0 * (k1[u] + 2.0 * k2[u] + 2.0 * k3[u] + k4[u]);
        }
        hit.t += dt;
    }
    hit.found = std::abs(ev.g(hit.y)) <= kEventGTol;
    return hit;
}

enum class DriveStop { Event, Budget, Blowup, Overturn, Predicate };

struct DriveResult {
    DriveStop stop = DriveStop::Budget;
    double t = 0.0;  // elapsed integration time (positive in each direction)
    Vec4 y{};
    std::vector<TrajectorySample> trajectory;
};

/// Shared adaptive driver; `dir` only flips the vector field, elapsed time
/// stays positive. Samples are recorded with signed times (dir * t).
DriveResult drive(const Vec4& y0, const WalkerParams& p, const IntegratorConfig& cfg, double dir,
                  double budget, const EventSpec* event, const StopPredicate* predicate,
                  bool record, bool check_falls) {
    const Derivs f{p, dir};
    DriveResult out;
    out.y = y0;

    double t = 0.0;
    Vec4 y = y0;
    Vec4 k1 = f(y);
    double h = initial_step(f, y, k1, cfg.abs_tol, cfg.rel_tol, cfg.max_step);
    double g_prev = event ? event->g(y) : 0.0;

    if (record) out.trajectory.push_back({0.0, to_state(y)});
    if (predicate && (*predicate)(to_state(y), 0.0)) {
        out.stop = DriveStop::Predicate;
        return out;
    }

    int consecutive_rejects = 0;
    while (t < budget) {
        h = std::min({h, cfg.max_step, budget - t});
        if (h < 1e-14) {
            t = budget;
            break;
        }

        const StepResult st = dp5_step(f, t, y, k1, h, cfg.abs_tol, cfg.rel_tol);

        if (!vec_finite(st.y_new) || !std::isfinite(st.err)) {
            if (h > 1e-12) {  // retry smaller before giving up
                h *= 0.25;
                if (++consecutive_rejects < 60) continue;
            }
            out.stop = DriveStop::Blowup;
            out.t = t;
            out.y = st.y_new;
            return out;
        }

        if (st.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            ++consecutive_rejects;
            if (consecutive_rejects > 200) {
                out.stop = DriveStop::Blowup;
                out.t = t;
                out.y = y;
                return out;
            }
            continue;
        }

        const double t_new = t + h;

        if (event) {
            const double g_new = event->g(st.y_new);
            const bool crossed = (g_prev < 0.0 && g_new > 0.0) || (g_prev > 0.0 && g_new < 0.0) ||
                                 (g_new == 0.0 && g_prev != 0.0);
            if (crossed) {
                const EventHit hit = refine_event(f, st.dense, *event);
                if (hit.found && hit.t >= kEventSuppressionTime && event->guard(hit.y)) {
                    out.stop = DriveStop::Event;
                    out.t = hit.t;
                    out.y = hit.y;
                    if (record) out.trajectory.push_back({dir * hit.t, to_state(hit.y)});
                    return out;
                }
                // Guard-violating crossing (foot scuff) or suppressed root:
                // resume from the step end.
            }
            g_prev = g_new;
        }

        t = t_new;
        y = st.y_new;
        k1 = st.k_new;
        if (record) out.trajectory.push_back({dir * t, to_state(y)});

        if (check_falls && std::abs(y[0]) >= cfg.theta1_fall_limit) {
            out.stop = DriveStop::Overturn;
            out.t = t;
            out.y = y;
            return out;
        }
        if (predicate && (*predicate)(to_state(y), t)) {
            out.stop = DriveStop::Predicate;
            out.t = t;
            out.y = y;
            return out;
        }

        const double grow = std::min(5.0, 0.9 * std::pow(std::max(st.err, 1e-10), -0.2));
        h *= (consecutive_rejects > 0) ? std::min(grow, 1.0) : grow;
        consecutive_rejects = 0;
    }

    out.stop = DriveStop::Budget;
    out.t = t;
    out.y = y;
    return out;
}

EventSpec contact_event() {
    return EventSpec{
        [](const Vec4& y) { return 2.0 * y[0] - y[1]; },
        [](const Vec4& y) { return 2.0 * y[2] - y[3]; },
        [](const Vec4& y) { return y[0] < 0.0 && 2.0 * y[2] - y[3] < 0.0; },
    };
}

EventSpec section_landing_event() {
    return EventSpec{
        [](const Vec4& y) { return y[1] - 2.0 * y[0]; },
        // gdot in reversed time: d/dtau (theta2 - 2 theta1) = -(dtheta2 - 2 dtheta1)
        [](const Vec4& y) { return -(y[3] - 2.0 * y[2]); },
        // A genuine landing is approached with the surface value decreasing in
        // reverse time (2 dtheta1 - dtheta2 < 0, as at a post-impact state);
        // the opposite direction is the swing leg scuffing past mid-swing.
        [](const Vec4& y) { return y[0] > 0.0 && 2.0 * y[2] - y[3] < 0.0; },
    };
}

}  // namespace

SwingResult integrate_swing(const FullState& s0, const WalkerParams& p,
                            const IntegratorConfig& cfg) {
    SwingResult res;
    if (!s0.finite()) {
        res.kind = SwingResult::Kind::Fall;
        res.fall_reason = FallReason::NumericalBlowup;
        return res;
    }
    const EventSpec ev = contact_event();
    DriveResult dr = drive(to_vec(s0), p, cfg, +1.0, cfg.t_max, &ev, nullptr,
                           cfg.record_trajectory, /*check_falls=*/true);
    res.duration = dr.t;
    res.trajectory = std::move(dr.trajectory);
    switch (dr.stop) {
        case DriveStop::Event:
            res.kind = SwingResult::Kind::Contact;
            res.pre_impact = to_state(dr.y);
            break;
        case DriveStop::Overturn:
            res.kind = SwingResult::Kind::Fall;
            res.fall_reason = FallReason::StanceOverturn;
            break;
        case DriveStop::Blowup:
            res.kind = SwingResult::Kind::Fall;
            res.fall_reason = FallReason::NumericalBlowup;
            break;
        default:
            res.kind = SwingResult::Kind::Fall;
            res.fall_reason = FallReason::TimeBudget;
            break;
    }
    return res;
}

BackwardResult integrate_swing_backward(const FullState& s0, const WalkerParams& p,
                                        const IntegratorConfig& cfg, const StopPredicate& stop) {
    BackwardResult res;
    DriveResult dr =
        drive(to_vec(s0), p, cfg, -1.0, cfg.t_max, nullptr, &stop, /*record=*/true,
              /*check_falls=*/false);
    res.reached = dr.stop == DriveStop::Predicate;
    res.state = to_state(dr.y);
    res.elapsed = dr.t;
    res.trajectory = std::move(dr.trajectory);
    return res;
}

BackwardResult backward_to_section(const FullState& s0, const WalkerParams& p,
                                   const IntegratorConfig& cfg) {
    BackwardResult res;
    const EventSpec ev = section_landing_event();
    DriveResult dr = drive(to_vec(s0), p, cfg, -1.0, cfg.t_max, &ev, nullptr,
                           cfg.record_trajectory, /*check_falls=*/true);
    res.reached = dr.stop == DriveStop::Event;
    res.state = to_state(dr.y);
    res.elapsed = dr.t;
    res.trajectory = std::move(dr.trajectory);
    return res;
}

FullState integrate_flow(const FullState& s0, const WalkerParams& p, const IntegratorConfig& cfg,
                         double t_span) {
    if (t_span == 0.0) return s0;
    const double dir = t_span > 0.0 ? 1.0 : -1.0;
    DriveResult dr = drive(to_vec(s0), p, cfg, dir, std::abs(t_span), nullptr, nullptr,
                           /*record=*/false, /*check_falls=*/false);
    return to_state(dr.y);
}

}  // namespace pdw
