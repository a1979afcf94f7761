#include "pdw/hybrid.hpp"

#include <cmath>
#include <stdexcept>

namespace pdw {

FullState apply_impact(const FullState& pre) {
    if (std::abs(2.0 * pre.theta1 - pre.theta2) > kImpactInputTol)
        throw std::invalid_argument("apply_impact: state violates the contact constraint");

    const double c = std::cos(2.0 * pre.theta1);
    FullState post;
    post.theta1 = -pre.theta1;
    post.theta2 = -2.0 * pre.theta1;
    post.dtheta1 = pre.dtheta1 * c;
    post.dtheta2 = post.dtheta1 * (1.0 - c);  // = cos(2 th1)(1 - cos(2 th1)) dtheta1-
    return post;
}

FullState embed_section(const SectionPoint& q) {
    if (!(q.theta1 > 0.0)) throw std::invalid_argument("embed_section: requires theta1 > 0");
    FullState s;
    s.theta1 = q.theta1;
    s.theta2 = 2.0 * q.theta1;
    s.dtheta1 = q.dtheta1;
    s.dtheta2 = q.dtheta1 * (1.0 - std::cos(2.0 * q.theta1));
    return s;
}

SectionPoint project_section(const FullState& post) { return SectionPoint{post.theta1, post.dtheta1}; }

StepOutcome step(const SectionPoint& q, const WalkerParams& p, const IntegratorConfig& cfg) {
    StepOutcome out;
    const SwingResult swing = integrate_swing(embed_section(q), p, cfg);
    out.duration = swing.duration;
    if (swing.kind == SwingResult::Kind::Fall) {
        out.kind = StepOutcome::Kind::Fell;
        out.fall_reason = swing.fall_reason;
        return out;
    }
    out.pre_impact = swing.pre_impact;
    out.next = project_section(apply_impact(swing.pre_impact));
    out.kind = StepOutcome::Kind::Stepped;
    return out;
}

IterateResult iterate(const SectionPoint& q0, const WalkerParams& p, const IntegratorConfig& cfg,
                      std::size_t n_max) {
    IterateResult res;
    res.points.reserve(n_max + 1);
    res.points.push_back(q0);
    SectionPoint q = q0;
    for (std::size_t i = 0; i < n_max; ++i) {
        res.last = step(q, p, cfg);
        if (res.last.kind == StepOutcome::Kind::Fell) return res;
        q = res.last.next;
        res.points.push_back(q);
        ++res.survived;
    }
    return res;
}

}  // namespace pdw
