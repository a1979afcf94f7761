// The impact map, the section embedding, and the step map composed from
// swing integration and impact.
#pragma once

#include <cstddef>
#include <vector>

#include "pdw/integrator.hpp"
#include "pdw/model.hpp"

namespace pdw {

/// Tolerance on the contact constraint |2*theta1 - theta2| accepted by
/// apply_impact; wider than the event locator by three orders.
inline constexpr double kImpactInputTol = 1e-9;

/// Instantaneous inelastic impact with leg exchange:
///   theta1+ = -theta1-, dtheta1+ = dtheta1- cos(2 theta1-),
///   theta2+ = -2 theta1-, dtheta2+ = cos(2 theta1-)(1 - cos(2 theta1-)) dtheta1-.
/// Throws std::invalid_argument if the input violates the contact constraint
/// beyond kImpactInputTol (an upstream event-location bug, not a model outcome).
FullState apply_impact(const FullState& pre);

/// Lifts section coordinates to the full post-impact state
/// (theta1, 2*theta1, dtheta1, dtheta1*(1 - cos(2*theta1))).
/// Throws std::invalid_argument unless q.theta1 > 0.
FullState embed_section(const SectionPoint& q);

/// Drops a post-impact state to its section coordinates.
SectionPoint project_section(const FullState& post);

struct StepOutcome {
    enum class Kind { Stepped, Fell };
    Kind kind = Kind::Fell;
    SectionPoint next;     ///< Stepped only
    FullState pre_impact;  ///< valid when a contact was located
    double duration = 0.0;
    FallReason fall_reason = FallReason::TimeBudget;  ///< Fell only
};

/// One application of the section-to-section map: embed, integrate the swing,
/// and on contact apply the impact and project back to the section.
StepOutcome step(const SectionPoint& q, const WalkerParams& p, const IntegratorConfig& cfg);

struct IterateResult {
    std::vector<SectionPoint> points;  ///< visited points, starting with q0
    std::size_t survived = 0;          ///< number of completed steps
    StepOutcome last;                  ///< outcome of the final attempted step
};

/// Repeated step; stops at the first fall. points.size() == survived + 1.
IterateResult iterate(const SectionPoint& q0, const WalkerParams& p, const IntegratorConfig& cfg,
                      std::size_t n_max);

}  // namespace pdw
