// Adaptive Runge-Kutta integration of the swing phase with event location
// for the foot-contact guard.
#pragma once

#include <functional>
#include <vector>

#include "pdw/model.hpp"

namespace pdw {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.25;  ///< keeps the guard sampled well below the swing period
    double t_max = 50.0;     ///< time budget per step attempt
    double theta1_fall_limit = kPi / 2.0;
    bool record_trajectory = false;

    bool valid() const;
};

/// Precision targets of the event locator. The section lies exactly on the
/// guard surface, so roots closer to t = 0 than the suppression window are
/// discarded; guards are evaluated at the refined root, never at bracket ends.
inline constexpr double kEventGTol = 1e-12;
inline constexpr double kEventSuppressionTime = 1e-9;

enum class FallReason { StanceOverturn, TimeBudget, NumericalBlowup };

struct TrajectorySample {
    double t = 0.0;
    FullState state;
};

struct SwingResult {
    enum class Kind { Contact, Fall };
    Kind kind = Kind::Fall;
    FullState pre_impact;                       ///< Contact only
    double duration = 0.0;                      ///< elapsed time either way
    FallReason fall_reason = FallReason::TimeBudget;  ///< Fall only
    std::vector<TrajectorySample> trajectory;   ///< filled iff cfg.record_trajectory
};

/// Integrates the swing equations forward from s0, watching the contact
/// surface g = 2*theta1 - theta2. A sign change is refined to |g| <= 1e-12
/// and accepted only if theta1 < 0 and 2*dtheta1 - dtheta2 < 0 hold at the
/// refined root; other crossings are foot scuffs and are ignored.
SwingResult integrate_swing(const FullState& s0, const WalkerParams& p,
                            const IntegratorConfig& cfg);

struct BackwardResult {
    bool reached = false;   ///< stop condition met before the budget ran out
    FullState state;        ///< state where integration ended
    double elapsed = 0.0;   ///< reverse time elapsed, positive
    std::vector<TrajectorySample> trajectory;  ///< accepted steps, t <= 0 decreasing
};

/// stop(state, reverse_elapsed) checked at accepted steps.
using StopPredicate = std::function<bool(const FullState&, double)>;

/// Integrates in reversed time until the predicate fires or cfg.t_max of
/// reverse time elapses. Always records the trajectory.
BackwardResult integrate_swing_backward(const FullState& s0, const WalkerParams& p,
                                        const IntegratorConfig& cfg, const StopPredicate& stop);

/// Backward integration with event location on the section constraint
/// surface {theta2 - 2*theta1 = 0, theta1 > 0}; the landing is refined to
/// |theta2 - 2*theta1| <= 1e-12.
BackwardResult backward_to_section(const FullState& s0, const WalkerParams& p,
                                   const IntegratorConfig& cfg);

/// Plain flow over a signed time span (negative = backward). No events, no
/// fall classification; returns the endpoint state (possibly non-finite).
FullState integrate_flow(const FullState& s0, const WalkerParams& p, const IntegratorConfig& cfg,
                         double t_span);

}  // namespace pdw
