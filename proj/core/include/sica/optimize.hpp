#ifndef SICA_OPTIMIZE_HPP
#define SICA_OPTIMIZE_HPP

#include <vector>

#include "sica/adjoint.hpp"
#include "sica/forward.hpp"

namespace sica {

/// Knobs of the forward-backward sweep iteration.
struct FbsmConfig {
    int max_iters = 200;
    double tol = 1e-4;           // relative change of u in the discrete L2(Q) norm
    double relaxation = 0.5;     // theta in (0, 1]
    JacobianMode jacobian = JacobianMode::full;

    // Step-size safeguard: halve theta when J would increase beyond the
    // descent slack, down to `relaxation_floor`; restore the configured
    // value after `reset_after_successes` accepted steps.
    double relaxation_floor = 1.0 / 64.0;
    int reset_after_successes = 5;
    double descent_slack_rel = 1e-8;  // slack per iteration, relative to J_0

    void validate() const;

    bool operator==(const FbsmConfig&) const = default;
};

struct OptimizationResult {
    ControlTrajectory control;
    StateTrajectory states;      // recomputed with the final control
    AdjointTrajectory adjoints;  // recomputed with the final control
    std::vector<double> objective_history;
    bool converged = false;
    int iterations = 0;
};

/// Discrete objective J = int_Q a*I + (b/2) int_Q u^2, trapezoid in time
/// and space. Throws ValidationError on mismatched trajectories.
double evaluate_objective(const StateTrajectory& states, const ControlTrajectory& controls,
                          const ObjectiveConfig& cfg, const GridSpec& g);

/// Pointwise optimality projection: u = min(u_max, max(0, I*(p2 - p1)/b)).
Field project_control(const Field& infected, const Field& p1, const Field& p2,
                      const ObjectiveConfig& cfg);

/// Discrete L2(Q) norm of a control trajectory (trapezoid in time and space).
double control_norm(const ControlTrajectory& u, const GridSpec& g, const TimeSpec& t);

/// Discrete L2(Q) norm of the difference of two control trajectories.
double control_diff_norm(const ControlTrajectory& a, const ControlTrajectory& b,
                         const GridSpec& g, const TimeSpec& t);

/// Adjoint-based directional derivative of J at `controls` in direction
/// `delta`: int_Q (b*u - R^T p) * delta, with R = (-I, I, 0, 0) evaluated
/// on the state trajectory. The coupling term pairs the state at each level
/// with the adjoint one level later, which makes the result track central
/// finite differences of the discrete J to O(dt) with a small constant.
double adjoint_directional_derivative(const StateTrajectory& states,
                                      const AdjointTrajectory& adjoints,
                                      const ControlTrajectory& controls,
                                      const ControlTrajectory& delta,
                                      const ObjectiveConfig& cfg, const GridSpec& g);

/// Forward-backward sweep iteration:
///   forward solve -> backward adjoint solve -> projection -> relaxation,
/// starting from u = 0, until the relative L2(Q) change of the control
/// drops below tol or max_iters is reached. A candidate step that would
/// raise J beyond the descent slack is retried with halved relaxation; if
/// even the floor step raises J the iteration stops on the last accepted
/// control. The recorded objective history is therefore non-increasing up
/// to the slack.
///
/// A run that exhausts max_iters still returns the last iterate, flagged.
OptimizationResult fbsm_optimize(const StateFields& z0, const ModelParams& p,
                                 const GridSpec& g, const TimeSpec& t,
                                 const ObjectiveConfig& cfg, const FbsmConfig& fc);

}  // namespace sica

#endif  // SICA_OPTIMIZE_HPP
