#include "sica/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sica/errors.hpp"

namespace sica {

void FbsmConfig::validate() const {
    if (max_iters < 1) throw ValidationError("max_iters", "must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("tol", "must be > 0");
    if (!(relaxation > 0.0 && relaxation <= 1.0))
        throw ValidationError("theta", "must lie in (0, 1]");
    if (!(relaxation_floor > 0.0 && relaxation_floor <= relaxation))
        throw ValidationError("theta_floor", "must lie in (0, theta]");
    if (reset_after_successes < 1)
        throw ValidationError("theta_reset_after", "must be >= 1");
    if (!(descent_slack_rel >= 0.0))
        throw ValidationError("descent_slack", "must be >= 0");
}

namespace {

// Time-trapezoid weight of level n: 1/2 at both ends of the horizon.
double time_weight(int n, int steps) {
    return (n == 0 || n == steps) ? 0.5 : 1.0;
}

}  // namespace

double evaluate_objective(const StateTrajectory& states, const ControlTrajectory& controls,
                          const ObjectiveConfig& cfg, const GridSpec& g) {
    const TimeSpec& t = states.time;
    if (static_cast<int>(states.levels.size()) != t.levels())
        throw ValidationError("states", "trajectory is missing time levels");
    if (controls.levels() < t.levels())
        throw ValidationError("control", "trajectory has fewer levels than the states");

    double infection = 0.0;
    double effort = 0.0;
    for (int n = 0; n < t.levels(); ++n) {
        const double w = time_weight(n, t.steps) * t.dt;
        infection += w * integrate_field(states.at(n).i, g);
        const Field& u = controls.level(n);
        effort += w * weighted_inner(u, u, g);
    }
    if (t.steps == 0) {
        // Degenerate zero-length horizon: the time integral is empty.
        return 0.0;
    }
    return cfg.infection_weight * infection + 0.5 * cfg.control_weight * effort;
}

Field project_control(const Field& infected, const Field& p1, const Field& p2,
                      const ObjectiveConfig& cfg) {
    if (!(cfg.control_weight > 0.0))
        throw ValidationError("b", "control weight must be > 0");
    Field u(infected.nx(), infected.ny());
    const auto iv = infected.values();
    const auto v1 = p1.values();
    const auto v2 = p2.values();
    auto out = u.values();
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double raw = iv[k] * (v2[k] - v1[k]) / cfg.control_weight;
        out[k] = std::min(cfg.u_max, std::max(0.0, raw));
    }
    return u;
}

double control_norm(const ControlTrajectory& u, const GridSpec& g, const TimeSpec& t) {
    double acc = 0.0;
    for (int n = 0; n < t.levels(); ++n) {
        const Field& un = u.level(n);
        acc += time_weight(n, t.steps) * t.dt * weighted_inner(un, un, g);
    }
    return std::sqrt(acc);
}

double control_diff_norm(const ControlTrajectory& a, const ControlTrajectory& b,
                         const GridSpec& g, const TimeSpec& t) {
    double acc = 0.0;
    for (int n = 0; n < t.levels(); ++n) {
        const Field& ua = a.level(n);
        const Field& ub = b.level(n);
        const double w = time_weight(n, t.steps) * t.dt;
        double level_acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            double row = 0.0;
            for (int j = 0; j < g.ny; ++j) {
                const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
                const double d = ua(i, j) - ub(i, j);
                row += wy * d * d;
            }
            level_acc += wx * row;
        }
        acc += w * level_acc * g.dx() * g.dy();
    }
    return std::sqrt(acc);
}

double adjoint_directional_derivative(const StateTrajectory& states,
                                      const AdjointTrajectory& adjoints,
                                      const ControlTrajectory& controls,
                                      const ControlTrajectory& delta,
                                      const ObjectiveConfig& cfg, const GridSpec& g) {
    const TimeSpec& t = states.time;
    if (adjoints.levels.size() != states.levels.size())
        throw ValidationError("adjoints", "trajectory does not match the states");
    // Gradient density b*u - R^T p with R = (-I, I, 0, 0), i.e. the second
    // term is <dg/du, p> with dg/du = (I, -I, 0, 0). The coupling term pairs
    // the state at level n with the adjoint at level n+1 (the pairing under
    // which the discrete adjoint reproduces the discrete J exactly up to
    // O(dt)); the control-cost term carries the time-trapezoid weights of
    // the objective itself.
    double acc = 0.0;
    for (int n = 0; n < t.levels(); ++n) {
        const StateFields& z = states.at(n);
        const AdjointFields* p_next = (n < t.steps) ? &adjoints.at(n + 1) : nullptr;
        const Field& u = controls.level(n);
        const Field& d = delta.level(n);
        const double w_cost = time_weight(n, t.steps);
        double level_acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            double row = 0.0;
            for (int j = 0; j < g.ny; ++j) {
                const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
                double grad = w_cost * cfg.control_weight * u(i, j);
                if (p_next)
                    grad -= z.i(i, j) * (p_next->p2(i, j) - p_next->p1(i, j));
                row += wy * grad * d(i, j);
            }
            level_acc += wx * row;
        }
        acc += t.dt * level_acc * g.dx() * g.dy();
    }
    return acc;
}

OptimizationResult fbsm_optimize(const StateFields& z0, const ModelParams& p,
                                 const GridSpec& g, const TimeSpec& t,
                                 const ObjectiveConfig& cfg, const FbsmConfig& fc) {
    p.validate();
    g.validate();
    t.validate();
    cfg.validate();
    fc.validate();

    const int levels = t.levels();
    ControlTrajectory u = ControlTrajectory::constant(0.0, g, levels);
    StateTrajectory states = simulate_forward(z0, u, p, g, t);
    double j_curr = evaluate_objective(states, u, cfg, g);

    OptimizationResult result;
    result.objective_history.push_back(j_curr);
    const double slack = fc.descent_slack_rel * std::abs(j_curr);

    double theta = fc.relaxation;
    int streak = 0;
    bool converged = false;
    int iter = 0;

    AdjointTrajectory adj = solve_adjoint(states, u, p, cfg, fc.jacobian);
    std::vector<Field> candidate(static_cast<std::size_t>(levels));

    for (iter = 1; iter <= fc.max_iters; ++iter) {
        for (int n = 0; n < levels; ++n)
            candidate[static_cast<std::size_t>(n)] =
                project_control(states.at(n).i, adj.at(n).p1, adj.at(n).p2, cfg);

        // Relaxed update, retried with halved theta if J would rise above
        // the descent slack. If even the floor step raises J, the iterate
        // has reached the fixed point to within the discretization's
        // accuracy and the iteration stops on the last accepted control.
        ControlTrajectory u_trial;
        StateTrajectory states_trial;
        double j_trial = j_curr;
        bool accepted = false;
        while (true) {
            std::vector<Field> blend(static_cast<std::size_t>(levels));
            for (int n = 0; n < levels; ++n) {
                const Field& base = u.level(n);
                const Field& cand = candidate[static_cast<std::size_t>(n)];
                Field out = Field::on(g);
                for (std::size_t k = 0; k < out.size(); ++k)
                    out[k] = theta * cand[k] + (1.0 - theta) * base[k];
                blend[static_cast<std::size_t>(n)] = std::move(out);
            }
            u_trial = ControlTrajectory::from_levels(std::move(blend));
            states_trial = simulate_forward(z0, u_trial, p, g, t);
            j_trial = evaluate_objective(states_trial, u_trial, cfg, g);
            if (j_trial <= j_curr + slack) {
                accepted = true;
                break;
            }
            if (theta <= fc.relaxation_floor) break;
            theta = std::max(theta * 0.5, fc.relaxation_floor);
            streak = 0;
        }
        if (!accepted) {
            converged = true;  // descent stagnated at the smallest step
            break;
        }

        if (++streak >= fc.reset_after_successes) {
            theta = fc.relaxation;
            streak = 0;
        }

        const double diff = control_diff_norm(u_trial, u, g, t);
        const double scale = std::max(control_norm(u_trial, g, t), 1e-12);

        u = std::move(u_trial);
        states = std::move(states_trial);
        j_curr = j_trial;
        result.objective_history.push_back(j_curr);

        if (diff / scale < fc.tol) {
            converged = true;
            break;
        }
        adj = solve_adjoint(states, u, p, cfg, fc.jacobian);
    }

    result.converged = converged;
    result.iterations = std::min(iter, fc.max_iters);
    result.control = std::move(u);
    result.states = std::move(states);
    result.adjoints = solve_adjoint(result.states, result.control, p, cfg, fc.jacobian);
    return result;
}

}  // namespace sica
