#ifndef SICA_ADJOINT_HPP
#define SICA_ADJOINT_HPP

#include <vector>

#include "sica/forward.hpp"

namespace sica {

/// The four adjoint fields at one time level.
struct AdjointFields {
    Field p1, p2, p3, p4;

    static AdjointFields on(const GridSpec& g, double fill = 0.0) {
        return {Field::on(g, fill), Field::on(g, fill), Field::on(g, fill),
                Field::on(g, fill)};
    }

    bool operator==(const AdjointFields&) const = default;
};

/// Adjoint snapshots at the same time levels as the state trajectory;
/// the final level is identically zero.
struct AdjointTrajectory {
    GridSpec grid;
    TimeSpec time;
    std::vector<AdjointFields> levels;

    const AdjointFields& at(int level) const { return levels[static_cast<std::size_t>(level)]; }
};

/// One explicit Euler step of the time-reversed adjoint system:
///   p_prev = p_next + dt*(d .* laplacian(p_next) + F^T(z, u)*p_next + (0, a, 0, 0))
/// nodewise, where F is the sensitivity matrix in the selected mode and
/// (z, u) are taken at the time level of the returned p_prev.
///
/// Shares the forward CFL bound (identical diffusion operator). Throws
/// StabilityViolation on non-finite output.
AdjointFields step_adjoint_backward(const AdjointFields& p_next, const StateFields& z,
                                    const Field& u, const ModelParams& p,
                                    const ObjectiveConfig& cfg, const GridSpec& g,
                                    double dt, JacobianMode mode);

/// Full backward sweep along a stored state trajectory, starting from the
/// terminal condition p(T, x) = 0.
AdjointTrajectory solve_adjoint(const StateTrajectory& states,
                                const ControlTrajectory& controls, const ModelParams& p,
                                const ObjectiveConfig& cfg, JacobianMode mode);

}  // namespace sica

#endif  // SICA_ADJOINT_HPP
