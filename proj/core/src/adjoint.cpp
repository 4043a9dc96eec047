#include "sica/adjoint.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sica/errors.hpp"

namespace sica {

namespace {

// Fused reverse-time Euler step: diffusion, transposed sensitivity coupling
// and the objective source in one pass. (z, u) belong to the time level of
// the output fields.
void adjoint_step_into(const AdjointFields& p_next, const StateFields& z,
                       const Field& u, const ModelParams& p,
                       const ObjectiveConfig& cfg, const GridSpec& g, double dt,
                       JacobianMode mode, int level, AdjointFields& out) {
    const int nx = g.nx, ny = g.ny;
    const double inv_dx2 = 1.0 / (g.dx() * g.dx());
    const double inv_dy2 = 1.0 / (g.dy() * g.dy());
    const double a = cfg.infection_weight;
    const bool full = (mode == JacobianMode::full);

    for (int i = 0; i < nx; ++i) {
        const int im = (i == 0) ? 1 : i - 1;
        const int ip = (i == nx - 1) ? nx - 2 : i + 1;
        for (int j = 0; j < ny; ++j) {
            const int jm = (j == 0) ? 1 : j - 1;
            const int jp = (j == ny - 1) ? ny - 2 : j + 1;

            const auto lap = [&](const Field& f) {
                const double c = f(i, j);
                return (f(im, j) + f(ip, j) - 2.0 * c) * inv_dx2 +
                       (f(i, jm) + f(i, jp) - 2.0 * c) * inv_dy2;
            };

            const Vec4 pn = {p_next.p1(i, j), p_next.p2(i, j), p_next.p3(i, j),
                             p_next.p4(i, j)};
            const double s = z.s(i, j);
            const double incidence =
                p.beta * (z.i(i, j) + p.eta_c * z.c(i, j) + p.eta_a * z.a(i, j));

            // F^T * p with F assembled in place; rows of F^T are columns of F.
            double c1 = (-incidence - p.mu) * pn[0] + incidence * pn[1];
            double c2 = -p.xi3 * pn[1] + p.phi * pn[2] + p.rho * pn[3];
            double c3 = p.omega * pn[1] - p.xi2 * pn[2];
            double c4 = p.gamma * pn[1] - p.xi1 * pn[3];
            if (full) {
                const double uu = u(i, j);
                c2 += (-p.beta * s + uu) * pn[0] + (p.beta * s - uu) * pn[1];
                c3 += -p.beta * p.eta_c * s * pn[0] + p.beta * p.eta_c * s * pn[1];
                c4 += -p.beta * p.eta_a * s * pn[0] + p.beta * p.eta_a * s * pn[1];
            }

            const Vec4 prev = {
                pn[0] + dt * (p.d_s * lap(p_next.p1) + c1),
                pn[1] + dt * (p.d_i * lap(p_next.p2) + c2 + a),
                pn[2] + dt * (p.d_c * lap(p_next.p3) + c3),
                pn[3] + dt * (p.d_a * lap(p_next.p4) + c4),
            };
            for (double v : prev)
                if (!std::isfinite(v))
                    throw StabilityViolation(
                        "non-finite adjoint at node (" + std::to_string(i) + "," +
                            std::to_string(j) + "), time level " + std::to_string(level),
                        level);

            out.p1(i, j) = prev[0];
            out.p2(i, j) = prev[1];
            out.p3(i, j) = prev[2];
            out.p4(i, j) = prev[3];
        }
    }
}

}  // namespace

AdjointFields step_adjoint_backward(const AdjointFields& p_next, const StateFields& z,
                                    const Field& u, const ModelParams& p,
                                    const ObjectiveConfig& cfg, const GridSpec& g,
                                    double dt, JacobianMode mode) {
    AdjointFields out = AdjointFields::on(g);
    adjoint_step_into(p_next, z, u, p, cfg, g, dt, mode, 0, out);
    return out;
}

AdjointTrajectory solve_adjoint(const StateTrajectory& states,
                                const ControlTrajectory& controls, const ModelParams& p,
                                const ObjectiveConfig& cfg, JacobianMode mode) {
    const TimeSpec& t = states.time;
    if (static_cast<int>(states.levels.size()) != t.levels())
        throw ValidationError("states", "trajectory is missing time levels");
    if (controls.levels() < t.levels())
        throw ValidationError("control", "trajectory has fewer levels than the states");
    const double stable_dt = cfl_max_dt(p, states.grid, /*zero_diffusion_cap=*/t.dt);
    if (t.steps > 0 && t.dt > stable_dt * (1.0 + 1e-12))
        throw ValidationError("dt", "exceeds the CFL bound " + std::to_string(stable_dt));

    AdjointTrajectory adj;
    adj.grid = states.grid;
    adj.time = t;
    adj.levels.assign(static_cast<std::size_t>(t.levels()),
                      AdjointFields::on(states.grid));
    // Terminal condition: the final level stays identically zero.
    for (int n = t.steps - 1; n >= 0; --n) {
        adjoint_step_into(adj.levels[static_cast<std::size_t>(n) + 1], states.at(n),
                          controls.level(n), p, cfg, states.grid, t.dt, mode, n,
                          adj.levels[static_cast<std::size_t>(n)]);
    }
    return adj;
}

}  // namespace sica
