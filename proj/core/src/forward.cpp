#include "sica/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sica/errors.hpp"

namespace sica {

TimeSpec TimeSpec::fit(double horizon, double max_dt) {
    if (!(max_dt > 0.0) || !std::isfinite(max_dt))
        throw ValidationError("dt", "must be finite and > 0");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw ValidationError("T", "must be finite and >= 0");
    TimeSpec t;
    t.horizon = horizon;
    if (horizon == 0.0) {
        t.dt = max_dt;
        t.steps = 0;
        return t;
    }
    t.steps = static_cast<int>(std::ceil(horizon / max_dt - 1e-12));
    t.steps = std::max(t.steps, 1);
    t.dt = horizon / t.steps;
    t.validate();
    return t;
}

void TimeSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("dt", "must be finite and > 0");
    if (steps < 0) throw ValidationError("nt", "step count must be >= 0");
    if (horizon == 0.0 && steps == 0) return;
    const double err = std::abs(steps * dt - horizon);
    if (err > 1e-9 * std::max(std::abs(horizon), 1.0))
        throw ValidationError("dt", "nt*dt must equal T to 1e-9 relative");
}

ControlTrajectory ControlTrajectory::constant(double value, const GridSpec& g,
                                              int levels) {
    if (levels < 1) throw ValidationError("control", "needs at least one level");
    ControlTrajectory u;
    u.constant_ = true;
    u.levels_ = levels;
    u.store_.push_back(Field::on(g, value));
    return u;
}

ControlTrajectory ControlTrajectory::from_levels(std::vector<Field> levels) {
    if (levels.empty()) throw ValidationError("control", "needs at least one level");
    ControlTrajectory u;
    u.constant_ = false;
    u.levels_ = static_cast<int>(levels.size());
    u.store_ = std::move(levels);
    return u;
}

Field& ControlTrajectory::mutable_level(int n) {
    if (constant_) {
        store_.resize(static_cast<std::size_t>(levels_), store_.front());
        constant_ = false;
    }
    return store_[static_cast<std::size_t>(n)];
}

double cfl_max_dt(const ModelParams& p, const GridSpec& g, double zero_diffusion_cap,
                  double safety) {
    const double d_max = p.max_diffusion();
    if (d_max <= 0.0) return zero_diffusion_cap;
    const double inv = 1.0 / (g.dx() * g.dx()) + 1.0 / (g.dy() * g.dy());
    return safety / (2.0 * d_max * inv);
}

namespace {

// One fused Euler step over all four compartments: stencil, kinetics,
// negativity policy in a single pass. Writes into `out` (distinct storage).
void euler_step_into(const StateFields& z, const Field& u, const ModelParams& p,
                     const GridSpec& g, double dt, double neg_tol, StepStats* stats,
                     int level, StateFields& out) {
    const int nx = g.nx, ny = g.ny;
    const double inv_dx2 = 1.0 / (g.dx() * g.dx());
    const double inv_dy2 = 1.0 / (g.dy() * g.dy());

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

            const StatePoint zp{z.s(i, j), z.i(i, j), z.c(i, j), z.a(i, j)};
            const Vec4 react = reaction_terms(zp, u(i, j), p);

            if (stats) {
                const double gmax =
                    std::max(std::max(std::abs(react[0]), std::abs(react[1])),
                             std::max(std::abs(react[2]), std::abs(react[3])));
                stats->max_abs_reaction = std::max(stats->max_abs_reaction, gmax);
            }

            const Vec4 next = {zp.s + dt * (p.d_s * lap(z.s) + react[0]),
                               zp.i + dt * (p.d_i * lap(z.i) + react[1]),
                               zp.c + dt * (p.d_c * lap(z.c) + react[2]),
                               zp.a + dt * (p.d_a * lap(z.a) + react[3])};

            Vec4 clamped = next;
            for (int k = 0; k < 4; ++k) {
                const double v = next[k];
                if (!std::isfinite(v))
                    throw StabilityViolation(
                        "non-finite state at node (" + std::to_string(i) + "," +
                            std::to_string(j) + "), time level " + std::to_string(level),
                        level);
                if (v < 0.0) {
                    if (v < -neg_tol)
                        throw StabilityViolation(
                            "state component " + std::to_string(v) +
                                " below -" + std::to_string(neg_tol) + " at node (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                "), time level " + std::to_string(level),
                            level);
                    if (stats) {
                        ++stats->clamp_events;
                        stats->min_value = std::min(stats->min_value, v);
                    }
                    clamped[k] = 0.0;
                }
            }

            out.s(i, j) = clamped[0];
            out.i(i, j) = clamped[1];
            out.c(i, j) = clamped[2];
            out.a(i, j) = clamped[3];
        }
    }
}

void require_state(const StateFields& z, const GridSpec& g) {
    if (!z.conforms(g))
        throw ValidationError("state", "fields do not conform to the grid");
    for (const Field* f : {&z.s, &z.i, &z.c, &z.a})
        for (double v : f->values()) {
            if (!std::isfinite(v))
                throw ValidationError("state", "initial fields must be finite");
            if (v < 0.0)
                throw ValidationError("state", "initial fields must be nonnegative");
        }
}

void require_control_field(const Field& u, const GridSpec& g) {
    if (!u.conforms(g))
        throw ValidationError("control", "field does not conform to the grid");
    for (double v : u.values())
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("control", "values must lie in [0, 1]");
}

}  // namespace

StateFields step_state(const StateFields& z, const Field& u, const ModelParams& p,
                       const GridSpec& g, double dt, double neg_tol, StepStats* stats) {
    require_state(z, g);
    require_control_field(u, g);
    StateFields out = StateFields::on(g);
    euler_step_into(z, u, p, g, dt, neg_tol, stats, 0, out);
    return out;
}

StateFields integrate_forward(StateFields z0, const ControlAt& u, const ModelParams& p,
                              const GridSpec& g, const TimeSpec& t,
                              const LevelCallback& on_level, double neg_tol,
                              StepStats* stats) {
    require_state(z0, g);
    t.validate();
    const double stable_dt = cfl_max_dt(p, g, /*zero_diffusion_cap=*/t.dt);
    if (t.steps > 0 && t.dt > stable_dt * (1.0 + 1e-12))
        throw ValidationError("dt", "exceeds the CFL bound " + std::to_string(stable_dt));

    StateFields curr = std::move(z0);
    StateFields next = StateFields::on(g);
    if (on_level) on_level(0, 0.0, curr);
    const Field* validated = nullptr;
    for (int n = 0; n < t.steps; ++n) {
        const Field& un = u(n);
        if (&un != validated) {
            require_control_field(un, g);
            validated = &un;
        }
        euler_step_into(curr, un, p, g, t.dt, neg_tol, stats, n + 1, next);
        std::swap(curr, next);
        if (on_level) on_level(n + 1, t.t(n + 1), curr);
    }
    return curr;
}

StateTrajectory simulate_forward(const StateFields& z0, const ControlTrajectory& u,
                                 const ModelParams& p, const GridSpec& g,
                                 const TimeSpec& t, double neg_tol, StepStats* stats) {
    if (u.levels() < t.levels())
        throw ValidationError("control", "trajectory has fewer levels than the run");
    StateTrajectory traj;
    traj.grid = g;
    traj.time = t;
    traj.levels.reserve(static_cast<std::size_t>(t.levels()));
    integrate_forward(
        z0, [&](int n) -> const Field& { return u.level(n); }, p, g, t,
        [&](int, double, const StateFields& z) { traj.levels.push_back(z); }, neg_tol,
        stats);
    return traj;
}

std::vector<StatePoint> simulate_ode_reference(const StatePoint& z0, double u_const,
                                               const ModelParams& p, double horizon,
                                               double dt_fine) {
    if (!(dt_fine > 0.0)) throw ValidationError("dt_fine", "must be > 0");
    const int n = (horizon > 0.0)
                      ? std::max(1, static_cast<int>(std::llround(horizon / dt_fine)))
                      : 0;
    std::vector<StatePoint> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(z0);

    Vec4 z = z0.as_vec();
    const auto f = [&](const Vec4& v) {
        return reaction_terms(StatePoint::from_vec(v), u_const, p);
    };
    for (int step = 0; step < n; ++step) {
        const Vec4 k1 = f(z);
        Vec4 tmp;
        for (int k = 0; k < 4; ++k) tmp[k] = z[k] + 0.5 * dt_fine * k1[k];
        const Vec4 k2 = f(tmp);
        for (int k = 0; k < 4; ++k) tmp[k] = z[k] + 0.5 * dt_fine * k2[k];
        const Vec4 k3 = f(tmp);
        for (int k = 0; k < 4; ++k) tmp[k] = z[k] + dt_fine * k3[k];
        const Vec4 k4 = f(tmp);
        for (int k = 0; k < 4; ++k)
            z[k] += dt_fine / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        for (double v : z)
            if (!std::isfinite(v))
                throw StabilityViolation("non-finite reference state at step " +
                                             std::to_string(step + 1),
                                         step + 1);
        out.push_back(StatePoint::from_vec(z));
    }
    return out;
}

InvariantMonitor::InvariantMonitor(const ModelParams& p, const GridSpec& g)
    : params_(&p), grid_(&g) {}

void InvariantMonitor::observe(int level, double t, const StateFields& z,
                               const Field& u) {
    Vec4 zmax{};
    double zmin = 0.0;
    const int nx = grid_->nx, ny = grid_->ny;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const StatePoint zp{z.s(i, j), z.i(i, j), z.c(i, j), z.a(i, j)};
            zmax[0] = std::max(zmax[0], zp.s);
            zmax[1] = std::max(zmax[1], zp.i);
            zmax[2] = std::max(zmax[2], zp.c);
            zmax[3] = std::max(zmax[3], zp.a);
            zmin = std::min(zmin, std::min(std::min(zp.s, zp.i), std::min(zp.c, zp.a)));
            const Vec4 g4 = reaction_terms(zp, u(i, j), *params_);
            for (double v : g4) k_ = std::max(k_, std::abs(v));
        }
    if (!have_initial_ && level == 0) {
        initial_max_ = zmax;
        have_initial_ = true;
    }
    min_value_ = std::min(min_value_, zmin);
    times_.push_back(t);
    level_max_.push_back(zmax);
}

InvariantMonitor::Report InvariantMonitor::finalize() const {
    Report r;
    r.reaction_bound = k_;
    r.min_value = min_value_;
    double excess = 0.0;
    for (std::size_t n = 0; n < times_.size(); ++n) {
        for (int k = 0; k < 4; ++k) {
            const double bound = k_ * times_[n] + initial_max_[k];
            excess = std::max(excess, level_max_[n][k] - bound);
        }
    }
    r.max_bound_excess = excess;
    const double scale = 1.0 + std::max(std::max(initial_max_[0], initial_max_[1]),
                                        std::max(initial_max_[2], initial_max_[3]));
    r.bounded = (excess <= 1e-9 * scale) && (min_value_ >= 0.0);
    return r;
}

}  // namespace sica
