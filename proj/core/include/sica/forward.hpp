#ifndef SICA_FORWARD_HPP
#define SICA_FORWARD_HPP

#include <functional>
#include <vector>

#include "sica/grid.hpp"
#include "sica/model.hpp"
#include "sica/params.hpp"

namespace sica {

/// Uniform time discretization of [0, T]. The invariant steps*dt == T
/// (to 1e-9 relative) is enforced at construction; use `fit` to derive a
/// conforming spec from a requested maximum step.
struct TimeSpec {
    double horizon = 0.0;  // T, days
    double dt = 0.0;       // days
    int steps = 0;         // nt; trajectory has steps+1 levels

    /// Largest dt <= max_dt that divides the horizon evenly:
    /// nt = ceil(T/max_dt), dt = T/nt. horizon == 0 gives a single level.
    static TimeSpec fit(double horizon, double max_dt);

    void validate() const;

    double t(int level) const { return level * dt; }
    int levels() const { return steps + 1; }

    bool operator==(const TimeSpec&) const = default;
};

/// The four compartment fields at one time level.
struct StateFields {
    Field s, i, c, a;

    static StateFields on(const GridSpec& g, double fill = 0.0) {
        return {Field::on(g, fill), Field::on(g, fill), Field::on(g, fill),
                Field::on(g, fill)};
    }

    bool conforms(const GridSpec& g) const {
        return s.conforms(g) && i.conforms(g) && c.conforms(g) && a.conforms(g);
    }

    bool operator==(const StateFields&) const = default;
};

/// Snapshots of the state at every time level 0..nt.
struct StateTrajectory {
    GridSpec grid;
    TimeSpec time;
    std::vector<StateFields> levels;

    const StateFields& at(int level) const { return levels[static_cast<std::size_t>(level)]; }
};

/// The control field u(t, x) at every time level, values in [0, u_max].
/// A spatially- and temporally-constant control is stored as a single field.
class ControlTrajectory {
public:
    ControlTrajectory() = default;

    static ControlTrajectory constant(double value, const GridSpec& g, int levels);
    static ControlTrajectory from_levels(std::vector<Field> levels);

    const Field& level(int n) const {
        return constant_ ? store_.front() : store_[static_cast<std::size_t>(n)];
    }
    int levels() const { return levels_; }
    bool is_constant() const { return constant_; }

    /// Mutable per-level access; splits a constant trajectory into explicit
    /// levels on first use.
    Field& mutable_level(int n);

private:
    bool constant_ = false;
    int levels_ = 0;
    std::vector<Field> store_;
};

/// Counters accumulated while stepping.
struct StepStats {
    long clamp_events = 0;        // values in [-neg_tol, 0) raised to 0
    double min_value = 0.0;       // most negative pre-clamp value seen
    double max_abs_reaction = 0.0;  // running max_i |g_i| over all nodes/steps
};

/// Maximum stable explicit-Euler step for the diffusive part:
/// safety / (2*d_max*(1/dx^2 + 1/dy^2)). With all diffusion coefficients
/// zero the diffusive limit is vacuous and `zero_diffusion_cap` is returned.
double cfl_max_dt(const ModelParams& p, const GridSpec& g,
                  double zero_diffusion_cap = 1e-2, double safety = 0.9);

/// One explicit Euler step of the reaction-diffusion system:
/// z_new = z + dt*(d .* laplacian(z) + g(z, u)) nodewise.
///
/// Components below -neg_tol (or non-finite) raise StabilityViolation;
/// components in [-neg_tol, 0) are clamped to zero and counted in `stats`.
StateFields step_state(const StateFields& z, const Field& u, const ModelParams& p,
                       const GridSpec& g, double dt, double neg_tol = 1e-9,
                       StepStats* stats = nullptr);

/// Control supplier for the integrator: field used on [t_n, t_{n+1}).
using ControlAt = std::function<const Field&(int level)>;

/// Called once per stored level (including level 0) with the current state.
using LevelCallback = std::function<void(int level, double t, const StateFields&)>;

/// Streaming forward integration: advances z0 through all steps, invoking
/// `on_level` at every level, and returns the final state. This is the
/// engine under simulate_forward; use it directly when the full trajectory
/// is not needed (long runs at small dt).
///
/// Requires dt <= cfl_max_dt and nonnegative z0; control values must lie in
/// [0, 1]. Throws StabilityViolation with the offending time level.
StateFields integrate_forward(StateFields z0, const ControlAt& u, const ModelParams& p,
                              const GridSpec& g, const TimeSpec& t,
                              const LevelCallback& on_level = {}, double neg_tol = 1e-9,
                              StepStats* stats = nullptr);

/// Forward solve with a snapshot stored at every time level. The control is
/// sampled at the start of each interval (left-point rule).
StateTrajectory simulate_forward(const StateFields& z0, const ControlTrajectory& u,
                                 const ModelParams& p, const GridSpec& g,
                                 const TimeSpec& t, double neg_tol = 1e-9,
                                 StepStats* stats = nullptr);

/// Classical fourth-order Runge-Kutta solution of the spatially homogeneous
/// system under a constant control; the reference series for the
/// well-mixed-reduction checks. Returns states at t = 0, dt_fine, ..., T.
std::vector<StatePoint> simulate_ode_reference(const StatePoint& z0, double u_const,
                                               const ModelParams& p, double horizon,
                                               double dt_fine);

/// Post-hoc growth-bound diagnostics for a forward run: feeds on per-level
/// states and verifies, after the run, that every compartment stayed within
/// [0, k*t + max(z0_i)] for k = max pointwise reaction magnitude observed.
class InvariantMonitor {
public:
    InvariantMonitor(const ModelParams& p, const GridSpec& g);

    /// Record one level. `u` is the control field active at this level.
    void observe(int level, double t, const StateFields& z, const Field& u);

    struct Report {
        double reaction_bound = 0.0;      // measured k
        double max_bound_excess = 0.0;    // max over levels of (z_i - bound)
        double min_value = 0.0;           // most negative value seen
        bool bounded = false;
    };

    /// Evaluate the growth bound with the final measured k.
    Report finalize() const;

private:
    const ModelParams* params_;
    const GridSpec* grid_;
    double k_ = 0.0;
    double min_value_ = 0.0;
    Vec4 initial_max_{};
    bool have_initial_ = false;
    std::vector<double> times_;
    std::vector<Vec4> level_max_;
};

}  // namespace sica

#endif  // SICA_FORWARD_HPP
