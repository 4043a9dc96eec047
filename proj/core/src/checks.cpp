#include "sica/checks.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sica/adjoint.hpp"
#include "sica/optimize.hpp"

namespace sica {

namespace {

std::string num(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

Field random_field(const GridSpec& g, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f = Field::on(g);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

CheckResult stencil_constant() {
    const GridSpec g{33, 29, 10.0, 8.0};
    const Field lap = laplacian_neumann(Field::on(g, 4.2), g);
    double worst = 0.0;
    for (double v : lap.values()) worst = std::max(worst, std::abs(v));
    return {"stencil: zero on constants", worst == 0.0, "max |lap| = " + num(worst)};
}

CheckResult stencil_quadratic() {
    const GridSpec g{33, 33, 10.0, 10.0};
    Field f = Field::on(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) f(i, j) = g.x(i) * g.x(i);
    const Field lap = laplacian_neumann(f, g);
    double worst = 0.0;
    for (int i = 1; i < g.nx - 1; ++i)
        for (int j = 0; j < g.ny; ++j) worst = std::max(worst, std::abs(lap(i, j) - 2.0));
    return {"stencil: exact on x^2 (interior)", worst < 1e-9,
            "max |lap - 2| = " + num(worst)};
}

CheckResult stencil_conservation() {
    const GridSpec g{41, 37, 10.0, 10.0};
    std::mt19937 rng(7);
    const Field f = random_field(g, rng, -1.0, 1.0);
    const Field lap = laplacian_neumann(f, g);
    double total = 0.0, scale = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double w = quad_weight(i, j, g);
            total += w * lap(i, j);
            scale += w * std::abs(lap(i, j));
        }
    const double rel = std::abs(total) / std::max(scale, 1e-300);
    return {"stencil: discrete conservation", rel < 1e-10, "rel residual = " + num(rel)};
}

CheckResult stencil_self_adjoint() {
    const GridSpec g{31, 27, 9.0, 11.0};
    std::mt19937 rng(11);
    const Field f = random_field(g, rng, -1.0, 1.0);
    const Field h = random_field(g, rng, -1.0, 1.0);
    const double lhs = weighted_inner(laplacian_neumann(f, g), h, g);
    const double rhs = weighted_inner(f, laplacian_neumann(h, g), g);
    const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
    return {"stencil: self-adjoint", rel < 1e-10, "rel asymmetry = " + num(rel)};
}

CheckResult stencil_order() {
    const double lx = 10.0, ly = 10.0;
    double errors[3];
    int idx = 0;
    for (int nx : {17, 33, 65}) {
        const GridSpec g{nx, nx, lx, ly};
        Field f = Field::on(g);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                f(i, j) = std::cos(M_PI * g.x(i) / lx) * std::cos(M_PI * g.y(j) / ly);
        const Field lap = laplacian_neumann(f, g);
        const double factor = -(M_PI * M_PI) * (1.0 / (lx * lx) + 1.0 / (ly * ly));
        double worst = 0.0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                worst = std::max(worst, std::abs(lap(i, j) - factor * f(i, j)));
        errors[idx++] = worst;
    }
    const double o1 = std::log2(errors[0] / errors[1]);
    const double o2 = std::log2(errors[1] / errors[2]);
    return {"stencil: convergence order >= 1.9", o1 >= 1.9 && o2 >= 1.9,
            "orders " + num(o1) + ", " + num(o2)};
}

CheckResult ode_reduction(const ModelParams& p, double u_value) {
    const GridSpec g{16, 16, 10.0, 10.0};
    const double horizon = 10.0;
    const TimeSpec t = TimeSpec::fit(horizon, std::min(2.5e-4, cfl_max_dt(p, g)));
    const StatePoint z0{2.19, 0.5, 0.1, 0.05};

    const auto reference = simulate_ode_reference(z0, u_value, p, horizon, t.dt / 100.0);

    StateFields init = StateFields::on(g);
    init.s.fill(z0.s);
    init.i.fill(z0.i);
    init.c.fill(z0.c);
    init.a.fill(z0.a);

    const Field u = Field::on(g, u_value);
    double worst = 0.0;
    integrate_forward(
        init, [&](int) -> const Field& { return u; }, p, g, t,
        [&](int level, double, const StateFields& z) {
            const StatePoint ref = reference[static_cast<std::size_t>(level) * 100];
            const StatePoint got{z.s(5, 7), z.i(5, 7), z.c(5, 7), z.a(5, 7)};
            const double pairs[4][2] = {{got.s, ref.s}, {got.i, ref.i},
                                        {got.c, ref.c}, {got.a, ref.a}};
            for (const auto& pr : pairs)
                worst = std::max(worst,
                                 std::abs(pr[0] - pr[1]) / std::max(std::abs(pr[1]), 1e-12));
        });
    return {"well-mixed reduction vs RK4 (u = " + num(u_value) + ")", worst < 1e-3,
            "max rel err = " + num(worst)};
}

CheckResult population_law(const ModelParams& p) {
    const GridSpec g{32, 32, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(10.0, std::min(1e-3, cfl_max_dt(p, g)));
    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dx = g.x(i) - 5.0, dy = g.y(j) - 5.0;
            z0.i(i, j) = 0.5 * std::exp(-(dx * dx + dy * dy) / 2.0);
        }
    const double n0 = integrate_field(z0.s, g) + integrate_field(z0.i, g);
    const Field u = Field::on(g, 0.37);
    double worst = 0.0;
    integrate_forward(
        z0, [&](int) -> const Field& { return u; }, p, g, t,
        [&](int, double time, const StateFields& z) {
            const double n = integrate_field(z.s, g) + integrate_field(z.i, g) +
                             integrate_field(z.c, g) + integrate_field(z.a, g);
            double expected;
            if (p.mu > 0.0) {
                const double eq = g.area() * p.recruitment / p.mu;
                expected = eq + (n0 - eq) * std::exp(-p.mu * time);
            } else {
                expected = n0 + g.area() * p.recruitment * time;
            }
            worst = std::max(worst,
                             std::abs(n - expected) / std::max(std::abs(expected), 1e-12));
        });
    return {"total-population balance law", worst < 1e-3, "max rel dev = " + num(worst)};
}

CheckResult growth_bound(const ModelParams& p) {
    const GridSpec g{32, 32, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(10.0, std::min(1e-2, cfl_max_dt(p, g)));
    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dx = g.x(i) - 5.0, dy = g.y(j) - 5.0;
            z0.i(i, j) = 0.5 * std::exp(-(dx * dx + dy * dy) / 2.0);
        }
    const Field u = Field::on(g, 0.0);
    InvariantMonitor monitor(p, g);
    StepStats stats;
    integrate_forward(
        z0, [&](int) -> const Field& { return u; }, p, g, t,
        [&](int level, double time, const StateFields& z) {
            monitor.observe(level, time, z, u);
        },
        1e-9, &stats);
    const auto report = monitor.finalize();
    const bool pass = report.bounded && stats.clamp_events == 0;
    return {"nonnegativity and growth bound", pass,
            "clamps = " + std::to_string(stats.clamp_events) +
                ", bound excess = " + num(report.max_bound_excess)};
}

CheckResult gradient_probe(const ModelParams& p) {
    const GridSpec g{12, 12, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(2.0, std::min(1e-3, cfl_max_dt(p, g)));
    ObjectiveConfig obj;
    obj.horizon = t.horizon;

    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    z0.i.fill(0.4);
    z0.c.fill(0.05);
    z0.a.fill(0.02);

    const ControlTrajectory u = ControlTrajectory::constant(0.5, g, t.levels());
    const StateTrajectory states = simulate_forward(z0, u, p, g, t);
    const AdjointTrajectory adj = solve_adjoint(states, u, p, obj, JacobianMode::full);

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    std::vector<Field> delta_levels(static_cast<std::size_t>(t.levels()));
    for (auto& f : delta_levels) {
        f = Field::on(g);
        for (double& v : f.values()) v = dist(rng);
    }
    const ControlTrajectory delta = ControlTrajectory::from_levels(std::move(delta_levels));

    const double predicted = adjoint_directional_derivative(states, adj, u, delta, obj, g);

    const double eps = 1e-3;
    const auto perturbed = [&](double sign) {
        std::vector<Field> levels(static_cast<std::size_t>(t.levels()));
        for (int n = 0; n < t.levels(); ++n) {
            levels[static_cast<std::size_t>(n)] = u.level(n);
            Field& f = levels[static_cast<std::size_t>(n)];
            const Field& d = delta.level(n);
            for (std::size_t k = 0; k < f.size(); ++k) f[k] += sign * eps * d[k];
        }
        const ControlTrajectory up = ControlTrajectory::from_levels(std::move(levels));
        const StateTrajectory st = simulate_forward(z0, up, p, g, t);
        return evaluate_objective(st, up, obj, g);
    };
    const double fd = (perturbed(+1.0) - perturbed(-1.0)) / (2.0 * eps);
    const double rel = std::abs(predicted - fd) / std::max(std::abs(fd), 1e-12);
    return {"adjoint gradient vs finite differences", rel < 1e-2,
            "rel err = " + num(rel)};
}

CheckResult cfl_formula(const ModelParams& p) {
    ModelParams probe = p;
    probe.d_s = 0.9;
    probe.d_i = probe.d_c = probe.d_a = 0.1;
    const GridSpec unit{11, 11, 10.0, 10.0};  // dx = dy = 1
    const double bound = cfl_max_dt(probe, unit);
    const GridSpec halved{21, 21, 10.0, 10.0};  // dx = dy = 1/2
    const double bound_halved = cfl_max_dt(probe, halved);
    const bool pass = std::abs(bound - 0.25) < 1e-12 &&
                      std::abs(bound_halved - 0.0625) < 1e-12;
    return {"CFL bound formula", pass,
            "dx=1: " + num(bound) + ", dx=1/2: " + num(bound_halved)};
}

}  // namespace

std::vector<CheckResult> run_validation_checks(const ScenarioConfig& cfg) {
    std::vector<CheckResult> results;
    results.push_back(stencil_constant());
    results.push_back(stencil_quadratic());
    results.push_back(stencil_conservation());
    results.push_back(stencil_self_adjoint());
    results.push_back(stencil_order());
    results.push_back(cfl_formula(cfg.model));
    results.push_back(ode_reduction(cfg.model, 0.0));
    results.push_back(ode_reduction(cfg.model, 0.5));
    results.push_back(population_law(cfg.model));
    results.push_back(growth_bound(cfg.model));
    results.push_back(gradient_probe(cfg.model));
    return results;
}

}  // namespace sica
