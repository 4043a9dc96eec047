#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "sica/errors.hpp"
#include "sica/forward.hpp"

using namespace sica;

namespace {

StateFields uniform_state(const GridSpec& g, const StatePoint& z) {
    StateFields s = StateFields::on(g);
    s.s.fill(z.s);
    s.i.fill(z.i);
    s.c.fill(z.c);
    s.a.fill(z.a);
    return s;
}

Field gaussian_bump(const GridSpec& g, double amplitude, double cx, double cy,
                    double width) {
    Field f = Field::on(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dx = g.x(i) - cx, dy = g.y(j) - cy;
            f(i, j) = amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
    return f;
}

ModelParams diffusion_only(double d_i) {
    ModelParams p;  // every rate zero; composite identities hold trivially
    p.d_i = d_i;
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("forward");

TEST_CASE("time spec fitting") {
    SUBCASE("an even divisor is kept") {
        const TimeSpec t = TimeSpec::fit(25.0, 1e-2);
        CHECK(t.steps == 2500);
        CHECK(t.dt == doctest::Approx(1e-2).epsilon(1e-15));
        CHECK_NOTHROW(t.validate());
    }
    SUBCASE("a non-divisor is shrunk to the next even split") {
        const TimeSpec t = TimeSpec::fit(25.0, 7e-3);
        CHECK(t.steps == 3572);
        CHECK(t.dt <= 7e-3);
        CHECK(t.steps * t.dt == doctest::Approx(25.0).epsilon(1e-12));
    }
    SUBCASE("zero horizon gives a single level") {
        const TimeSpec t = TimeSpec::fit(0.0, 1e-2);
        CHECK(t.steps == 0);
        CHECK(t.levels() == 1);
    }
    SUBCASE("nonpositive dt is rejected by name") {
        try {
            TimeSpec::fit(25.0, -1e-2);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.field() == "dt");
        }
    }
    SUBCASE("inconsistent hand-built spec is rejected") {
        TimeSpec t{25.0, 1e-2, 2400};
        CHECK_THROWS_AS(t.validate(), ValidationError);
    }
}

TEST_CASE("CFL bound") {
    ModelParams p = ModelParams::defaults();
    const GridSpec unit{11, 11, 10.0, 10.0};  // dx = dy = 1

    SUBCASE("closed form at dx = dy = 1, d_max = 0.9") {
        CHECK(cfl_max_dt(p, unit) == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("halving both spacings quarters the bound") {
        const GridSpec fine{21, 21, 10.0, 10.0};
        CHECK(cfl_max_dt(p, fine) == doctest::Approx(0.0625).epsilon(1e-15));
    }
    SUBCASE("no diffusion falls back to the configured cap") {
        p.d_s = p.d_i = p.d_c = p.d_a = 0.0;
        CHECK(cfl_max_dt(p, unit) == 1e-2);
        CHECK(cfl_max_dt(p, unit, 0.5) == 0.5);
    }
}

TEST_CASE("a spatially uniform step is the pointwise Euler step") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{9, 9, 10.0, 10.0};
    const StatePoint z{2.0, 0.4, 0.1, 0.05};
    const double dt = 1e-3;
    const StateFields out = step_state(uniform_state(g, z), Field::on(g, 0.3), p, g, dt);
    const Vec4 react = reaction_terms(z, 0.3, p);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            CHECK(out.s(i, j) == z.s + dt * (p.d_s * 0.0 + react[0]));
            CHECK(out.i(i, j) == z.i + dt * (p.d_i * 0.0 + react[1]));
            CHECK(out.c(i, j) == z.c + dt * (p.d_c * 0.0 + react[2]));
            CHECK(out.a(i, j) == z.a + dt * (p.d_a * 0.0 + react[3]));
        }
}

TEST_CASE("the disease-free equilibrium is a solver fixed point") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{9, 9, 10.0, 10.0};
    const StateFields z = uniform_state(g, {2.19, 0.0, 0.0, 0.0});
    const StateFields out = step_state(z, Field::on(g, 0.0), p, g, 1e-3);
    CHECK(out == z);
}

TEST_CASE("pure diffusion conserves the total population") {
    const ModelParams p = diffusion_only(0.1);
    const GridSpec g{33, 33, 10.0, 10.0};
    StateFields z0 = StateFields::on(g);
    z0.i = gaussian_bump(g, 1.0, 5.0, 5.0, 1.0);
    const TimeSpec t = TimeSpec::fit(2.0, cfl_max_dt(p, g));
    const double before = integrate_field(z0.i, g);
    double after = before;
    integrate_forward(
        z0, [u = Field::on(g, 0.0)](int) -> const Field& { return u; }, p, g, t,
        [&](int, double, const StateFields& z) { after = integrate_field(z.i, g); });
    CHECK(std::abs(after - before) / before < 1e-10);
}

TEST_CASE("zero-horizon run returns only the initial snapshot") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{9, 9, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(0.0, 1e-2);
    const StateFields z0 = uniform_state(g, {1.0, 0.2, 0.0, 0.0});
    const StateTrajectory traj =
        simulate_forward(z0, ControlTrajectory::constant(0.0, g, 1), p, g, t);
    REQUIRE(traj.levels.size() == 1);
    CHECK(traj.levels.front() == z0);
}

TEST_CASE("the CFL guard rejects an oversized step") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{33, 33, 10.0, 10.0};
    TimeSpec t;
    t.horizon = 1.0;
    t.dt = 0.5;
    t.steps = 2;
    const StateFields z0 = uniform_state(g, {1.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(simulate_forward(z0, ControlTrajectory::constant(0.0, g, 3), p, g, t),
                    ValidationError);
}

TEST_CASE("negativity policy distinguishes roundoff from blowup") {
    // Reaction-only decay: one Euler step gives z*(1 - mu*dt).
    const GridSpec g{5, 5, 10.0, 10.0};
    ModelParams p;

    SUBCASE("a tiny overshoot is clamped and counted") {
        p.mu = (1.0 + 5e-10) * 100.0;  // z(1 - mu*dt) = -5e-10 at dt = 1e-2
        p.derive_composite_rates();
        StepStats stats;
        const StateFields out = step_state(uniform_state(g, {1.0, 0.0, 0.0, 0.0}),
                                           Field::on(g, 0.0), p, g, 1e-2, 1e-9, &stats);
        for (double v : out.s.values()) CHECK(v == 0.0);
        CHECK(stats.clamp_events == g.node_count());
        CHECK(stats.min_value == doctest::Approx(-5e-10).epsilon(1e-3));
    }
    SUBCASE("a real overshoot raises StabilityViolation with the time level") {
        p.mu = 300.0;  // z(1 - mu*dt) = -2 at dt = 1e-2
        p.derive_composite_rates();
        const TimeSpec t{1e-2, 1e-2, 1};
        try {
            integrate_forward(uniform_state(g, {1.0, 0.0, 0.0, 0.0}),
                              [u = Field::on(g, 0.0)](int) -> const Field& { return u; },
                              p, g, t);
            FAIL("expected StabilityViolation");
        } catch (const StabilityViolation& e) {
            CHECK(e.time_level() == 1);
        }
    }
}

TEST_CASE("well-mixed run tracks the RK4 reference") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{8, 8, 10.0, 10.0};
    const double horizon = 25.0;
    const TimeSpec t = TimeSpec::fit(horizon, std::min(2.5e-4, cfl_max_dt(p, g)));
    const StatePoint z0{2.19, 0.5, 0.1, 0.05};

    // The reference advances one coarse interval at a time (100 RK4 substeps
    // per interval) so the fine trajectory never needs to be stored.
    StatePoint ref = z0;
    double worst = 0.0;
    integrate_forward(
        uniform_state(g, z0), [u = Field::on(g, 0.0)](int) -> const Field& { return u; },
        p, g, t, [&](int level, double, const StateFields& z) {
            if (level > 0)
                ref = simulate_ode_reference(ref, 0.0, p, t.dt, t.dt / 100.0).back();
            const Vec4 got{z.s(3, 4), z.i(3, 4), z.c(3, 4), z.a(3, 4)};
            const Vec4 want = ref.as_vec();
            for (int k = 0; k < 4; ++k)
                worst = std::max(worst, std::abs(got[static_cast<std::size_t>(k)] -
                                                 want[static_cast<std::size_t>(k)]) /
                                            std::max(std::abs(want[static_cast<std::size_t>(k)]),
                                                     1e-12));
        });
    CHECK(worst < 1e-3);
}

TEST_CASE("total population follows the exponential balance law") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{16, 16, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(5.0, 1e-3);
    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    z0.i = gaussian_bump(g, 0.5, 5.0, 5.0, 1.0);
    const double n0 = integrate_field(z0.s, g) + integrate_field(z0.i, g);
    const double eq = g.area() * p.recruitment / p.mu;

    double worst = 0.0;
    integrate_forward(
        z0, [u = Field::on(g, 0.37)](int) -> const Field& { return u; }, p, g, t,
        [&](int, double time, const StateFields& z) {
            const double n = integrate_field(z.s, g) + integrate_field(z.i, g) +
                             integrate_field(z.c, g) + integrate_field(z.a, g);
            const double expected = eq + (n0 - eq) * std::exp(-p.mu * time);
            worst = std::max(worst, std::abs(n - expected) / expected);
        });
    CHECK(worst < 1e-3);
}

TEST_CASE("population law holds for arbitrary control trajectories") {
    // The +/- u*I treatment terms cancel in the compartment sum, so the
    // balance law is control-independent.
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{12, 12, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(2.0, 1e-3);
    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    z0.i = gaussian_bump(g, 0.5, 5.0, 5.0, 1.0);
    const double n0 = integrate_field(z0.s, g) + integrate_field(z0.i, g);
    const double eq = g.area() * p.recruitment / p.mu;

    std::mt19937 rng(53);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<Field> levels(static_cast<std::size_t>(t.levels()));
    for (auto& f : levels) {
        f = Field::on(g);
        for (double& v : f.values()) v = dist(rng);
    }
    const ControlTrajectory u = ControlTrajectory::from_levels(std::move(levels));

    double worst = 0.0;
    integrate_forward(
        z0, [&](int n) -> const Field& { return u.level(n); }, p, g, t,
        [&](int, double time, const StateFields& z) {
            const double n = integrate_field(z.s, g) + integrate_field(z.i, g) +
                             integrate_field(z.c, g) + integrate_field(z.a, g);
            const double expected = eq + (n0 - eq) * std::exp(-p.mu * time);
            worst = std::max(worst, std::abs(n - expected) / expected);
        });
    CHECK(worst < 1e-3);
}

TEST_CASE("independent simulations do not interfere across threads") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{12, 12, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(1.0, 1e-2);

    StateFields z0a = uniform_state(g, {2.19, 0.5, 0.1, 0.05});
    StateFields z0b = StateFields::on(g);
    z0b.s.fill(1.5);
    z0b.i = gaussian_bump(g, 0.3, 4.0, 6.0, 1.5);

    const auto ua = ControlTrajectory::constant(0.2, g, t.levels());
    const auto ub = ControlTrajectory::constant(0.7, g, t.levels());
    const StateTrajectory seq_a = simulate_forward(z0a, ua, p, g, t);
    const StateTrajectory seq_b = simulate_forward(z0b, ub, p, g, t);

    StateTrajectory par_a, par_b;
    std::thread worker([&] { par_b = simulate_forward(z0b, ub, p, g, t); });
    par_a = simulate_forward(z0a, ua, p, g, t);
    worker.join();

    CHECK(par_a.levels == seq_a.levels);
    CHECK(par_b.levels == seq_b.levels);
}

TEST_CASE("first-order convergence toward the RK4 reference") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{4, 4, 10.0, 10.0};
    const double horizon = 5.0;
    const StatePoint z0{2.19, 0.5, 0.1, 0.05};

    std::vector<double> errors;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const TimeSpec t = TimeSpec::fit(horizon, dt);
        StatePoint ref = z0;
        double worst = 0.0;
        integrate_forward(
            uniform_state(g, z0),
            [u = Field::on(g, 0.0)](int) -> const Field& { return u; }, p, g, t,
            [&](int level, double, const StateFields& z) {
                if (level > 0)
                    ref = simulate_ode_reference(ref, 0.0, p, t.dt, t.dt / 100.0).back();
                const Vec4 want = ref.as_vec();
                const Vec4 got{z.s(1, 2), z.i(1, 2), z.c(1, 2), z.a(1, 2)};
                for (int k = 0; k < 4; ++k)
                    worst = std::max(worst,
                                     std::abs(got[static_cast<std::size_t>(k)] -
                                              want[static_cast<std::size_t>(k)]) /
                                         std::max(std::abs(want[static_cast<std::size_t>(k)]),
                                                  1e-12));
            });
        errors.push_back(worst);
    }
    CHECK(std::log2(errors[0] / errors[1]) >= 0.9);
    CHECK(std::log2(errors[1] / errors[2]) >= 0.9);
}

TEST_CASE("RK4 reference properties") {
    const ModelParams p = ModelParams::defaults();

    SUBCASE("the disease-free equilibrium stays put") {
        const auto traj = simulate_ode_reference({2.19, 0.0, 0.0, 0.0}, 0.0, p, 5.0, 1e-3);
        for (const auto& z : traj) {
            CHECK(z.s == doctest::Approx(2.19).epsilon(1e-14));
            CHECK(z.i == 0.0);
        }
    }
    SUBCASE("total population matches the closed form to 1e-9") {
        const StatePoint z0{1.0, 0.5, 0.2, 0.1};
        const double n0 = z0.s + z0.i + z0.c + z0.a;
        const double eq = p.recruitment / p.mu;
        const double dt_fine = 1e-4;
        const auto traj = simulate_ode_reference(z0, 0.0, p, 5.0, dt_fine);
        for (std::size_t k = 0; k < traj.size(); k += 1000) {
            const double time = static_cast<double>(k) * dt_fine;
            const double n = traj[k].s + traj[k].i + traj[k].c + traj[k].a;
            const double expected = eq + (n0 - eq) * std::exp(-p.mu * time);
            CHECK(std::abs(n - expected) / expected < 1e-9);
        }
    }
    SUBCASE("full treatment ends with fewer infected than no treatment") {
        const StatePoint z0{2.19, 0.5, 0.1, 0.05};
        const auto untreated = simulate_ode_reference(z0, 0.0, p, 25.0, 1e-3);
        const auto treated = simulate_ode_reference(z0, 1.0, p, 25.0, 1e-3);
        CHECK(treated.back().i < untreated.back().i);
    }
}

TEST_CASE("growth-bound monitor accepts the baseline run") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{16, 16, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(5.0, std::min(1e-2, cfl_max_dt(p, g)));
    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    z0.i = gaussian_bump(g, 0.5, 5.0, 5.0, 1.0);

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
    CHECK(stats.clamp_events == 0);
    CHECK(report.bounded);
    CHECK(report.max_bound_excess <= 0.0);
    CHECK(report.reaction_bound > 0.0);
}

TEST_SUITE_END();
