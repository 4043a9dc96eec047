#include <doctest.h>

#include <cmath>
#include <limits>

#include "sica/adjoint.hpp"
#include "sica/errors.hpp"

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

AdjointFields uniform_adjoint(const GridSpec& g, const Vec4& p) {
    AdjointFields a = AdjointFields::on(g);
    a.p1.fill(p[0]);
    a.p2.fill(p[1]);
    a.p3.fill(p[2]);
    a.p4.fill(p[3]);
    return a;
}

/// Hand-written transpose coupling for the backward step oracle: the matrix
/// entries are spelled out from the model equations independently of
/// sensitivity_matrix.
Vec4 hand_transpose_apply(const Vec4& pv, const StatePoint& z, double u,
                          const ModelParams& p, bool full) {
    const double inc = p.beta * (z.i + p.eta_c * z.c + p.eta_a * z.a);
    double rows[4][4] = {{-inc - p.mu, 0, 0, 0},
                         {inc, -p.xi3, p.omega, p.gamma},
                         {0, p.phi, -p.xi2, 0},
                         {0, p.rho, 0, -p.xi1}};
    if (full) {
        rows[0][1] += -p.beta * z.s + u;
        rows[0][2] += -p.beta * p.eta_c * z.s;
        rows[0][3] += -p.beta * p.eta_a * z.s;
        rows[1][1] += p.beta * z.s - u;
        rows[1][2] += p.beta * p.eta_c * z.s;
        rows[1][3] += p.beta * p.eta_a * z.s;
    }
    Vec4 out{};
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r)
            out[static_cast<std::size_t>(c)] +=
                rows[r][c] * pv[static_cast<std::size_t>(r)];
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("adjoint");

TEST_CASE("zero is a fixed point of the homogeneous backward step") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{9, 9, 10.0, 10.0};
    ObjectiveConfig cfg;
    cfg.infection_weight = 0.0;
    const AdjointFields out = step_adjoint_backward(
        AdjointFields::on(g), uniform_state(g, {1.0, 0.2, 0.1, 0.05}),
        Field::on(g, 0.3), p, cfg, g, 1e-3, JacobianMode::full);
    for (const Field* f : {&out.p1, &out.p2, &out.p3, &out.p4})
        for (double v : f->values()) CHECK(v == 0.0);
}

TEST_CASE("first backward step from zero is pure source") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{9, 9, 10.0, 10.0};
    ObjectiveConfig cfg;
    cfg.infection_weight = 1.0;
    const double dt = 1e-3;
    const AdjointFields out = step_adjoint_backward(
        AdjointFields::on(g), uniform_state(g, {1.0, 0.2, 0.1, 0.05}),
        Field::on(g, 0.3), p, cfg, g, dt, JacobianMode::full);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            CHECK(out.p1(i, j) == 0.0);
            CHECK(out.p2(i, j) == dt);
            CHECK(out.p3(i, j) == 0.0);
            CHECK(out.p4(i, j) == 0.0);
        }
}

TEST_CASE("uniform backward step matches the dense 4x4 oracle") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{9, 9, 10.0, 10.0};
    ObjectiveConfig cfg;
    cfg.infection_weight = 0.7;
    const double dt = 2e-3;
    const StatePoint z{1.5, 0.3, 0.08, 0.04};
    const Vec4 pv{0.4, -0.2, 0.9, 0.1};
    const double u = 0.25;

    for (JacobianMode mode : {JacobianMode::full, JacobianMode::frozen_incidence}) {
        CAPTURE(static_cast<int>(mode));
        const AdjointFields out =
            step_adjoint_backward(uniform_adjoint(g, pv), uniform_state(g, z),
                                  Field::on(g, u), p, cfg, g, dt, mode);
        const Vec4 coupled =
            hand_transpose_apply(pv, z, u, p, mode == JacobianMode::full);
        const Vec4 expected{pv[0] + dt * coupled[0],
                            pv[1] + dt * (coupled[1] + cfg.infection_weight),
                            pv[2] + dt * coupled[2], pv[3] + dt * coupled[3]};
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                CHECK(out.p1(i, j) == doctest::Approx(expected[0]).epsilon(1e-14));
                CHECK(out.p2(i, j) == doctest::Approx(expected[1]).epsilon(1e-14));
                CHECK(out.p3(i, j) == doctest::Approx(expected[2]).epsilon(1e-14));
                CHECK(out.p4(i, j) == doctest::Approx(expected[3]).epsilon(1e-14));
            }
    }
}

TEST_CASE("zero infection weight gives an identically zero sweep") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{12, 12, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(2.0, 1e-2);
    ObjectiveConfig cfg;
    cfg.infection_weight = 0.0;
    cfg.horizon = t.horizon;

    StateFields z0 = uniform_state(g, {2.19, 0.4, 0.1, 0.05});
    const ControlTrajectory u = ControlTrajectory::constant(0.2, g, t.levels());
    const StateTrajectory states = simulate_forward(z0, u, p, g, t);
    const AdjointTrajectory adj = solve_adjoint(states, u, p, cfg, JacobianMode::full);
    for (const auto& level : adj.levels)
        for (const Field* f : {&level.p1, &level.p2, &level.p3, &level.p4})
            for (double v : f->values()) CHECK(v == 0.0);
}

TEST_CASE("terminal condition holds exactly and the sweep is linear in a") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{12, 12, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(2.0, 1e-2);
    StateFields z0 = StateFields::on(g);
    z0.s.fill(2.19);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dx = g.x(i) - 5.0, dy = g.y(j) - 5.0;
            z0.i(i, j) = 0.5 * std::exp(-(dx * dx + dy * dy) / 2.0);
        }
    const ControlTrajectory u = ControlTrajectory::constant(0.1, g, t.levels());
    const StateTrajectory states = simulate_forward(z0, u, p, g, t);

    ObjectiveConfig cfg;
    cfg.horizon = t.horizon;
    cfg.infection_weight = 1.0;
    const AdjointTrajectory one = solve_adjoint(states, u, p, cfg, JacobianMode::full);
    cfg.infection_weight = 2.0;
    const AdjointTrajectory two = solve_adjoint(states, u, p, cfg, JacobianMode::full);

    // p(T, x) = 0 exactly.
    for (const Field* f : {&one.levels.back().p1, &one.levels.back().p2,
                           &one.levels.back().p3, &one.levels.back().p4})
        for (double v : f->values()) CHECK(v == 0.0);

    // Doubling the source doubles every value bitwise.
    REQUIRE(one.levels.size() == two.levels.size());
    for (std::size_t n = 0; n < one.levels.size(); ++n) {
        const auto& a = one.levels[n];
        const auto& b = two.levels[n];
        for (auto [fa, fb] : {std::pair{&a.p1, &b.p1}, std::pair{&a.p2, &b.p2},
                              std::pair{&a.p3, &b.p3}, std::pair{&a.p4, &b.p4}})
            for (std::size_t k = 0; k < fa->size(); ++k)
                CHECK((*fb)[k] == 2.0 * (*fa)[k]);
    }
}

TEST_CASE("homogeneous backward sweep tracks a coupled RK4 oracle") {
    // With spatially uniform data the adjoint PDE collapses to the 4d ODE
    // -p' = F^T(z(t)) p + a e2. The oracle integrates the reversed coupled
    // system (state backward from z(T), adjoint forward in reversed time)
    // with classical RK4 at dt/100.
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{8, 8, 10.0, 10.0};
    const double horizon = 2.0;
    const TimeSpec t = TimeSpec::fit(horizon, std::min(1.25e-4, cfl_max_dt(p, g)));
    const StatePoint z0{2.19, 0.5, 0.1, 0.05};
    const double u_const = 0.3;

    ObjectiveConfig cfg;
    cfg.horizon = horizon;
    cfg.infection_weight = 1.0;

    const ControlTrajectory u = ControlTrajectory::constant(u_const, g, t.levels());
    const StateTrajectory states =
        simulate_forward(uniform_state(g, z0), u, p, g, t);
    const AdjointTrajectory adj = solve_adjoint(states, u, p, cfg, JacobianMode::full);

    // Reversed-time coupled system y = (z~, q): z~' = -g(z~), q' = F^T(z~) q + a e2.
    const auto rhs = [&](const std::array<double, 8>& y) {
        const StatePoint z{y[0], y[1], y[2], y[3]};
        const Vec4 gz = reaction_terms(z, u_const, p);
        const Vec4 q{y[4], y[5], y[6], y[7]};
        const Vec4 cq = hand_transpose_apply(q, z, u_const, p, true);
        return std::array<double, 8>{-gz[0], -gz[1], -gz[2], -gz[3],
                                     cq[0], cq[1] + cfg.infection_weight, cq[2], cq[3]};
    };
    const auto rk4_step = [&](std::array<double, 8> y, double h) {
        const auto k1 = rhs(y);
        std::array<double, 8> tmp;
        for (int k = 0; k < 8; ++k) tmp[k] = y[k] + 0.5 * h * k1[k];
        const auto k2 = rhs(tmp);
        for (int k = 0; k < 8; ++k) tmp[k] = y[k] + 0.5 * h * k2[k];
        const auto k3 = rhs(tmp);
        for (int k = 0; k < 8; ++k) tmp[k] = y[k] + h * k3[k];
        const auto k4 = rhs(tmp);
        for (int k = 0; k < 8; ++k)
            y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        return y;
    };

    const StateFields& zt = states.levels.back();
    std::array<double, 8> y{zt.s(3, 3), zt.i(3, 3), zt.c(3, 3), zt.a(3, 3),
                            0.0, 0.0, 0.0, 0.0};

    double adj_scale = 0.0;
    for (const auto& level : adj.levels)
        for (const Field* f : {&level.p1, &level.p2, &level.p3, &level.p4})
            for (double v : f->values()) adj_scale = std::max(adj_scale, std::abs(v));

    double worst = 0.0;
    const double h = t.dt / 100.0;
    for (int n = t.steps; n >= 0; --n) {
        if (n < t.steps)
            for (int sub = 0; sub < 100; ++sub) y = rk4_step(y, h);
        const auto& level = adj.levels[static_cast<std::size_t>(n)];
        const Vec4 got{level.p1(3, 3), level.p2(3, 3), level.p3(3, 3), level.p4(3, 3)};
        for (int k = 0; k < 4; ++k)
            worst = std::max(worst, std::abs(got[static_cast<std::size_t>(k)] -
                                             y[static_cast<std::size_t>(4 + k)]));
    }
    CHECK(worst / adj_scale < 1e-3);
}

TEST_CASE("non-finite adjoint values raise StabilityViolation") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{5, 5, 10.0, 10.0};
    ObjectiveConfig cfg;
    AdjointFields bad = AdjointFields::on(g);
    bad.p2(2, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(step_adjoint_backward(bad, StateFields::on(g), Field::on(g), p, cfg,
                                          g, 1e-3, JacobianMode::full),
                    StabilityViolation);
}

TEST_CASE("mismatched trajectories are rejected") {
    const ModelParams p = ModelParams::defaults();
    const GridSpec g{8, 8, 10.0, 10.0};
    const TimeSpec t = TimeSpec::fit(1.0, 1e-2);
    ObjectiveConfig cfg;
    const StateTrajectory states = simulate_forward(
        uniform_state(g, {1.0, 0.1, 0.0, 0.0}),
        ControlTrajectory::constant(0.0, g, t.levels()), p, g, t);
    const ControlTrajectory too_short = ControlTrajectory::constant(0.0, g, 3);
    CHECK_THROWS_AS(solve_adjoint(states, too_short, p, cfg, JacobianMode::full),
                    ValidationError);
}

TEST_SUITE_END();
