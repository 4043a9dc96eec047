#include <benchmark/benchmark.h>

#include <cmath>

#include "sica/adjoint.hpp"
#include "sica/optimize.hpp"

using namespace sica;

namespace {

StateFields seeded_state(const GridSpec& g) {
    StateFields z = StateFields::on(g);
    z.s.fill(2.19);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dx = g.x(i) - 0.5 * g.lx, dy = g.y(j) - 0.5 * g.ly;
            z.i(i, j) = 0.5 * std::exp(-(dx * dx + dy * dy) / 2.0);
        }
    return z;
}

void bm_laplacian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridSpec g{n, n, 10.0, 10.0};
    const Field f = seeded_state(g).i;
    Field out = Field::on(g);
    for (auto _ : state) {
        laplacian_neumann(f, g, out);
        benchmark::DoNotOptimize(out.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g.node_count());
}
BENCHMARK(bm_laplacian)->Arg(64)->Arg(256);

void bm_forward_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridSpec g{n, n, 10.0, 10.0};
    const ModelParams p = ModelParams::defaults();
    const StateFields z = seeded_state(g);
    const Field u = Field::on(g, 0.3);
    const double dt = 0.5 * cfl_max_dt(p, g);
    for (auto _ : state) {
        StateFields next = step_state(z, u, p, g, dt);
        benchmark::DoNotOptimize(next.i.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g.node_count());
}
BENCHMARK(bm_forward_step)->Arg(64)->Arg(128);

void bm_adjoint_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GridSpec g{n, n, 10.0, 10.0};
    const ModelParams p = ModelParams::defaults();
    const StateFields z = seeded_state(g);
    AdjointFields adj = AdjointFields::on(g);
    adj.p2.fill(1.0);
    const Field u = Field::on(g, 0.3);
    ObjectiveConfig cfg;
    const double dt = 0.5 * cfl_max_dt(p, g);
    for (auto _ : state) {
        AdjointFields prev =
            step_adjoint_backward(adj, z, u, p, cfg, g, dt, JacobianMode::full);
        benchmark::DoNotOptimize(prev.p2.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g.node_count());
}
BENCHMARK(bm_adjoint_step)->Arg(64)->Arg(128);

void bm_forward_sweep(benchmark::State& state) {
    const GridSpec g{32, 32, 10.0, 10.0};
    const ModelParams p = ModelParams::defaults();
    const StateFields z0 = seeded_state(g);
    const TimeSpec t = TimeSpec::fit(1.0, std::min(1e-2, cfl_max_dt(p, g)));
    const Field u = Field::on(g, 0.0);
    for (auto _ : state) {
        StateFields final_state =
            integrate_forward(z0, [&](int) -> const Field& { return u; }, p, g, t);
        benchmark::DoNotOptimize(final_state.i.values().data());
    }
    state.SetItemsProcessed(state.iterations() * t.steps * g.node_count());
}
BENCHMARK(bm_forward_sweep);

void bm_projection(benchmark::State& state) {
    const GridSpec g{128, 128, 10.0, 10.0};
    const StateFields z = seeded_state(g);
    Field p1 = Field::on(g, 0.2), p2 = Field::on(g, 0.9);
    ObjectiveConfig cfg;
    for (auto _ : state) {
        Field u = project_control(z.i, p1, p2, cfg);
        benchmark::DoNotOptimize(u.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g.node_count());
}
BENCHMARK(bm_projection);

}  // namespace

BENCHMARK_MAIN();
