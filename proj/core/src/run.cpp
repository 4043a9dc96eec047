#include "sica/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sica/errors.hpp"
#include "text_io.hpp"

namespace sica {

namespace fs = std::filesystem;
using detail::format_double;

namespace {

constexpr int kCsvDigits = 12;

std::vector<int> snapshot_levels(int steps, int stride) {
    if (stride <= 0) stride = std::max(1, (steps + 9) / 10);
    std::vector<int> levels;
    for (int n = 0; n <= steps; n += stride) levels.push_back(n);
    if (levels.back() != steps) levels.push_back(steps);
    return levels;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file", path.string());
    out << text;
    if (!out) throw IoError("write failed", path.string());
}

struct TimeseriesRow {
    double t;
    double mean[4];
    double total[4];
    double u_mean;
    double n_total;
};

TimeseriesRow make_row(double t, const StateFields& z, const Field& u,
                       const GridSpec& g) {
    TimeseriesRow row{};
    row.t = t;
    const Field* fields[4] = {&z.s, &z.i, &z.c, &z.a};
    double n = 0.0;
    for (int k = 0; k < 4; ++k) {
        row.total[k] = integrate_field(*fields[k], g);
        row.mean[k] = row.total[k] / g.area();
        n += row.total[k];
    }
    row.n_total = n;
    row.u_mean = field_mean(u, g);
    return row;
}

std::string format_timeseries(const std::vector<TimeseriesRow>& rows) {
    std::string text =
        "t,S_mean,I_mean,C_mean,A_mean,S_total,I_total,C_total,A_total,u_mean,"
        "N_total\n";
    for (const auto& r : rows) {
        text += format_double(r.t, kCsvDigits);
        for (double v : r.mean) text += "," + format_double(v, kCsvDigits);
        for (double v : r.total) text += "," + format_double(v, kCsvDigits);
        text += "," + format_double(r.u_mean, kCsvDigits);
        text += "," + format_double(r.n_total, kCsvDigits);
        text += "\n";
    }
    return text;
}

/// Largest relative deviation of N_total(t) from the exact balance law
/// N(t) = area*Lambda/mu + (N0 - area*Lambda/mu)*exp(-mu*t); for mu = 0 the
/// law degenerates to linear growth N0 + area*Lambda*t.
double population_law_deviation(const std::vector<TimeseriesRow>& rows,
                                const ModelParams& p, const GridSpec& g) {
    if (rows.empty()) return 0.0;
    const double n0 = rows.front().n_total;
    double worst = 0.0;
    for (const auto& r : rows) {
        double expected;
        if (p.mu > 0.0) {
            const double eq = g.area() * p.recruitment / p.mu;
            expected = eq + (n0 - eq) * std::exp(-p.mu * r.t);
        } else {
            expected = n0 + g.area() * p.recruitment * r.t;
        }
        const double scale = std::max(std::abs(expected), 1e-300);
        worst = std::max(worst, std::abs(r.n_total - expected) / scale);
    }
    return worst;
}

}  // namespace

std::vector<std::string> write_outputs(const StateTrajectory& states,
                                       const ControlTrajectory& controls,
                                       const std::vector<double>& objective_history,
                                       const ScenarioConfig& cfg, const TimeSpec& time,
                                       bool write_control_snapshots) {
    const fs::path dir(cfg.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory", dir.string());

    std::vector<std::string> manifest;

    std::vector<TimeseriesRow> rows;
    rows.reserve(states.levels.size());
    for (int n = 0; n < time.levels(); ++n)
        rows.push_back(make_row(time.t(n), states.at(n), controls.level(n), states.grid));
    write_text_file(dir / "timeseries.csv", format_timeseries(rows));
    manifest.push_back("timeseries.csv");

    const char* comp_names[4] = {"S", "I", "C", "A"};
    for (int level : snapshot_levels(time.steps, cfg.output.snapshot_stride)) {
        const StateFields& z = states.at(level);
        const Field* fields[4] = {&z.s, &z.i, &z.c, &z.a};
        for (int k = 0; k < 4; ++k) {
            const std::string name =
                std::string("snap_") + comp_names[k] + "_" + std::to_string(level) +
                ".csv";
            detail::write_field_csv(dir / name, *fields[k], kCsvDigits);
            manifest.push_back(name);
        }
        if (write_control_snapshots) {
            const std::string name = "snap_u_" + std::to_string(level) + ".csv";
            detail::write_field_csv(dir / name, controls.level(level), kCsvDigits);
            manifest.push_back(name);
        }
    }

    if (!objective_history.empty()) {
        std::string text = "iter,J\n";
        for (std::size_t k = 0; k < objective_history.size(); ++k)
            text += std::to_string(k) + "," +
                    format_double(objective_history[k], kCsvDigits) + "\n";
        write_text_file(dir / "j_history.csv", text);
        manifest.push_back("j_history.csv");
    }

    write_text_file(dir / "resolved_config.cfg", dump_config(cfg));
    manifest.push_back("resolved_config.cfg");

    return manifest;
}

RunReport run_scenario(const ScenarioConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();

    RunReport report;
    cfg.validate(&report.warnings);
    report.config_echo = dump_config(cfg);
    report.out_dir = cfg.output.directory;

    const TimeSpec time = cfg.resolve_time();
    const StateFields z0 = build_initial_state(cfg);

    StepStats stats;
    StateTrajectory states;
    ControlTrajectory controls;
    const bool optimizing = (cfg.control.kind == ControlSpec::Kind::optimize);

    if (optimizing) {
        report.command = "optimize";
        OptimizationResult result =
            fbsm_optimize(z0, cfg.model, cfg.grid, time, cfg.objective, cfg.fbsm);
        report.objective_history = result.objective_history;
        report.objective_value = result.objective_history.back();
        report.converged = result.converged;
        report.iterations = result.iterations;
        states = std::move(result.states);
        controls = std::move(result.control);
        // Streamed re-run of the final control to gather the clamp counters.
        integrate_forward(
            z0, [&](int n) -> const Field& { return controls.level(n); }, cfg.model,
            cfg.grid, time, {}, 1e-9, &stats);
    } else {
        report.command = "simulate";
        controls = ControlTrajectory::constant(cfg.control.value, cfg.grid, time.levels());
        states = simulate_forward(z0, controls, cfg.model, cfg.grid, time, 1e-9, &stats);
        report.objective_value = evaluate_objective(states, controls, cfg.objective,
                                                    cfg.grid);
        report.converged = true;
        report.iterations = 0;
    }
    report.clamp_events = stats.clamp_events;
    report.min_value = stats.min_value;

    report.files = write_outputs(states, controls, report.objective_history, cfg, time,
                                 optimizing);

    {
        std::vector<TimeseriesRow> rows;
        rows.reserve(states.levels.size());
        for (int n = 0; n < time.levels(); ++n)
            rows.push_back(
                make_row(time.t(n), states.at(n), controls.level(n), states.grid));
        report.population_law_max_rel_dev =
            population_law_deviation(rows, cfg.model, cfg.grid);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json j;
    j["schema_version"] = 1;
    j["command"] = report.command;
    j["wall_seconds"] = report.wall_seconds;
    j["objective"] = report.objective_value;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    j["invariants"] = {
        {"clamp_events", report.clamp_events},
        {"min_value", report.min_value},
        {"population_law_max_rel_dev", report.population_law_max_rel_dev},
    };
    j["warnings"] = report.warnings;
    j["files"] = report.files;
    j["config"] = report.config_echo;
    write_text_file(fs::path(cfg.output.directory) / "report.json", j.dump(2) + "\n");
    report.files.push_back("report.json");

    return report;
}

}  // namespace sica
