// Command-line front end: scenario simulation, treatment optimization and
// the built-in numerical verification suite.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sica/checks.hpp"
#include "sica/errors.hpp"
#include "sica/run.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<double> control_const;
    std::optional<int> snapshot_stride;
    std::optional<unsigned> seed;
};

void add_common_flags(CLI::App* cmd, GlobalOptions& opt) {
    cmd->add_option("--config", opt.config_path, "Scenario config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out_dir, "Output directory (overrides config)");
    cmd->add_option("--control-const", opt.control_const,
                    "Constant control value (overrides config)");
    cmd->add_option("--snapshot-stride", opt.snapshot_stride,
                    "Store every Nth snapshot (0 = auto)");
    cmd->add_option("--seed", opt.seed, "Reserved; accepted for forward compatibility");
}

sica::ScenarioConfig resolve_config(const GlobalOptions& opt,
                                    std::vector<std::string>& warnings) {
    sica::ScenarioConfig cfg = opt.config_path.empty()
                                   ? sica::default_scenario()
                                   : sica::load_config(opt.config_path, &warnings);
    if (!opt.out_dir.empty()) cfg.output.directory = opt.out_dir;
    if (opt.control_const) {
        cfg.control.kind = sica::ControlSpec::Kind::constant;
        cfg.control.value = *opt.control_const;
    }
    if (opt.snapshot_stride) cfg.output.snapshot_stride = *opt.snapshot_stride;
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

int run_command(const GlobalOptions& opt, sica::ControlSpec::Kind kind) {
    std::vector<std::string> warnings;  // re-raised by run_scenario's validation
    sica::ScenarioConfig cfg = resolve_config(opt, warnings);
    cfg.control.kind = kind;

    const sica::RunReport report = sica::run_scenario(cfg);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

    std::cout << report.command << ": J = " << report.objective_value;
    if (report.command == "optimize") {
        std::cout << " after " << report.iterations << " iterations ("
                  << (report.converged ? "converged" : "not converged") << ")";
    }
    std::cout << "\n";
    std::cout << "outputs: " << report.out_dir << " (" << report.files.size()
              << " files, " << report.wall_seconds << " s)\n";
    if (report.clamp_events > 0)
        std::cout << "note: " << report.clamp_events
                  << " roundoff-negative values clamped (min " << report.min_value
                  << ")\n";
    if (!report.converged)
        std::cout << "note: optimizer hit the iteration limit; result is the last "
                     "iterate\n";
    return 0;
}

int validate_command(const GlobalOptions& opt) {
    std::vector<std::string> warnings;
    sica::ScenarioConfig cfg = resolve_config(opt, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    const auto results = sica::run_validation_checks(cfg);
    std::size_t failed = 0;
    for (const auto& r : results) {
        std::printf("%-4s %-45s %s\n", r.pass ? "ok" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}

int exit_code_for(const sica::Error& e) {
    const std::string category = e.category();
    if (category == "parse") return 3;
    if (category == "validation") return 4;
    if (category == "stability") return 5;
    if (category == "io") return 6;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatiotemporal SICA epidemic solver with optimal treatment control"};
    app.require_subcommand(1);

    GlobalOptions opt;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Run the model with a constant control");
    add_common_flags(simulate, opt);
    CLI::App* optimize =
        app.add_subcommand("optimize", "Compute the optimal control (FBSM)");
    add_common_flags(optimize, opt);
    CLI::App* validate =
        app.add_subcommand("validate", "Run the numerical verification suite");
    add_common_flags(validate, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return run_command(opt, sica::ControlSpec::Kind::constant);
        if (optimize->parsed())
            return run_command(opt, sica::ControlSpec::Kind::optimize);
        return validate_command(opt);
    } catch (const sica::Error& e) {
        std::cerr << "error: category=" << e.category() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: category=internal: " << e.what() << "\n";
        return 1;
    }
}
