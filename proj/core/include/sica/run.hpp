#ifndef SICA_RUN_HPP
#define SICA_RUN_HPP

#include <optional>
#include <string>
#include <vector>

#include "sica/scenario.hpp"

namespace sica {

/// Summary of one scenario execution, also serialized to report.json.
struct RunReport {
    std::string command;  // "simulate" or "optimize"
    double wall_seconds = 0.0;
    double objective_value = 0.0;
    std::vector<double> objective_history;  // optimize runs
    bool converged = true;
    int iterations = 0;
    long clamp_events = 0;
    double min_value = 0.0;
    double population_law_max_rel_dev = 0.0;
    std::vector<std::string> files;  // manifest, relative to out_dir
    std::string out_dir;
    std::string config_echo;  // canonical dump of the resolved scenario
    std::vector<std::string> warnings;
};

/// File outputs of a run: timeseries.csv, snapshot grids, j_history.csv
/// (when a history is given) and the resolved config echo. Returns the
/// manifest of files written (relative names). The control snapshots
/// (snap_u_*) are written only when `write_control_snapshots` is set.
std::vector<std::string> write_outputs(const StateTrajectory& states,
                                       const ControlTrajectory& controls,
                                       const std::vector<double>& objective_history,
                                       const ScenarioConfig& cfg, const TimeSpec& time,
                                       bool write_control_snapshots);

/// Execute a scenario per its control spec (constant -> simulate,
/// optimize -> forward-backward sweep), write outputs into
/// cfg.output.directory, and return the report. report.json is written
/// as part of the run.
RunReport run_scenario(const ScenarioConfig& cfg);

}  // namespace sica

#endif  // SICA_RUN_HPP
