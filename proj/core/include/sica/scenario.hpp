#ifndef SICA_SCENARIO_HPP
#define SICA_SCENARIO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sica/forward.hpp"
#include "sica/optimize.hpp"

namespace sica {

/// Per-compartment initial-condition specification.
struct InitialSpec {
    enum class Kind { uniform, gaussian, file };

    Kind kind = Kind::uniform;
    double value = 0.0;  // uniform

    // gaussian: amplitude * exp(-((x-cx)^2 + (y-cy)^2) / (2*width^2))
    double amplitude = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double width = 1.0;

    std::string path;  // file: snapshot-format CSV (ny lines of nx values)

    static InitialSpec uniform(double v);
    static InitialSpec gaussian(double amplitude, double cx, double cy, double width);

    bool operator==(const InitialSpec&) const = default;
};

struct ControlSpec {
    enum class Kind { constant, optimize };

    Kind kind = Kind::constant;
    double value = 0.0;  // constant

    bool operator==(const ControlSpec&) const = default;
};

struct OutputOptions {
    int snapshot_stride = 0;  // 0 = auto (about ten snapshots per run)
    std::string directory = "out";

    bool operator==(const OutputOptions&) const = default;
};

/// Everything needed to run one scenario. Defaults reproduce the baseline
/// case study: 10x10 km domain, 64x64 grid, T = 25 days, disease-free
/// susceptible background with a central infection bump.
struct ScenarioConfig {
    int schema_version = 1;

    ModelParams model = ModelParams::defaults();
    double aids_death_rate = 0.0;  // accepted for completeness; unused by the kinetics

    GridSpec grid;

    // [time] block: the horizon lives in objective.horizon; dt is a
    // requested cap, and the effective step also honors the CFL bound.
    double max_dt = 1e-2;

    ObjectiveConfig objective;
    FbsmConfig fbsm;

    InitialSpec init_s = InitialSpec::uniform(2.19);
    InitialSpec init_i = InitialSpec::gaussian(0.5, 5.0, 5.0, 1.0);
    InitialSpec init_c = InitialSpec::uniform(0.0);
    InitialSpec init_a = InitialSpec::uniform(0.0);

    ControlSpec control;
    OutputOptions output;

    unsigned seed = 0;  // reserved; no stochastic features

    /// Cross-field validation (delegates to the block validators).
    /// Appends non-fatal findings (e.g. nonzero aids_death_rate) to
    /// `warnings` when provided.
    void validate(std::vector<std::string>* warnings = nullptr) const;

    /// Effective time discretization: dt = min(max_dt, cfl_max_dt) fitted
    /// to divide the horizon evenly.
    TimeSpec resolve_time() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// The built-in default scenario (uncontrolled baseline).
ScenarioConfig default_scenario();

/// Parse the structured-text scenario format (see docs/config_format.md):
/// `key = value` pairs grouped under `[section]` headers, `#` comments.
/// Unknown sections or keys fail validation. The returned config is fully
/// validated with defaults applied to omitted keys.
ScenarioConfig parse_config(std::string_view text,
                            std::vector<std::string>* warnings = nullptr);

/// parse_config over the contents of `path`.
ScenarioConfig load_config(const std::filesystem::path& path,
                           std::vector<std::string>* warnings = nullptr);

/// Canonical text form of a config; load_config(dump_config(c)) == c,
/// including exact floating-point round-trip.
std::string dump_config(const ScenarioConfig& cfg);

/// Materialize one initial-condition field on the grid. Gaussian tails are
/// evaluated exactly (no cutoff); file fields are read from the snapshot
/// CSV format. Negative values fail validation.
Field build_initial_field(const InitialSpec& spec, const GridSpec& g);

/// All four compartments of the initial state.
StateFields build_initial_state(const ScenarioConfig& cfg);

}  // namespace sica

#endif  // SICA_SCENARIO_HPP
