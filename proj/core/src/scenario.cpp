#include "sica/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sica/errors.hpp"
#include "text_io.hpp"

namespace sica {

using detail::format_double_exact;
using detail::parse_double;
using detail::parse_int;
using detail::trim;

InitialSpec InitialSpec::uniform(double v) {
    InitialSpec s;
    s.kind = Kind::uniform;
    s.value = v;
    return s;
}

InitialSpec InitialSpec::gaussian(double amplitude, double cx, double cy, double width) {
    InitialSpec s;
    s.kind = Kind::gaussian;
    s.amplitude = amplitude;
    s.center_x = cx;
    s.center_y = cy;
    s.width = width;
    return s;
}

ScenarioConfig default_scenario() { return ScenarioConfig{}; }

namespace {

void validate_initial(const InitialSpec& s, const std::string& name) {
    switch (s.kind) {
        case InitialSpec::Kind::uniform:
            if (!(s.value >= 0.0) || !std::isfinite(s.value))
                throw ValidationError(name + ".value", "must be finite and >= 0");
            break;
        case InitialSpec::Kind::gaussian:
            if (!(s.amplitude >= 0.0) || !std::isfinite(s.amplitude))
                throw ValidationError(name + ".amplitude", "must be finite and >= 0");
            if (!(s.width > 0.0) || !std::isfinite(s.width))
                throw ValidationError(name + ".width", "must be > 0");
            if (!std::isfinite(s.center_x) || !std::isfinite(s.center_y))
                throw ValidationError(name + ".center", "must be finite");
            break;
        case InitialSpec::Kind::file:
            if (s.path.empty())
                throw ValidationError(name + ".path", "must not be empty");
            break;
    }
}

}  // namespace

void ScenarioConfig::validate(std::vector<std::string>* warnings) const {
    if (schema_version != 1)
        throw ValidationError("schema_version", "unsupported version " +
                                                    std::to_string(schema_version));
    model.validate();
    grid.validate();
    objective.validate();
    fbsm.validate();
    if (!(max_dt > 0.0) || !std::isfinite(max_dt))
        throw ValidationError("dt", "must be finite and > 0");
    if (!(aids_death_rate >= 0.0) || !std::isfinite(aids_death_rate))
        throw ValidationError("d", "must be finite and >= 0");
    if (aids_death_rate > 0.0 && warnings)
        warnings->push_back(
            "model.d is nonzero but the kinetics never use it; value ignored");
    validate_initial(init_s, "initial.S");
    validate_initial(init_i, "initial.I");
    validate_initial(init_c, "initial.C");
    validate_initial(init_a, "initial.A");
    if (control.kind == ControlSpec::Kind::constant) {
        if (!(control.value >= 0.0 && control.value <= objective.u_max))
            throw ValidationError("control.value", "must lie in [0, u_max]");
    }
    if (output.snapshot_stride < 0)
        throw ValidationError("snapshot_stride", "must be >= 0");
    if (output.directory.empty())
        throw ValidationError("directory", "must not be empty");
}

TimeSpec ScenarioConfig::resolve_time() const {
    const double stable = cfl_max_dt(model, grid, /*zero_diffusion_cap=*/max_dt);
    return TimeSpec::fit(objective.horizon, std::min(max_dt, stable));
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, RawValue>;
using Document = std::map<std::string, Section>;

Document tokenize(std::string_view text) {
    Document doc;
    std::string section;  // "" = top level
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++lineno;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", lineno);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ParseError("empty section name", lineno);
            doc[section];
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", lineno);
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError("empty key", lineno);
        auto [it, inserted] = doc[section].emplace(key, RawValue{value, lineno, false});
        if (!inserted)
            throw ParseError("duplicate key '" + key + "' (first on line " +
                                 std::to_string(it->second.line) + ")",
                             lineno);
    }
    return doc;
}

class Reader {
public:
    explicit Reader(Document doc) : doc_(std::move(doc)) {}

    bool has_section(const std::string& name) const { return doc_.count(name) > 0; }

    std::optional<double> number(const std::string& section, const std::string& key) {
        RawValue* raw = find(section, key);
        if (!raw) return std::nullopt;
        auto v = parse_double(raw->text);
        if (!v)
            throw ParseError("expected a number for '" + qualified(section, key) +
                                 "', got '" + raw->text + "'",
                             raw->line);
        return v;
    }

    std::optional<long long> integer(const std::string& section, const std::string& key) {
        RawValue* raw = find(section, key);
        if (!raw) return std::nullopt;
        auto v = parse_int(raw->text);
        if (!v)
            throw ParseError("expected an integer for '" + qualified(section, key) +
                                 "', got '" + raw->text + "'",
                             raw->line);
        return v;
    }

    std::optional<std::string> string(const std::string& section, const std::string& key) {
        RawValue* raw = find(section, key);
        if (!raw) return std::nullopt;
        return raw->text;
    }

    /// Every key must have been consumed by now; unknown keys or sections
    /// are configuration mistakes, not extensions.
    void reject_unused() const {
        static const char* known_sections[] = {
            "",          "model",     "grid",      "time",      "objective",
            "fbsm",      "initial.S", "initial.I", "initial.C", "initial.A",
            "control",   "output"};
        for (const auto& [section, entries] : doc_) {
            bool known = false;
            for (const char* s : known_sections)
                if (section == s) known = true;
            if (!known)
                throw ValidationError("[" + section + "]", "unknown section");
            for (const auto& [key, raw] : entries)
                if (!raw.used)
                    throw ValidationError(qualified(section, key), "unknown key");
        }
    }

private:
    static std::string qualified(const std::string& section, const std::string& key) {
        return section.empty() ? key : section + "." + key;
    }

    RawValue* find(const std::string& section, const std::string& key) {
        auto sit = doc_.find(section);
        if (sit == doc_.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        kit->second.used = true;
        return &kit->second;
    }

    Document doc_;
};

InitialSpec parse_initial(Reader& r, const std::string& section,
                          const InitialSpec& fallback) {
    InitialSpec spec = fallback;
    if (auto kind = r.string(section, "kind")) {
        if (*kind == "uniform")
            spec = InitialSpec::uniform(0.0);
        else if (*kind == "gaussian")
            spec = InitialSpec::gaussian(0.0, 0.0, 0.0, 1.0);
        else if (*kind == "file")
            spec.kind = InitialSpec::Kind::file;
        else
            throw ValidationError(section + ".kind",
                                  "must be uniform, gaussian or file");
    }
    if (auto v = r.number(section, "value")) spec.value = *v;
    if (auto v = r.number(section, "amplitude")) spec.amplitude = *v;
    if (auto v = r.number(section, "center_x")) spec.center_x = *v;
    if (auto v = r.number(section, "center_y")) spec.center_y = *v;
    if (auto v = r.number(section, "width")) spec.width = *v;
    if (auto v = r.string(section, "path")) spec.path = *v;
    return spec;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::vector<std::string>* warnings) {
    Reader r(tokenize(text));
    ScenarioConfig cfg;  // defaults

    if (auto v = r.integer("", "schema_version"))
        cfg.schema_version = static_cast<int>(*v);
    if (auto v = r.integer("", "seed")) cfg.seed = static_cast<unsigned>(*v);

    // Model block: composite rates are derived from the (possibly
    // overridden) primitives unless given explicitly, and the recruitment
    // default tracks mu (Lambda = 2.19*mu in the baseline set).
    bool recruitment_set = false, xi1_set = false, xi2_set = false, xi3_set = false;
    if (auto v = r.number("model", "mu")) cfg.model.mu = *v;
    if (auto v = r.number("model", "recruitment")) {
        cfg.model.recruitment = *v;
        recruitment_set = true;
    }
    if (auto v = r.number("model", "beta")) cfg.model.beta = *v;
    if (auto v = r.number("model", "eta_c")) cfg.model.eta_c = *v;
    if (auto v = r.number("model", "eta_a")) cfg.model.eta_a = *v;
    if (auto v = r.number("model", "phi")) cfg.model.phi = *v;
    if (auto v = r.number("model", "rho")) cfg.model.rho = *v;
    if (auto v = r.number("model", "gamma")) cfg.model.gamma = *v;
    if (auto v = r.number("model", "omega")) cfg.model.omega = *v;
    if (auto v = r.number("model", "xi1")) {
        cfg.model.xi1 = *v;
        xi1_set = true;
    }
    if (auto v = r.number("model", "xi2")) {
        cfg.model.xi2 = *v;
        xi2_set = true;
    }
    if (auto v = r.number("model", "xi3")) {
        cfg.model.xi3 = *v;
        xi3_set = true;
    }
    if (auto v = r.number("model", "d_s")) cfg.model.d_s = *v;
    if (auto v = r.number("model", "d_i")) cfg.model.d_i = *v;
    if (auto v = r.number("model", "d_c")) cfg.model.d_c = *v;
    if (auto v = r.number("model", "d_a")) cfg.model.d_a = *v;
    if (auto v = r.number("model", "d")) cfg.aids_death_rate = *v;
    if (!recruitment_set) cfg.model.recruitment = 2.19 * cfg.model.mu;
    {
        const double x1 = cfg.model.xi1, x2 = cfg.model.xi2, x3 = cfg.model.xi3;
        cfg.model.derive_composite_rates();
        if (xi1_set) cfg.model.xi1 = x1;
        if (xi2_set) cfg.model.xi2 = x2;
        if (xi3_set) cfg.model.xi3 = x3;
    }

    if (auto v = r.integer("grid", "nx")) cfg.grid.nx = static_cast<int>(*v);
    if (auto v = r.integer("grid", "ny")) cfg.grid.ny = static_cast<int>(*v);
    if (auto v = r.number("grid", "Lx")) cfg.grid.lx = *v;
    if (auto v = r.number("grid", "Ly")) cfg.grid.ly = *v;

    if (auto v = r.number("time", "T")) cfg.objective.horizon = *v;
    if (auto v = r.number("time", "dt")) cfg.max_dt = *v;

    if (auto v = r.number("objective", "a")) cfg.objective.infection_weight = *v;
    if (auto v = r.number("objective", "b")) cfg.objective.control_weight = *v;
    if (auto v = r.number("objective", "u_max")) cfg.objective.u_max = *v;

    if (auto v = r.integer("fbsm", "max_iters"))
        cfg.fbsm.max_iters = static_cast<int>(*v);
    if (auto v = r.number("fbsm", "tol")) cfg.fbsm.tol = *v;
    if (auto v = r.number("fbsm", "theta")) cfg.fbsm.relaxation = *v;
    if (auto v = r.string("fbsm", "jacobian")) {
        if (*v == "full")
            cfg.fbsm.jacobian = JacobianMode::full;
        else if (*v == "frozen_incidence")
            cfg.fbsm.jacobian = JacobianMode::frozen_incidence;
        else
            throw ValidationError("fbsm.jacobian",
                                  "must be full or frozen_incidence");
    }

    cfg.init_s = parse_initial(r, "initial.S", cfg.init_s);
    cfg.init_i = parse_initial(r, "initial.I", cfg.init_i);
    cfg.init_c = parse_initial(r, "initial.C", cfg.init_c);
    cfg.init_a = parse_initial(r, "initial.A", cfg.init_a);

    if (auto v = r.string("control", "kind")) {
        if (*v == "constant")
            cfg.control.kind = ControlSpec::Kind::constant;
        else if (*v == "optimize")
            cfg.control.kind = ControlSpec::Kind::optimize;
        else
            throw ValidationError("control.kind", "must be constant or optimize");
    }
    if (auto v = r.number("control", "value")) cfg.control.value = *v;

    if (auto v = r.integer("output", "snapshot_stride"))
        cfg.output.snapshot_stride = static_cast<int>(*v);
    if (auto v = r.string("output", "directory")) cfg.output.directory = *v;

    r.reject_unused();
    cfg.validate(warnings);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path,
                           std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), warnings);
}

// ---------------------------------------------------------------------------
// Canonical dump
// ---------------------------------------------------------------------------

namespace {

void dump_initial(std::ostringstream& out, const char* name, const InitialSpec& s) {
    out << "[initial." << name << "]\n";
    switch (s.kind) {
        case InitialSpec::Kind::uniform:
            out << "kind = uniform\n";
            out << "value = " << format_double_exact(s.value) << "\n";
            break;
        case InitialSpec::Kind::gaussian:
            out << "kind = gaussian\n";
            out << "amplitude = " << format_double_exact(s.amplitude) << "\n";
            out << "center_x = " << format_double_exact(s.center_x) << "\n";
            out << "center_y = " << format_double_exact(s.center_y) << "\n";
            out << "width = " << format_double_exact(s.width) << "\n";
            break;
        case InitialSpec::Kind::file:
            out << "kind = file\n";
            out << "path = " << s.path << "\n";
            break;
    }
    out << "\n";
}

}  // namespace

std::string dump_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    const auto d = [](double v) { return format_double_exact(v); };

    out << "schema_version = " << cfg.schema_version << "\n";
    out << "seed = " << cfg.seed << "\n\n";

    out << "[model]\n";
    out << "recruitment = " << d(cfg.model.recruitment) << "\n";
    out << "mu = " << d(cfg.model.mu) << "\n";
    out << "beta = " << d(cfg.model.beta) << "\n";
    out << "eta_c = " << d(cfg.model.eta_c) << "\n";
    out << "eta_a = " << d(cfg.model.eta_a) << "\n";
    out << "phi = " << d(cfg.model.phi) << "\n";
    out << "rho = " << d(cfg.model.rho) << "\n";
    out << "gamma = " << d(cfg.model.gamma) << "\n";
    out << "omega = " << d(cfg.model.omega) << "\n";
    out << "xi1 = " << d(cfg.model.xi1) << "\n";
    out << "xi2 = " << d(cfg.model.xi2) << "\n";
    out << "xi3 = " << d(cfg.model.xi3) << "\n";
    out << "d_s = " << d(cfg.model.d_s) << "\n";
    out << "d_i = " << d(cfg.model.d_i) << "\n";
    out << "d_c = " << d(cfg.model.d_c) << "\n";
    out << "d_a = " << d(cfg.model.d_a) << "\n";
    out << "d = " << d(cfg.aids_death_rate) << "\n\n";

    out << "[grid]\n";
    out << "nx = " << cfg.grid.nx << "\n";
    out << "ny = " << cfg.grid.ny << "\n";
    out << "Lx = " << d(cfg.grid.lx) << "\n";
    out << "Ly = " << d(cfg.grid.ly) << "\n\n";

    out << "[time]\n";
    out << "T = " << d(cfg.objective.horizon) << "\n";
    out << "dt = " << d(cfg.max_dt) << "\n\n";

    out << "[objective]\n";
    out << "a = " << d(cfg.objective.infection_weight) << "\n";
    out << "b = " << d(cfg.objective.control_weight) << "\n";
    out << "u_max = " << d(cfg.objective.u_max) << "\n\n";

    out << "[fbsm]\n";
    out << "max_iters = " << cfg.fbsm.max_iters << "\n";
    out << "tol = " << d(cfg.fbsm.tol) << "\n";
    out << "theta = " << d(cfg.fbsm.relaxation) << "\n";
    out << "jacobian = "
        << (cfg.fbsm.jacobian == JacobianMode::full ? "full" : "frozen_incidence")
        << "\n\n";

    dump_initial(out, "S", cfg.init_s);
    dump_initial(out, "I", cfg.init_i);
    dump_initial(out, "C", cfg.init_c);
    dump_initial(out, "A", cfg.init_a);

    out << "[control]\n";
    out << "kind = "
        << (cfg.control.kind == ControlSpec::Kind::constant ? "constant" : "optimize")
        << "\n";
    out << "value = " << d(cfg.control.value) << "\n\n";

    out << "[output]\n";
    out << "snapshot_stride = " << cfg.output.snapshot_stride << "\n";
    out << "directory = " << cfg.output.directory << "\n";

    return out.str();
}

// ---------------------------------------------------------------------------
// Initial conditions
// ---------------------------------------------------------------------------

Field build_initial_field(const InitialSpec& spec, const GridSpec& g) {
    switch (spec.kind) {
        case InitialSpec::Kind::uniform:
            return Field::on(g, spec.value);
        case InitialSpec::Kind::gaussian: {
            Field f = Field::on(g);
            const double inv = 1.0 / (2.0 * spec.width * spec.width);
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j) {
                    const double dx = g.x(i) - spec.center_x;
                    const double dy = g.y(j) - spec.center_y;
                    f(i, j) = spec.amplitude * std::exp(-(dx * dx + dy * dy) * inv);
                }
            return f;
        }
        case InitialSpec::Kind::file: {
            Field f = detail::read_field_csv(spec.path, g.nx, g.ny);
            for (double v : f.values()) {
                if (!std::isfinite(v))
                    throw ValidationError("initial field " + spec.path,
                                          "must be finite");
                if (v < 0.0)
                    throw ValidationError("initial field " + spec.path,
                                          "must be nonnegative");
            }
            return f;
        }
    }
    throw ValidationError("initial.kind", "unhandled kind");
}

StateFields build_initial_state(const ScenarioConfig& cfg) {
    return {build_initial_field(cfg.init_s, cfg.grid),
            build_initial_field(cfg.init_i, cfg.grid),
            build_initial_field(cfg.init_c, cfg.grid),
            build_initial_field(cfg.init_a, cfg.grid)};
}

}  // namespace sica
