#ifndef SICA_ERRORS_HPP
#define SICA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sica {

/// Base class for all solver errors. `category()` is a stable,
/// machine-readable token used by the CLI for exit-code mapping.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* category() const noexcept { return "internal"; }
};

/// The time integrator produced a non-finite value or a negative value
/// beyond the roundoff tolerance. `time_level` is the step at which the
/// violation was detected (-1 if not applicable).
class StabilityViolation : public Error {
public:
    StabilityViolation(const std::string& what, int time_level = -1)
        : Error(what), time_level_(time_level) {}
    const char* category() const noexcept override { return "stability"; }
    int time_level() const noexcept { return time_level_; }

private:
    int time_level_;
};

/// Structural failure while reading a config or data file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    const char* category() const noexcept override { return "parse"; }
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A well-formed value violates a domain constraint. `field` names the
/// offending parameter.
class ValidationError : public Error {
public:
    ValidationError(const std::string& field, const std::string& constraint)
        : Error(field + ": " + constraint), field_(field) {}
    const char* category() const noexcept override { return "validation"; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Filesystem failure with the offending path attached.
class IoError : public Error {
public:
    IoError(const std::string& what, const std::string& path)
        : Error(what + ": " + path), path_(path) {}
    const char* category() const noexcept override { return "io"; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace sica

#endif  // SICA_ERRORS_HPP
